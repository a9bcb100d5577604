// Trains both models on a small synthetic log and prints the three lists the
// `recommend` command shows, for a few fusion weights.

#include <cstdio>
#include <random>

#include "hyrec/hyrec.hpp"

using namespace hyrec;

int main() {
    // Users walk a cycle of 30 movies starting at a user-specific offset.
    data::InteractionLog log;
    log.rating_scale = {1.0, 5.0};
    std::mt19937_64 rng(7);
    for (int u = 0; u < 40; ++u) {
        for (int t = 0; t < 12; ++t) {
            int m = (u * 3 + t) % 30;
            double r = 1.0 + static_cast<double>((m * 7 + u) % 5);
            log.rows.push_back({"user_" + std::to_string(u), "movie_" + std::to_string(m), r, 1000 + t});
        }
    }
    auto ds = data::Dataset::from_log(log);
    auto histories = ds.histories();
    auto splits = pipeline::make_splits(histories, {});

    seq::SeqModelConfig sc;
    sc.d_model = 16;
    sc.movie_vocab_size = static_cast<int>(ds.movies.size());
    sc.user_vocab_size = static_cast<int>(ds.users.size());
    seq::SeqModel<float> seq_model(sc, 1);
    seq::train_seq(seq_model, splits.seq_train, {20, 32, 0.1, 1, true});

    rate::RatingModelConfig rc;
    rc.embed_dim = 16;
    rc.hidden_dim = 32;
    rc.rating_scale = log.rating_scale;
    rc.movie_vocab_size = sc.movie_vocab_size;
    rc.user_vocab_size = sc.user_vocab_size;
    rate::RatingModel<float> rating_model(rc, 1);
    rate::train_rating(rating_model, splits.rate_train, {20, 32, 1, true});

    const auto& h = histories.front();
    auto p1 = rating_model.recommend_unseen(h.user_index, h.movie_indices, 100);
    auto p2 = seq_model.recommend_next(h.user_index, h.movie_indices, 100);
    for (double sigma : {1.0, 0.5, 0.0}) {
        auto fused = rank::truncate(rank::fuse(p1, p2, {sigma}), 5);
        std::printf("sigma1 = %.2f:", sigma);
        for (const auto& e : fused.entries) std::printf(" %s(%.3f)", ds.display_name(e.movie).c_str(), e.score);
        std::printf("\n");
    }
    return 0;
}
