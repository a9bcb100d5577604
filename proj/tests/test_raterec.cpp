#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hyrec/raterec.hpp"
#include "oracles.hpp"

using namespace hyrec;
using TD = num::Tensor<double>;
using VD = num::Var<double>;

namespace {

rate::RatingModelConfig small(int U = 6, int V = 12) {
    rate::RatingModelConfig c;
    c.embed_dim = 8;
    c.hidden_dim = 16;
    c.user_vocab_size = U;
    c.movie_vocab_size = V;
    c.rating_scale = {1.0, 5.0};
    return c;
}

/// Ratings with user and movie effects: r = clamp(3 + a_u + b_m).
std::vector<data::RatingExample> structured(int U, int V, std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0, 0.8);
    std::vector<double> a(static_cast<std::size_t>(U)), b(static_cast<std::size_t>(V));
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    std::vector<data::RatingExample> out;
    for (std::size_t i = 0; i < n; ++i) {
        const int u = int(rng() % std::uint64_t(U));
        const int m = 1 + int(rng() % std::uint64_t(V - 1));
        out.push_back({u, m, std::clamp(std::round(3 + a[std::size_t(u)] + b[std::size_t(m)]), 1.0, 5.0)});
    }
    return out;
}

}  // namespace

TEST(RatingModel, ConfigValidation) {
    auto c = small();
    c.dropout_rate = 1.0;
    EXPECT_THROW(rate::RatingModel<double>(c, 1), ConfigError);
    c = small();
    c.embed_dim = 0;
    EXPECT_THROW(rate::RatingModel<double>(c, 1), ConfigError);
}

TEST(RatingModel, InferenceIsPure) {
    rate::RatingModel<double> m(small(), 1);
    auto a = m.predict_rating(2, 5);
    auto b = m.predict_rating(2, 5);
    EXPECT_EQ(a.raw, b.raw);
    EXPECT_GE(a.clipped, 1.0);
    EXPECT_LE(a.clipped, 5.0);
}

TEST(RatingModel, ZeroParametersGiveOutputBias) {
    rate::RatingModel<double> m(small(), 1);
    for (auto& p : m.params())
        for (auto& v : p.var.mutable_value().data()) v = 0;
    auto bias = m.params().get("output.bias");
    bias.mutable_value()[0] = 3.25;
    EXPECT_EQ(m.predict_rating(0, 3).raw, 3.25);
}

TEST(RatingModel, ClippedCopyForDisplay) {
    rate::RatingModel<double> m(small(), 1);
    for (auto& p : m.params())
        for (auto& v : p.var.mutable_value().data()) v = 0;
    m.params().get("output.bias").ptr()->value[0] = 7.0;
    auto p = m.predict_rating(0, 1);
    EXPECT_EQ(p.raw, 7.0);
    EXPECT_EQ(p.clipped, 5.0);
}

TEST(RatingModel, GradientMatchesFiniteDifferences) {
    rate::RatingModel<double> m(small(), 2);
    std::vector<int> users{0, 3, 3}, movies{4, 1, 7};
    auto truth = num::constant(TD({3, 1}, {4.0, 2.0, 5.0}));
    auto build = [&] {
        num::DropoutStream s(5);
        return num::mse(m.forward(users, movies, true, s), truth);
    };
    std::vector<VD> leaves;
    for (auto& p : m.params()) leaves.push_back(p.var);
    for (auto& p : m.params()) p.var.zero_grad();
    num::backward(build());
    for (auto& p : m.params()) {
        auto analytic = p.var.grad();
        auto numeric = oracle::numeric_gradient(p.var, [&] { return build().value()[0]; });
        EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-4) << p.name;
    }
    // Rows touched by the batch carry gradient; others stay zero.
    const auto& gu = m.params().get("user_embedding").grad();
    EXPECT_NE(std::count_if(gu.begin() + 3 * 8, gu.begin() + 4 * 8, [](double v) { return v != 0; }), 0);
    EXPECT_TRUE(std::all_of(gu.begin() + 8, gu.begin() + 3 * 8, [](double v) { return v == 0; }));
}

TEST(RatingModel, ConstantRatingsFitQuickly) {
    // Default widths and Adam at lr 1e-3. The fit is measured with dropout off,
    // as every evaluation pass is.
    rate::RatingModelConfig c;
    c.user_vocab_size = 40;
    c.movie_vocab_size = 51;
    std::vector<data::RatingExample> train;
    for (int u = 0; u < 40; ++u)
        for (int m = 1; m < 51; ++m) train.push_back({u, m, 4.0});
    rate::RatingModel<float> model(c, 3);
    rate::train_rating(model, train, {5, 32, 1, true});
    EXPECT_LT(model.evaluate_mse(train), 0.01);
}

TEST(RatingModel, SingleExampleConverges) {
    rate::RatingModelConfig c;
    c.user_vocab_size = 4;
    c.movie_vocab_size = 8;
    c.dropout_rate = 0;  // dropout noise would keep Adam circling the target
    std::vector<data::RatingExample> one{{2, 5, 3.5}};
    rate::RatingModel<float> model(c, 4);
    rate::train_rating(model, one, {4000, 1, 1, false});
    EXPECT_NEAR(model.predict_rating(2, 5).raw, 3.5, 0.05);
}

TEST(RatingModel, FirstEpochDescends) {
    std::mt19937_64 rng(5);
    auto train = structured(20, 40, rng, 2000);
    rate::RatingModel<float> model(small(20, 40), 5);
    const double before = model.evaluate_mse(train);
    auto log = rate::train_rating(model, train, {1, 256, 1, true});
    EXPECT_LT(log[0].mse, before);
    EXPECT_LT(model.evaluate_mse(train), before);
}

TEST(RatingModel, BeatsGlobalMeanOnHeldOut) {
    std::mt19937_64 rng(6);
    auto all = structured(30, 60, rng, 6000);
    auto [train, test] = data::split_examples(all, {0.8, 1});
    rate::RatingModel<float> model(small(30, 60), 6);
    rate::train_rating(model, train, {20, 64, 1, true});
    double mean = 0;
    for (const auto& r : train) mean += r.rating;
    mean /= double(train.size());
    std::vector<std::pair<double, double>> flat, pred;
    auto p = model.predict_pairs(test);
    for (std::size_t i = 0; i < test.size(); ++i) {
        flat.emplace_back(mean, test[i].rating);
        pred.emplace_back(p[i], test[i].rating);
    }
    EXPECT_LT(oracle::rmse(pred), oracle::rmse(flat));
}

TEST(RatingModel, TrainingIsDeterministic) {
    std::mt19937_64 rng(7);
    auto train = structured(10, 20, rng, 500);
    rate::RatingModel<float> a(small(10, 20), 8), b(small(10, 20), 8);
    auto la = rate::train_rating(a, train, {3, 32, 4, true});
    auto lb = rate::train_rating(b, train, {3, 32, 4, true});
    for (std::size_t i = 0; i < la.size(); ++i) EXPECT_EQ(la[i].mse, lb[i].mse);
    EXPECT_THROW(rate::train_rating(a, std::span<const data::RatingExample>(), {}), Error);
}

TEST(RecommendUnseen, MatchesBruteForce) {
    rate::RatingModel<double> m(small(4, 30), 9);
    std::vector<int> watched{2, 9, 17, 29};
    auto list = m.recommend_unseen(1, watched, 10);
    EXPECT_TRUE(rank::well_formed(list));
    std::vector<std::pair<double, int>> all;
    for (int mv = 1; mv < 30; ++mv)
        if (!std::count(watched.begin(), watched.end(), mv)) all.emplace_back(m.predict_rating(1, mv).raw, mv);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    ASSERT_EQ(list.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(list.entries[i].movie, all[i].second);
        EXPECT_NEAR(list.entries[i].score, all[i].first, 1e-12);
    }
    auto full = m.recommend_unseen(1, watched, all.size());
    EXPECT_EQ(full.size(), all.size());
    EXPECT_FALSE(full.exhausted);
    for (const auto& e : full.entries) EXPECT_EQ(std::count(watched.begin(), watched.end(), e.movie), 0);
}

TEST(RecommendUnseen, EverythingSeenGivesFlaggedEmptyList) {
    rate::RatingModel<double> m(small(2, 5), 10);
    std::vector<int> watched{1, 2, 3, 4};
    auto list = m.recommend_unseen(0, watched, 3);
    EXPECT_TRUE(list.empty());
    EXPECT_TRUE(list.exhausted);
}

TEST(RecommendUnseen, BiasShiftKeepsOrder) {
    rate::RatingModel<double> m(small(3, 25), 11);
    std::vector<int> watched{4};
    auto before = m.recommend_unseen(2, watched, 24).movies();
    m.params().get("output.bias").ptr()->value[0] += 1.75;
    EXPECT_EQ(m.recommend_unseen(2, watched, 24).movies(), before);
}

TEST(RatingModel, BatchSizeIndependentScores) {
    rate::RatingModel<float> m(small(3, 40), 12);
    std::vector<int> movies;
    for (int i = 1; i < 40; ++i) movies.push_back(i);
    auto a = m.score_movies(1, movies, 1);
    auto b = m.score_movies(1, movies, 1024);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
}
