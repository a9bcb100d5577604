#pragma once

// Glue shared by the command-line tool and the acceptance suite: deterministic
// splits, leave-one-out cases for the sequential model and the popularity
// baseline, per-user rating predictions and the fusion sweep.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "hyrec/dataset.hpp"
#include "hyrec/metrics.hpp"
#include "hyrec/ranking.hpp"
#include "hyrec/raterec.hpp"
#include "hyrec/seqrec.hpp"

namespace hyrec::pipeline {

struct SplitParams {
    int window_len = 4;
    int step = 2;
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
};

struct Splits {
    std::vector<data::SequenceExample> seq_train, seq_test;
    std::vector<data::RatingExample> rate_train, rate_test;
};

inline Splits make_splits(std::span<const data::UserHistory> histories, const SplitParams& p) {
    Splits s;
    const data::SplitConfig cfg{p.train_fraction, p.seed};
    auto windows = data::make_all_windows(histories, p.window_len, p.step);
    if (!windows.empty()) std::tie(s.seq_train, s.seq_test) = data::split_examples(windows, cfg);
    auto ratings = data::rating_examples(histories);
    if (!ratings.empty()) std::tie(s.rate_train, s.rate_test) = data::split_examples(ratings, cfg);
    return s;
}

/// Prefix of a test window (all but the held-out final item), pad removed.
inline std::vector<int> window_prefix(const data::SequenceExample& ex) {
    std::vector<int> out;
    for (std::size_t i = 0; i + 1 < ex.window.size(); ++i)
        if (ex.window[i] != data::kPadIndex) out.push_back(ex.window[i]);
    return out;
}

template <class T>
std::vector<metrics::HeldOutCase> sequential_cases(const seq::SeqModel<T>& model,
                                                   std::span<const data::SequenceExample> test, std::size_t k) {
    std::vector<metrics::HeldOutCase> cases;
    cases.reserve(test.size());
    for (const auto& ex : test) {
        auto prefix = window_prefix(ex);
        cases.push_back({model.recommend_next(ex.user_index, prefix, k).movies(), ex.window.back()});
    }
    return cases;
}

/// Popularity list ranked against the same held-out items, minus each
/// window's watched prefix.
inline std::vector<metrics::HeldOutCase> baseline_cases(const rank::ScoredList& popular,
                                                        std::span<const data::SequenceExample> test, std::size_t k) {
    std::vector<metrics::HeldOutCase> cases;
    cases.reserve(test.size());
    for (const auto& ex : test) {
        auto prefix = window_prefix(ex);
        cases.push_back({rank::truncate(rank::exclude(popular, prefix), k).movies(), ex.window.back()});
    }
    return cases;
}

/// Full qualifying popularity ranking (no list-size cut) over `ratings`.
inline rank::ScoredList popularity_ranking(std::span<const data::RatingExample> ratings, double quantile = 0.95) {
    return rank::popularity_baseline(ratings, {quantile, std::numeric_limits<std::size_t>::max()});
}

/// Held-out predictions grouped by user (ascending user index).
template <class T>
std::vector<metrics::UserPredictions> rating_predictions(const rate::RatingModel<T>& model,
                                                         std::span<const data::RatingExample> test,
                                                         std::vector<metrics::EstimateTruth>* pairs = nullptr) {
    auto pred = model.predict_pairs(test);
    std::map<int, metrics::UserPredictions> by_user;
    for (std::size_t i = 0; i < test.size(); ++i) {
        by_user[test[i].user_index].push_back({test[i].movie_index, pred[i], test[i].rating});
        if (pairs) pairs->push_back({pred[i], test[i].rating});
    }
    std::vector<metrics::UserPredictions> out;
    out.reserve(by_user.size());
    for (auto& [u, p] : by_user) out.push_back(std::move(p));
    return out;
}

/// Mean over users of the fraction of their items rated at least `threshold`.
inline double base_relevance_rate(std::span<const metrics::UserPredictions> users, double threshold = 3.0) {
    if (users.empty()) throw Error("base relevance rate over zero users");
    double s = 0;
    for (const auto& u : users) {
        std::size_t rel = 0;
        for (const auto& p : u) rel += p.true_rating >= threshold;
        s += u.empty() ? 0.0 : static_cast<double>(rel) / static_cast<double>(u.size());
    }
    return s / static_cast<double>(users.size());
}

// ---------------------------------------------------------------------------
// Fusion sweep

/// One evaluation user: candidate movies with true ratings and both models' scores.
struct FusionCase {
    int user = 0;
    std::vector<int> movies;
    std::vector<double> truth;
    rank::ScoredList p1;  // rating model
    rank::ScoredList p2;  // sequential model
};

struct SweepRow {
    double sigma1 = 0;
    double ndcg_at_10 = 0;
    double precision_at_50 = 0;
    double recall_at_50 = 0;
    double overlap_with_p1 = 0;
    double overlap_with_p2 = 0;
};

/// Builds one case per user with held-out ratings. Candidates are the user's
/// held-out movies; the sequential model conditions on the user's training
/// items in time order.
template <class T>
std::vector<FusionCase> fusion_cases(const rate::RatingModel<T>& rating_model, const seq::SeqModel<T>& seq_model,
                                     std::span<const data::UserHistory> histories,
                                     std::span<const data::RatingExample> rate_train,
                                     std::span<const data::RatingExample> rate_test) {
    std::map<int, std::vector<std::pair<int, double>>> test_by_user;
    for (const auto& r : rate_test) test_by_user[r.user_index].emplace_back(r.movie_index, r.rating);
    std::map<int, std::vector<std::uint8_t>> in_train;
    for (const auto& r : rate_train) {
        auto& v = in_train[r.user_index];
        if (v.empty()) v.assign(static_cast<std::size_t>(seq_model.config().movie_vocab_size), 0);
        v[static_cast<std::size_t>(r.movie_index)] = 1;
    }
    std::map<int, const data::UserHistory*> hist;
    for (const auto& h : histories) hist[h.user_index] = &h;

    std::vector<FusionCase> out;
    for (auto& [user, items] : test_by_user) {
        auto hit = hist.find(user);
        auto tit = in_train.find(user);
        if (hit == hist.end() || tit == in_train.end()) continue;
        std::vector<int> train_seq;
        for (int m : hit->second->movie_indices)
            if (tit->second[static_cast<std::size_t>(m)]) train_seq.push_back(m);
        if (train_seq.empty()) continue;
        FusionCase c;
        c.user = user;
        // A movie rated more than once becomes one candidate with the mean rating.
        std::sort(items.begin(), items.end());
        for (std::size_t i = 0; i < items.size();) {
            std::size_t j = i;
            double total = 0;
            for (; j < items.size() && items[j].first == items[i].first; ++j) total += items[j].second;
            c.movies.push_back(items[i].first);
            c.truth.push_back(total / static_cast<double>(j - i));
            i = j;
        }
        auto rscores = rating_model.score_movies(user, c.movies);
        auto probs = seq_model.next_distribution(user, train_seq);
        c.p1.source = rank::Source::rating;
        c.p2.source = rank::Source::sequential;
        for (std::size_t i = 0; i < c.movies.size(); ++i) {
            c.p1.entries.push_back({c.movies[i], rscores[i]});
            c.p2.entries.push_back({c.movies[i], probs[static_cast<std::size_t>(c.movies[i])]});
        }
        rank::sort_entries(c.p1.entries);
        rank::sort_entries(c.p2.entries);
        out.push_back(std::move(c));
    }
    return out;
}

/// Rank-based metrics of one scored list against a case's true ratings:
/// NDCG@10 with rating gains, precision/recall@50 with every top-50 item
/// treated as recommended and relevance at rating >= 3.
struct RankedQuality {
    double ndcg_at_10 = 0;
    double precision_at_50 = 0;
    double recall_at_50 = 0;
};

inline RankedQuality ranked_quality(const FusionCase& c, const rank::ScoredList& list) {
    std::map<int, double> truth;
    for (std::size_t i = 0; i < c.movies.size(); ++i) truth[c.movies[i]] = c.truth[i];
    // Position in the list becomes the estimate so ties resolve exactly as ranked.
    metrics::UserPredictions preds;
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        auto it = truth.find(list.entries[i].movie);
        if (it == truth.end()) continue;
        preds.push_back({list.entries[i].movie, -static_cast<double>(i), it->second});
    }
    RankedQuality q;
    if (preds.empty()) return q;
    q.ndcg_at_10 = metrics::ndcg_rated_user(preds, 10);
    auto pr = metrics::precision_recall_user(preds, 50, 3.0, -std::numeric_limits<double>::infinity());
    q.precision_at_50 = pr.precision;
    q.recall_at_50 = pr.recall;
    return q;
}

inline double top_overlap(const rank::ScoredList& a, const rank::ScoredList& b, std::size_t k) {
    const auto n = std::min({k, a.size(), b.size()});
    if (n == 0) return 0.0;
    std::vector<int> x, y;
    for (std::size_t i = 0; i < n; ++i) {
        x.push_back(a.entries[i].movie);
        y.push_back(b.entries[i].movie);
    }
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::vector<int> both;
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
    return static_cast<double>(both.size()) / static_cast<double>(n);
}

inline SweepRow sweep_row(std::span<const FusionCase> cases, double sigma1,
                          rank::Normalization norm = rank::Normalization::minmax) {
    if (cases.empty()) throw Error("fusion sweep over zero users");
    SweepRow row;
    row.sigma1 = sigma1;
    for (const auto& c : cases) {
        auto fused = rank::fuse(c.p1, c.p2, {sigma1, norm, std::nullopt, std::nullopt});
        auto q = ranked_quality(c, fused);
        row.ndcg_at_10 += q.ndcg_at_10;
        row.precision_at_50 += q.precision_at_50;
        row.recall_at_50 += q.recall_at_50;
        row.overlap_with_p1 += top_overlap(fused, c.p1, 10);
        row.overlap_with_p2 += top_overlap(fused, c.p2, 10);
    }
    const double n = static_cast<double>(cases.size());
    row.ndcg_at_10 /= n;
    row.precision_at_50 /= n;
    row.recall_at_50 /= n;
    row.overlap_with_p1 /= n;
    row.overlap_with_p2 /= n;
    return row;
}

/// Same measures for a single model's list, for comparison with sweep endpoints.
inline RankedQuality single_model_quality(std::span<const FusionCase> cases, bool first) {
    RankedQuality mean;
    for (const auto& c : cases) {
        auto q = ranked_quality(c, first ? c.p1 : c.p2);
        mean.ndcg_at_10 += q.ndcg_at_10;
        mean.precision_at_50 += q.precision_at_50;
        mean.recall_at_50 += q.recall_at_50;
    }
    const double n = static_cast<double>(cases.size());
    mean.ndcg_at_10 /= n;
    mean.precision_at_50 /= n;
    mean.recall_at_50 /= n;
    return mean;
}

}  // namespace hyrec::pipeline
