#pragma once

// Evaluation measures. Undefined cases (no recommended items, no relevant
// items, zero ideal gain) resolve to 0.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hyrec/error.hpp"

namespace hyrec::metrics {

struct RatedPrediction {
    int movie = 0;
    double estimated = 0;
    double true_rating = 0;
};

using UserPredictions = std::vector<RatedPrediction>;

struct MetricReport {
    std::string name;
    std::optional<int> k;
    double value = 0;
    std::size_t n_users = 0;
};

struct EstimateTruth {
    double estimated = 0;
    double truth = 0;
};

inline double rmse(std::span<const EstimateTruth> pairs) {
    if (pairs.empty()) throw Error("rmse of an empty set");
    double s = 0;
    for (const auto& p : pairs) s += (p.estimated - p.truth) * (p.estimated - p.truth);
    return std::sqrt(s / static_cast<double>(pairs.size()));
}

inline double perplexity(double mean_ce_loss) {
    if (!(mean_ce_loss >= 0)) throw Error("perplexity needs a nonnegative loss");
    return std::exp(mean_ce_loss);
}

/// Sorted by estimate, descending; ties keep the lower movie index first.
inline UserPredictions by_estimate(UserPredictions preds) {
    std::stable_sort(preds.begin(), preds.end(), [](const RatedPrediction& a, const RatedPrediction& b) {
        if (a.estimated != b.estimated) return a.estimated > b.estimated;
        return a.movie < b.movie;
    });
    return preds;
}

struct PrecisionRecall {
    double precision = 0;
    double recall = 0;
};

/// One user's precision@k / recall@k. Recommended = top-k items whose
/// estimate reaches `recommend_threshold`; relevant = items anywhere whose
/// true rating reaches `relevance_threshold`.
inline PrecisionRecall precision_recall_user(const UserPredictions& preds, std::size_t k, double relevance_threshold,
                                             double recommend_threshold) {
    const auto sorted = by_estimate(preds);
    std::size_t relevant = 0, recommended = 0, hit = 0;
    for (const auto& p : sorted)
        if (p.true_rating >= relevance_threshold) ++relevant;
    for (std::size_t i = 0; i < std::min(k, sorted.size()); ++i) {
        if (sorted[i].estimated < recommend_threshold) continue;
        ++recommended;
        if (sorted[i].true_rating >= relevance_threshold) ++hit;
    }
    PrecisionRecall pr;
    pr.precision = recommended ? static_cast<double>(hit) / static_cast<double>(recommended) : 0.0;
    pr.recall = relevant ? static_cast<double>(hit) / static_cast<double>(relevant) : 0.0;
    return pr;
}

/// Means over users of precision@k and recall@k.
inline PrecisionRecall precision_recall_at_k(std::span<const UserPredictions> users, std::size_t k,
                                             double threshold = 3.0,
                                             std::optional<double> recommend_threshold = std::nullopt) {
    if (k < 1) throw ConfigError("k must be at least 1");
    if (users.empty()) throw Error("precision/recall over zero users");
    PrecisionRecall mean;
    for (const auto& u : users) {
        auto pr = precision_recall_user(u, k, threshold, recommend_threshold.value_or(threshold));
        mean.precision += pr.precision;
        mean.recall += pr.recall;
    }
    mean.precision /= static_cast<double>(users.size());
    mean.recall /= static_cast<double>(users.size());
    return mean;
}

/// NDCG@k of one list with linear gains (the true rating itself).
inline double ndcg_rated_user(const UserPredictions& preds, std::size_t k) {
    if (k < 1) throw ConfigError("k must be at least 1");
    if (preds.empty()) throw Error("ndcg of an empty list");
    const auto sorted = by_estimate(preds);
    std::vector<double> ideal;
    ideal.reserve(preds.size());
    for (const auto& p : preds) ideal.push_back(p.true_rating);
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double dcg = 0, idcg = 0;
    for (std::size_t i = 0; i < std::min(k, sorted.size()); ++i) {
        const double disc = std::log2(static_cast<double>(i) + 2.0);
        dcg += sorted[i].true_rating / disc;
        idcg += ideal[i] / disc;
    }
    return idcg > 0 ? dcg / idcg : 0.0;
}

inline double ndcg_rated(std::span<const UserPredictions> users, std::size_t k) {
    if (users.empty()) throw Error("ndcg over zero users");
    double s = 0;
    for (const auto& u : users) s += ndcg_rated_user(u, k);
    return s / static_cast<double>(users.size());
}

/// Gain of a single held-out item: 1/log2(rank+1) if it sits at 1-based
/// position rank <= k of `ranked`, else 0.
inline double hit_gain(std::span<const int> ranked, int held_out, std::size_t k) {
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i)
        if (ranked[i] == held_out) return 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return 0.0;
}

struct HeldOutCase {
    std::vector<int> ranked;
    int held_out = 0;
};

/// Leave-one-out hit-NDCG@k averaged over cases.
inline double hit_ndcg_at_k(std::span<const HeldOutCase> cases, std::size_t k = 10) {
    if (k < 1) throw ConfigError("k must be at least 1");
    if (cases.empty()) throw Error("hit-NDCG over an empty test set");
    double s = 0;
    for (const auto& c : cases) s += hit_gain(c.ranked, c.held_out, k);
    return s / static_cast<double>(cases.size());
}

inline std::string report_label(const MetricReport& r) {
    return r.k ? r.name + "@" + std::to_string(*r.k) : r.name;
}

/// Aligned two-column text table.
inline void write_table(std::ostream& os, std::span<const MetricReport> reports) {
    std::size_t w = 6;
    for (const auto& r : reports) w = std::max(w, report_label(r).size());
    os << std::left << std::setw(static_cast<int>(w)) << "metric" << "  " << std::right << std::setw(12) << "value"
       << "  " << std::setw(8) << "n" << '\n';
    for (const auto& r : reports) {
        std::ostringstream v;
        v << std::fixed << std::setprecision(6) << r.value;
        os << std::left << std::setw(static_cast<int>(w)) << report_label(r) << "  " << std::right << std::setw(12)
           << v.str() << "  " << std::setw(8) << r.n_users << '\n';
    }
}

inline void write_csv(std::ostream& os, std::span<const MetricReport> reports) {
    os << "metric,k,value,n\n";
    for (const auto& r : reports) {
        std::ostringstream v;
        v << std::setprecision(17) << r.value;
        os << r.name << ',' << (r.k ? std::to_string(*r.k) : "") << ',' << v.str() << ',' << r.n_users << '\n';
    }
}

}  // namespace hyrec::metrics
