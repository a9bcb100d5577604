#pragma once

// Ranked candidate lists and the operations that combine them: min-max
// commensuration, weighted post-fusion, thresholding and the weighted-rating
// popularity baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hyrec/dataset.hpp"
#include "hyrec/error.hpp"

namespace hyrec::rank {

enum class Source { sequential, rating, fused, baseline };

inline std::string_view to_string(Source s) {
    switch (s) {
        case Source::sequential: return "sequential";
        case Source::rating: return "rating";
        case Source::fused: return "fused";
        case Source::baseline: return "baseline";
    }
    return "?";
}

struct ScoredEntry {
    int movie = 0;
    double score = 0.0;

    friend bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
};

/// Descending score, ties broken by ascending movie index.
inline bool ranks_before(const ScoredEntry& a, const ScoredEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.movie < b.movie;
}

struct ScoredList {
    std::vector<ScoredEntry> entries;
    Source source = Source::fused;
    /// Set when fewer candidates than requested were available.
    bool exhausted = false;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
    std::vector<int> movies() const {
        std::vector<int> m;
        m.reserve(entries.size());
        for (const auto& e : entries) m.push_back(e.movie);
        return m;
    }
};

inline void sort_entries(std::vector<ScoredEntry>& entries) { std::sort(entries.begin(), entries.end(), ranks_before); }

/// Checks the list invariants: nonincreasing scores, unique movies, no pad.
inline bool well_formed(const ScoredList& list) {
    std::vector<int> seen;
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const auto& e = list.entries[i];
        if (e.movie == data::kPadIndex) return false;
        if (i > 0 && list.entries[i - 1].score < e.score) return false;
        seen.push_back(e.movie);
    }
    std::sort(seen.begin(), seen.end());
    return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

/// Top-k of a dense per-movie score vector, skipping the pad index and any
/// movie flagged in `excluded` (indexed by movie; may be shorter than scores).
inline ScoredList top_k(std::span<const double> scores, std::span<const std::uint8_t> excluded, std::size_t k,
                        Source source) {
    if (k < 1) throw ConfigError("k must be at least 1");
    std::vector<ScoredEntry> cand;
    cand.reserve(scores.size());
    for (std::size_t m = 0; m < scores.size(); ++m) {
        if (m == static_cast<std::size_t>(data::kPadIndex)) continue;
        if (m < excluded.size() && excluded[m]) continue;
        cand.push_back({static_cast<int>(m), scores[m]});
    }
    ScoredList out;
    out.source = source;
    out.exhausted = cand.size() < k;
    const auto take = std::min(k, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(), ranks_before);
    cand.resize(take);
    out.entries = std::move(cand);
    return out;
}

enum class Normalization { minmax, none };

/// Affine map of scores onto [0, 1]; a constant list maps to all 1.0.
inline ScoredList normalize(const ScoredList& list, Normalization method = Normalization::minmax) {
    if (list.empty()) throw Error("cannot normalize an empty list");
    ScoredList out = list;
    if (method == Normalization::none) return out;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& e : list.entries) {
        lo = std::min(lo, e.score);
        hi = std::max(hi, e.score);
    }
    for (auto& e : out.entries) e.score = hi > lo ? (e.score - lo) / (hi - lo) : 1.0;
    sort_entries(out.entries);
    return out;
}

struct FusionConfig {
    double sigma1 = 0.5;
    Normalization normalization = Normalization::minmax;
    std::optional<double> threshold_p1;
    std::optional<double> threshold_p2;
};

/// Keeps entries scoring at least `tau`, preserving order.
inline ScoredList threshold_filter(const ScoredList& list, double tau) {
    ScoredList out;
    out.source = list.source;
    out.exhausted = list.exhausted;
    for (const auto& e : list.entries)
        if (e.score >= tau) out.entries.push_back(e);
    return out;
}

/// sigma1 * p1 + (1 - sigma1) * p2 over the union of candidates; a movie
/// missing from one list scores 0 there. Thresholds, when set, apply to each
/// normalized input before fusion.
inline ScoredList fuse(const ScoredList& p1, const ScoredList& p2, const FusionConfig& cfg) {
    if (!(cfg.sigma1 >= 0.0 && cfg.sigma1 <= 1.0)) throw ConfigError("sigma1 must lie in [0, 1]");
    auto prep = [&](const ScoredList& l, const std::optional<double>& tau) {
        ScoredList n = l.empty() ? l : normalize(l, cfg.normalization);
        return tau ? threshold_filter(n, *tau) : n;
    };
    const ScoredList a = prep(p1, cfg.threshold_p1);
    const ScoredList b = prep(p2, cfg.threshold_p2);
    std::map<int, std::pair<double, double>> scores;
    for (const auto& e : a.entries) scores[e.movie].first = e.score;
    for (const auto& e : b.entries) scores[e.movie].second = e.score;
    ScoredList out;
    out.source = Source::fused;
    out.entries.reserve(scores.size());
    for (const auto& [movie, s] : scores) {
        if (movie == data::kPadIndex) continue;
        out.entries.push_back({movie, cfg.sigma1 * s.first + (1.0 - cfg.sigma1) * s.second});
    }
    sort_entries(out.entries);
    return out;
}

/// First k entries; flags the list when it had fewer than k.
inline ScoredList truncate(ScoredList list, std::size_t k) {
    list.exhausted = list.entries.size() < k;
    if (list.entries.size() > k) list.entries.resize(k);
    return list;
}

/// Shrinks a movie's mean rating R toward the global mean C by vote scarcity.
inline double weighted_rating(double votes, double mean_rating, double min_votes, double global_mean) {
    return votes / (votes + min_votes) * mean_rating + min_votes / (votes + min_votes) * global_mean;
}

struct BaselineConfig {
    double quantile = 0.95;
    std::size_t list_size = 10;
};

/// Linear-interpolated quantile of `values` (sorted copy), q in [0, 1].
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error("quantile of an empty set");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct MovieStats {
    int movie = 0;
    double votes = 0;
    double mean_rating = 0;
};

/// Per-movie vote counts and mean ratings, ordered by movie index.
inline std::vector<MovieStats> movie_stats(std::span<const data::RatingExample> ratings) {
    std::map<int, std::pair<double, double>> acc;  // movie -> (count, sum)
    for (const auto& r : ratings) {
        auto& a = acc[r.movie_index];
        a.first += 1;
        a.second += r.rating;
    }
    std::vector<MovieStats> out;
    out.reserve(acc.size());
    for (const auto& [m, a] : acc) out.push_back({m, a.first, a.second / a.first});
    return out;
}

/// Popularity list: movies whose vote count reaches the configured quantile of
/// all per-movie counts, scored by weighted_rating. The global mean C is the
/// mean of per-movie mean ratings.
inline ScoredList popularity_baseline(std::span<const data::RatingExample> ratings, const BaselineConfig& cfg) {
    if (ratings.empty()) throw Error("popularity baseline needs a nonempty log");
    if (!(cfg.quantile > 0.0 && cfg.quantile < 1.0)) throw ConfigError("baseline quantile must lie in (0, 1)");
    if (cfg.list_size < 1) throw ConfigError("baseline list size must be at least 1");
    const auto stats = movie_stats(ratings);
    std::vector<double> counts;
    double mean_sum = 0;
    for (const auto& s : stats) {
        counts.push_back(s.votes);
        mean_sum += s.mean_rating;
    }
    const double min_votes = quantile(counts, cfg.quantile);
    const double global_mean = mean_sum / static_cast<double>(stats.size());
    ScoredList out;
    out.source = Source::baseline;
    for (const auto& s : stats) {
        if (s.movie == data::kPadIndex || s.votes < min_votes) continue;
        out.entries.push_back({s.movie, weighted_rating(s.votes, s.mean_rating, min_votes, global_mean)});
    }
    sort_entries(out.entries);
    return truncate(std::move(out), cfg.list_size);
}

/// Removes watched movies from a list, preserving order.
inline ScoredList exclude(const ScoredList& list, std::span<const int> watched) {
    std::vector<int> w(watched.begin(), watched.end());
    std::sort(w.begin(), w.end());
    ScoredList out;
    out.source = list.source;
    out.exhausted = list.exhausted;
    for (const auto& e : list.entries)
        if (!std::binary_search(w.begin(), w.end(), e.movie)) out.entries.push_back(e);
    return out;
}

}  // namespace hyrec::rank
