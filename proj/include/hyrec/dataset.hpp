#pragma once

// MovieLens-style ingestion: CSV parsing, ID prefixing, vocabularies,
// per-user chronological histories, sliding windows, splits and batching.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hyrec/error.hpp"

namespace hyrec::data {

inline constexpr std::string_view kUserPrefix = "user_";
inline constexpr std::string_view kMoviePrefix = "movie_";
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr int kPadIndex = 0;

struct RatingScale {
    double min = 0.5;
    double max = 5.0;

    bool contains(double r) const { return r >= min && r <= max; }
};

struct RawInteraction {
    std::string user_id;
    std::string movie_id;
    double rating = 0.0;
    std::int64_t timestamp = 0;
};

struct InteractionLog {
    std::vector<RawInteraction> rows;
    RatingScale rating_scale;
};

/// Bidirectional token <-> dense index map. Indices are contiguous from 0.
/// A vocabulary built with a pad token reserves index 0 for it.
class IdVocabulary {
public:
    IdVocabulary() = default;

    /// Builds a vocabulary over the distinct tokens, assigned in sorted order
    /// so the result does not depend on input row order.
    static IdVocabulary from_tokens(std::vector<std::string> tokens, bool with_pad) {
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        IdVocabulary v;
        if (with_pad) {
            v.has_pad_ = true;
            v.push(std::string(kPadToken));
        }
        for (auto& t : tokens) {
            if (with_pad && t == kPadToken) continue;
            v.push(std::move(t));
        }
        return v;
    }

    /// Rebuilds a vocabulary from an index-ordered token list (as stored on disk).
    static IdVocabulary from_ordered(std::vector<std::string> index_to_token, bool with_pad) {
        IdVocabulary v;
        v.has_pad_ = with_pad;
        for (auto& t : index_to_token) {
            if (v.token_to_index_.count(t)) throw FormatError("duplicate vocabulary token '" + t + "'");
            v.push(std::move(t));
        }
        if (with_pad && (v.size() == 0 || v.index_to_token_[0] != kPadToken))
            throw FormatError("vocabulary with pad must start with " + std::string(kPadToken));
        return v;
    }

    int encode(std::string_view token) const {
        auto it = token_to_index_.find(std::string(token));
        if (it == token_to_index_.end()) throw IndexError("unknown token '" + std::string(token) + "'");
        return it->second;
    }

    std::optional<int> find(std::string_view token) const {
        auto it = token_to_index_.find(std::string(token));
        if (it == token_to_index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& decode(int index) const {
        if (index < 0 || static_cast<std::size_t>(index) >= index_to_token_.size())
            throw IndexError("vocabulary index " + std::to_string(index) + " out of range [0, " +
                             std::to_string(index_to_token_.size()) + ")");
        return index_to_token_[static_cast<std::size_t>(index)];
    }

    bool contains(std::string_view token) const { return token_to_index_.count(std::string(token)) > 0; }
    std::size_t size() const { return index_to_token_.size(); }
    bool has_pad() const { return has_pad_; }
    std::optional<int> pad_index() const { return has_pad_ ? std::optional<int>(kPadIndex) : std::nullopt; }
    const std::vector<std::string>& tokens() const { return index_to_token_; }

    /// Up to `count` known tokens closest to `token` in sort order.
    std::vector<std::string> nearest(std::string_view token, std::size_t count = 3) const {
        std::vector<std::string> sorted;
        for (std::size_t i = has_pad_ ? 1 : 0; i < index_to_token_.size(); ++i) sorted.push_back(index_to_token_[i]);
        std::sort(sorted.begin(), sorted.end());
        auto pos = std::lower_bound(sorted.begin(), sorted.end(), std::string(token)) - sorted.begin();
        std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, pos - static_cast<std::ptrdiff_t>(count / 2 + 1));
        std::vector<std::string> out;
        for (auto i = lo; i < static_cast<std::ptrdiff_t>(sorted.size()) && out.size() < count; ++i)
            out.push_back(sorted[static_cast<std::size_t>(i)]);
        return out;
    }

private:
    void push(std::string t) {
        token_to_index_.emplace(t, static_cast<int>(index_to_token_.size()));
        index_to_token_.push_back(std::move(t));
    }

    std::unordered_map<std::string, int> token_to_index_;
    std::vector<std::string> index_to_token_;
    bool has_pad_ = false;
};

struct UserHistory {
    int user_index = 0;
    std::vector<int> movie_indices;  // ascending timestamp
    std::vector<double> ratings;
    std::vector<std::int64_t> timestamps;

    std::size_t size() const { return movie_indices.size(); }
};

struct SequenceExample {
    int user_index = 0;
    std::vector<int> window;

    friend bool operator==(const SequenceExample&, const SequenceExample&) = default;
};

struct RatingExample {
    int user_index = 0;
    int movie_index = 0;
    double rating = 0.0;

    friend bool operator==(const RatingExample&, const RatingExample&) = default;
};

struct SplitConfig {
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
};

enum class PadSide { left, right };

// ---------------------------------------------------------------------------
// CSV

namespace detail {

/// Splits one CSV record; handles double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
    s = trim(s);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Locates a column by any of its accepted names; throws naming the canonical one.
inline std::size_t find_column(const std::vector<std::string>& header, std::initializer_list<std::string_view> names,
                               std::string_view canonical, const std::string& source) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        auto h = trim(header[i]);
        for (auto n : names)
            if (h == n) return i;
    }
    throw SchemaError(source + ": missing column '" + std::string(canonical) + "'");
}

inline std::string format_real(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

}  // namespace detail

/// Parses a ratings CSV stream. `source` names the input in error messages.
inline InteractionLog parse_ratings(std::istream& in, RatingScale scale, const std::string& source = "<ratings>") {
    if (!(scale.min < scale.max)) throw ConfigError("rating scale min must be below max");
    InteractionLog log;
    log.rating_scale = scale;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(source + ": missing header row");
    auto header = detail::split_csv(detail::trim(line));
    const auto user_col = detail::find_column(header, {"userId", "user_id"}, "user_id", source);
    const auto movie_col = detail::find_column(header, {"movieId", "movie_id"}, "movie_id", source);
    const auto rating_col = detail::find_column(header, {"rating"}, "rating", source);
    const auto ts_col = detail::find_column(header, {"timestamp"}, "timestamp", source);
    const auto needed = std::max({user_col, movie_col, rating_col, ts_col}) + 1;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = detail::trim(line);
        if (body.empty()) continue;
        auto fields = detail::split_csv(body);
        if (fields.size() < needed)
            throw RowError(source + ":" + std::to_string(line_no) + ": expected at least " + std::to_string(needed) +
                               " fields, got " + std::to_string(fields.size()),
                           line_no);
        auto rating = detail::parse_double(fields[rating_col]);
        if (!rating)
            throw RowError(source + ":" + std::to_string(line_no) + ": unparseable rating '" + fields[rating_col] + "'",
                           line_no);
        auto ts = detail::parse_int(fields[ts_col]);
        if (!ts)
            throw RowError(source + ":" + std::to_string(line_no) + ": unparseable timestamp '" + fields[ts_col] + "'",
                           line_no);
        if (!scale.contains(*rating))
            throw ValidationError(source + ":" + std::to_string(line_no) + ": rating " + detail::format_real(*rating) +
                                  " outside scale [" + detail::format_real(scale.min) + ", " +
                                  detail::format_real(scale.max) + "]");
        if (*ts < 0)
            throw ValidationError(source + ":" + std::to_string(line_no) + ": negative timestamp");
        auto user = detail::trim(fields[user_col]);
        auto movie = detail::trim(fields[movie_col]);
        if (user.empty() || movie.empty())
            throw RowError(source + ":" + std::to_string(line_no) + ": empty user or movie id", line_no);
        log.rows.push_back(RawInteraction{std::string(kUserPrefix) + std::string(user),
                                          std::string(kMoviePrefix) + std::string(movie), *rating, *ts});
    }
    return log;
}

inline InteractionLog load_ratings(const std::string& path, RatingScale scale) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open ratings file '" + path + "'");
    return parse_ratings(in, scale, path);
}

/// movie token ("movie_<id>") -> human-readable title.
using MovieTitles = std::map<std::string, std::string>;

inline MovieTitles parse_movies(std::istream& in, const std::string& source = "<movies>") {
    MovieTitles titles;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(source + ": missing header row");
    auto header = detail::split_csv(detail::trim(line));
    const auto id_col = detail::find_column(header, {"movieId", "movie_id"}, "movieId", source);
    const auto title_col = detail::find_column(header, {"title"}, "title", source);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = detail::trim(line);
        if (body.empty()) continue;
        auto f = detail::split_csv(body);
        if (f.size() <= std::max(id_col, title_col))
            throw RowError(source + ":" + std::to_string(line_no) + ": too few fields", line_no);
        titles[std::string(kMoviePrefix) + std::string(detail::trim(f[id_col]))] = std::string(detail::trim(f[title_col]));
    }
    return titles;
}

inline MovieTitles load_movies(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open movies file '" + path + "'");
    return parse_movies(in, path);
}

// ---------------------------------------------------------------------------
// Vocabularies and histories

struct Vocabularies {
    IdVocabulary users;
    IdVocabulary movies;
};

inline Vocabularies build_vocabularies(const InteractionLog& log) {
    if (log.rows.empty()) throw Error("cannot build vocabularies from an empty interaction log");
    std::vector<std::string> users, movies;
    users.reserve(log.rows.size());
    movies.reserve(log.rows.size());
    for (const auto& r : log.rows) {
        users.push_back(r.user_id);
        movies.push_back(r.movie_id);
    }
    return {IdVocabulary::from_tokens(std::move(users), false), IdVocabulary::from_tokens(std::move(movies), true)};
}

/// One history per distinct user, ordered by user index. Items sorted by
/// timestamp; equal timestamps keep input row order.
inline std::vector<UserHistory> group_histories(const InteractionLog& log, const IdVocabulary& movies,
                                                const IdVocabulary& users) {
    std::vector<std::vector<std::size_t>> rows_by_user(users.size());
    std::vector<int> movie_idx(log.rows.size());
    for (std::size_t i = 0; i < log.rows.size(); ++i) {
        const auto& r = log.rows[i];
        auto u = users.find(r.user_id);
        if (!u) throw IndexError("unknown user token '" + r.user_id + "'");
        auto m = movies.find(r.movie_id);
        if (!m) throw IndexError("unknown movie token '" + r.movie_id + "'");
        rows_by_user[static_cast<std::size_t>(*u)].push_back(i);
        movie_idx[i] = *m;
    }
    std::vector<UserHistory> out;
    for (std::size_t u = 0; u < rows_by_user.size(); ++u) {
        auto& rows = rows_by_user[u];
        if (rows.empty()) continue;
        std::stable_sort(rows.begin(), rows.end(),
                         [&](std::size_t a, std::size_t b) { return log.rows[a].timestamp < log.rows[b].timestamp; });
        UserHistory h;
        h.user_index = static_cast<int>(u);
        for (auto i : rows) {
            h.movie_indices.push_back(movie_idx[i]);
            h.ratings.push_back(log.rows[i].rating);
            h.timestamps.push_back(log.rows[i].timestamp);
        }
        out.push_back(std::move(h));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Examples

/// Sliding windows over one history. A history shorter than the window but
/// with at least two items yields a single padded window.
inline std::vector<SequenceExample> make_windows(const UserHistory& history, int window_len = 4, int step = 2,
                                                 PadSide pad = PadSide::left) {
    if (window_len < 2) throw ConfigError("window length must be at least 2");
    if (step < 1) throw ConfigError("window step must be at least 1");
    std::vector<SequenceExample> out;
    const auto len = history.movie_indices.size();
    const auto w = static_cast<std::size_t>(window_len);
    if (len < 2) return out;
    if (len < w) {
        SequenceExample ex{history.user_index, std::vector<int>(w, kPadIndex)};
        auto offset = pad == PadSide::left ? w - len : 0;
        std::copy(history.movie_indices.begin(), history.movie_indices.end(),
                  ex.window.begin() + static_cast<std::ptrdiff_t>(offset));
        out.push_back(std::move(ex));
        return out;
    }
    for (std::size_t start = 0; start + w <= len; start += static_cast<std::size_t>(step)) {
        out.push_back(SequenceExample{
            history.user_index,
            std::vector<int>(history.movie_indices.begin() + static_cast<std::ptrdiff_t>(start),
                             history.movie_indices.begin() + static_cast<std::ptrdiff_t>(start + w))});
    }
    return out;
}

inline std::vector<SequenceExample> make_all_windows(std::span<const UserHistory> histories, int window_len = 4,
                                                     int step = 2, PadSide pad = PadSide::left) {
    std::vector<SequenceExample> out;
    for (const auto& h : histories) {
        auto w = make_windows(h, window_len, step, pad);
        out.insert(out.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
    }
    return out;
}

/// Every interaction as a rating example, in history order.
inline std::vector<RatingExample> rating_examples(std::span<const UserHistory> histories) {
    std::vector<RatingExample> out;
    for (const auto& h : histories)
        for (std::size_t i = 0; i < h.size(); ++i) out.push_back({h.user_index, h.movie_indices[i], h.ratings[i]});
    return out;
}

/// Seeded Fisher-Yates permutation of 0..n-1, identical on every platform.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        auto j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

/// Shuffled train/test partition; the train side holds round(fraction * N).
template <class Example>
std::pair<std::vector<Example>, std::vector<Example>> split_examples(std::span<const Example> examples,
                                                                     const SplitConfig& cfg) {
    if (examples.empty()) throw Error("cannot split an empty example list");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
        throw ConfigError("train_fraction must lie strictly between 0 and 1");
    const auto n = examples.size();
    const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(n)));
    auto order = shuffled_indices(n, cfg.seed);
    std::pair<std::vector<Example>, std::vector<Example>> out;
    out.first.reserve(n_train);
    out.second.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i) (i < n_train ? out.first : out.second).push_back(examples[order[i]]);
    return out;
}

template <class Example>
std::pair<std::vector<Example>, std::vector<Example>> split_examples(const std::vector<Example>& examples,
                                                                     const SplitConfig& cfg) {
    return split_examples(std::span<const Example>(examples), cfg);
}

template <class Example>
using Batch = std::vector<Example>;

/// Consecutive chunks of `batch_size`; only the last may be short.
template <class Example>
std::vector<Batch<Example>> batch(std::span<const Example> examples, std::size_t batch_size = 256) {
    if (batch_size < 1) throw ConfigError("batch size must be at least 1");
    std::vector<Batch<Example>> out;
    for (std::size_t i = 0; i < examples.size(); i += batch_size) {
        auto end = std::min(examples.size(), i + batch_size);
        out.emplace_back(examples.begin() + static_cast<std::ptrdiff_t>(i),
                         examples.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

template <class Example>
std::vector<Batch<Example>> batch(const std::vector<Example>& examples, std::size_t batch_size = 256) {
    return batch(std::span<const Example>(examples), batch_size);
}

// ---------------------------------------------------------------------------
// Intermediate dataset file

inline constexpr std::string_view kDatasetHeader = "HYREC-DS v1";

/// Everything downstream commands need: vocabularies, the encoded log in
/// original row order, optional titles.
struct Dataset {
    RatingScale rating_scale;
    IdVocabulary users;
    IdVocabulary movies;
    struct Row {
        int user = 0;
        int movie = 0;
        double rating = 0;
        std::int64_t timestamp = 0;
    };
    std::vector<Row> rows;
    MovieTitles titles;

    static Dataset from_log(const InteractionLog& log, MovieTitles titles = {}) {
        auto vocab = build_vocabularies(log);
        Dataset ds;
        ds.rating_scale = log.rating_scale;
        ds.users = std::move(vocab.users);
        ds.movies = std::move(vocab.movies);
        ds.rows.reserve(log.rows.size());
        for (const auto& r : log.rows)
            ds.rows.push_back({ds.users.encode(r.user_id), ds.movies.encode(r.movie_id), r.rating, r.timestamp});
        for (auto& [tok, title] : titles)
            if (ds.movies.contains(tok)) ds.titles.emplace(tok, std::move(title));
        return ds;
    }

    InteractionLog to_log() const {
        InteractionLog log;
        log.rating_scale = rating_scale;
        log.rows.reserve(rows.size());
        for (const auto& r : rows) log.rows.push_back({users.decode(r.user), movies.decode(r.movie), r.rating, r.timestamp});
        return log;
    }

    std::vector<UserHistory> histories() const { return group_histories(to_log(), movies, users); }

    std::string display_name(int movie) const {
        const auto& tok = movies.decode(movie);
        auto it = titles.find(tok);
        return it == titles.end() ? tok : it->second;
    }
};

inline void write_dataset(std::ostream& out, const Dataset& ds) {
    using detail::format_real;
    out << kDatasetHeader << '\n';
    out << "rating_scale\t" << format_real(ds.rating_scale.min) << '\t' << format_real(ds.rating_scale.max) << '\n';
    out << "users\t" << ds.users.size() << '\n';
    for (const auto& t : ds.users.tokens()) out << t << '\n';
    out << "movies\t" << ds.movies.size() << '\n';
    for (const auto& t : ds.movies.tokens()) out << t << '\n';
    out << "titles\t" << ds.titles.size() << '\n';
    for (const auto& [tok, title] : ds.titles) out << tok << '\t' << title << '\n';
    out << "interactions\t" << ds.rows.size() << '\n';
    for (const auto& r : ds.rows)
        out << r.user << '\t' << r.movie << '\t' << format_real(r.rating) << '\t' << r.timestamp << '\n';
}

inline Dataset read_dataset(std::istream& in, const std::string& source = "<dataset>") {
    std::string line;
    std::size_t line_no = 0;
    auto next = [&]() -> std::string& {
        if (!std::getline(in, line)) throw FormatError(source + ": unexpected end of file");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };
    auto fail = [&](const std::string& msg) { return FormatError(source + ":" + std::to_string(line_no) + ": " + msg); };
    auto section = [&](std::string_view name) -> std::size_t {
        auto& l = next();
        auto tab = l.find('\t');
        if (tab == std::string::npos || std::string_view(l).substr(0, tab) != name)
            throw fail("expected section '" + std::string(name) + "'");
        auto n = detail::parse_int(std::string_view(l).substr(tab + 1));
        if (!n || *n < 0) throw fail("bad count");
        return static_cast<std::size_t>(*n);
    };
    auto split_tabs = [](std::string_view l) {
        std::vector<std::string_view> f;
        std::size_t pos = 0;
        while (true) {
            auto t = l.find('\t', pos);
            f.push_back(l.substr(pos, t == std::string_view::npos ? std::string_view::npos : t - pos));
            if (t == std::string_view::npos) break;
            pos = t + 1;
        }
        return f;
    };

    if (next() != kDatasetHeader) throw fail("not a " + std::string(kDatasetHeader) + " file");
    Dataset ds;
    {
        auto f = split_tabs(next());
        if (f.size() != 3 || f[0] != "rating_scale") throw fail("expected rating_scale");
        auto lo = detail::parse_double(f[1]);
        auto hi = detail::parse_double(f[2]);
        if (!lo || !hi) throw fail("bad rating scale");
        ds.rating_scale = {*lo, *hi};
    }
    std::vector<std::string> toks;
    auto n_users = section("users");
    for (std::size_t i = 0; i < n_users; ++i) toks.push_back(next());
    ds.users = IdVocabulary::from_ordered(std::move(toks), false);
    toks = {};
    auto n_movies = section("movies");
    for (std::size_t i = 0; i < n_movies; ++i) toks.push_back(next());
    ds.movies = IdVocabulary::from_ordered(std::move(toks), true);
    auto n_titles = section("titles");
    for (std::size_t i = 0; i < n_titles; ++i) {
        auto& l = next();
        auto tab = l.find('\t');
        if (tab == std::string::npos) throw fail("bad title row");
        ds.titles.emplace(l.substr(0, tab), l.substr(tab + 1));
    }
    auto n_rows = section("interactions");
    ds.rows.reserve(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        auto f = split_tabs(next());
        if (f.size() != 4) throw fail("bad interaction row");
        auto u = detail::parse_int(f[0]);
        auto m = detail::parse_int(f[1]);
        auto r = detail::parse_double(f[2]);
        auto t = detail::parse_int(f[3]);
        if (!u || !m || !r || !t) throw fail("bad interaction row");
        if (*u < 0 || static_cast<std::size_t>(*u) >= ds.users.size() || *m <= 0 ||
            static_cast<std::size_t>(*m) >= ds.movies.size())
            throw fail("interaction index out of range");
        ds.rows.push_back({static_cast<int>(*u), static_cast<int>(*m), *r, *t});
    }
    return ds;
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open dataset file '" + path + "'");
    return read_dataset(in, path);
}

}  // namespace hyrec::data
