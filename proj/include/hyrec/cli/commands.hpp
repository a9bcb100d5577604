#pragma once

// The hyrec command-line tool: ingest, train-seq, train-rating, eval,
// recommend, sweep. Exit codes: 0 success, 1 runtime failure, 2 usage or
// schema error.

#include <charconv>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyrec/cli/checkpoint.hpp"
#include "hyrec/cli/config.hpp"
#include "hyrec/dataset.hpp"
#include "hyrec/metrics.hpp"
#include "hyrec/pipeline.hpp"
#include "hyrec/ranking.hpp"
#include "hyrec/raterec.hpp"
#include "hyrec/seqrec.hpp"

namespace hyrec::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kDatasetFile = "dataset.hyrec";
inline constexpr const char* kSummaryFile = "summary.txt";

/// Thrown for bad command-line input that passed parsing (unknown user, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::string real(double v) { return data::detail::format_real(v); }

inline std::string fixed(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

inline fs::path dataset_file(const fs::path& p) { return fs::is_directory(p) ? p / kDatasetFile : p; }

inline json dataset_fingerprint(const data::Dataset& ds) {
    std::ostringstream os;
    data::write_dataset(os, ds);
    return {{"users", ds.users.size()},
            {"movies", ds.movies.size()},
            {"rows", ds.rows.size()},
            {"checksum", hex64(fnv1a64(os.str()))}};
}

inline void check_fingerprint(const json& manifest, const data::Dataset& ds, const std::string& which) {
    const auto want = manifest.at("dataset");
    const auto have = dataset_fingerprint(ds);
    if (want != have) {
        std::ostringstream diff;
        diff << which << " checkpoint was trained on a different dataset:\n";
        for (const auto& key : {"users", "movies", "rows", "checksum"})
            if (want.value(key, json()) != have.value(key, json()))
                diff << "  - " << key << ": " << want.value(key, json()).dump() << "\n  + " << key << ": "
                     << have.value(key, json()).dump() << '\n';
        throw FormatError(diff.str());
    }
}

inline std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto v = data::detail::parse_double(tok);
        if (!v) throw UsageError("bad sigma grid value '" + tok + "'");
        out.push_back(*v);
    }
    return out;
}

/// Shared flag targets; only flags the user actually passed override the config.
struct Flags {
    std::string config_path;
    std::optional<int> epochs, window, step, embed, hidden, heads, layers;
    std::optional<std::size_t> batch;
    std::optional<double> dropout, lr, sigma;
    std::optional<std::uint64_t> seed;
    std::vector<int> k;
    bool learnable_positions = false;

    void add_common(CLI::App* app) {
        app->add_option("--config", config_path, "Run config JSON (a checkpoint manifest or its config object)");
        app->add_option("--seed", seed, "Global seed");
    }
    void add_data(CLI::App* app) {
        app->add_option("--batch", batch, "Batch size")->check(CLI::PositiveNumber);
        app->add_option("--window", window, "Window length")->check(CLI::Range(2, 1 << 20));
        app->add_option("--step", step, "Window step")->check(CLI::PositiveNumber);
    }
    void add_training(CLI::App* app) {
        app->add_option("--epochs", epochs, "Training epochs")->check(CLI::NonNegativeNumber);
        app->add_option("--embed", embed, "Embedding width (d_model for the sequential model)")->check(CLI::PositiveNumber);
        app->add_option("--dropout", dropout, "Dropout rate in [0, 1)");
        app->add_option("--lr", lr, "Learning rate");
    }

    RunConfig resolve(bool seq_kind) const {
        RunConfig c;
        if (!config_path.empty()) {
            json j;
            try {
                j = json::parse(read_file(config_path));
            } catch (const json::exception& e) {
                throw UsageError("config '" + config_path + "' is not valid JSON: " + e.what());
            }
            c = (j.contains("config") ? j.at("config") : j).get<RunConfig>();
        }
        if (seed) c.seed = *seed;
        if (batch) c.batch = *batch;
        if (window) c.window = *window;
        if (step) c.step = *step;
        if (seq_kind) {
            if (epochs) c.seq_epochs = *epochs;
            if (embed) c.seq_d_model = *embed;
            if (dropout) c.seq_dropout = *dropout;
            if (lr) c.seq_lr = *lr;
            if (heads) c.seq_heads = *heads;
            if (layers) c.seq_layers = *layers;
            if (learnable_positions) c.seq_learnable_positions = true;
        } else {
            if (epochs) c.rate_epochs = *epochs;
            if (embed) c.rate_embed = *embed;
            if (hidden) c.rate_hidden = *hidden;
            if (layers) c.rate_hidden_layers = *layers;
            if (dropout) c.rate_dropout = *dropout;
            if (lr) c.rate_lr = *lr;
        }
        if (sigma) c.sigma1 = *sigma;
        if (!k.empty()) c.k_values = k;
        c.validate();
        return c;
    }
};

inline seq::SeqModel<float> restore_seq(const fs::path& path, const data::Dataset& ds, RunConfig* cfg_out = nullptr) {
    auto ck = load_checkpoint(path);
    if (ck.manifest.value("model", std::string()) != "seq")
        throw UsageError("checkpoint '" + path.string() + "' is not a sequential model");
    check_fingerprint(ck.manifest, ds, "sequential");
    auto cfg = ck.manifest.at("config").get<RunConfig>();
    seq::SeqModel<float> model(cfg.seq_model(static_cast<int>(ds.movies.size()), static_cast<int>(ds.users.size())),
                               cfg.seed);
    restore_parameters(model.params(), ck);
    if (cfg_out) *cfg_out = cfg;
    return model;
}

inline rate::RatingModel<float> restore_rating(const fs::path& path, const data::Dataset& ds,
                                               RunConfig* cfg_out = nullptr) {
    auto ck = load_checkpoint(path);
    if (ck.manifest.value("model", std::string()) != "rating")
        throw UsageError("checkpoint '" + path.string() + "' is not a rating model");
    check_fingerprint(ck.manifest, ds, "rating");
    auto cfg = ck.manifest.at("config").get<RunConfig>();
    rate::RatingModel<float> model(
        cfg.rating_model(static_cast<int>(ds.movies.size()), static_cast<int>(ds.users.size()), ds.rating_scale),
        cfg.seed);
    restore_parameters(model.params(), ck);
    if (cfg_out) *cfg_out = cfg;
    return model;
}

inline int resolve_user(const data::Dataset& ds, const std::string& raw) {
    std::string tok = raw.rfind(data::kUserPrefix, 0) == 0 ? raw : std::string(data::kUserPrefix) + raw;
    if (auto u = ds.users.find(tok)) return *u;
    std::ostringstream msg;
    msg << "unknown user '" << raw << "'; nearest known IDs:";
    for (const auto& n : ds.users.nearest(tok)) msg << ' ' << n;
    throw UsageError(msg.str());
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline std::string ingest_summary(const data::Dataset& ds) {
    std::map<double, std::size_t> hist;
    std::int64_t tmin = std::numeric_limits<std::int64_t>::max(), tmax = std::numeric_limits<std::int64_t>::min();
    for (const auto& r : ds.rows) {
        ++hist[r.rating];
        tmin = std::min(tmin, r.timestamp);
        tmax = std::max(tmax, r.timestamp);
    }
    std::ostringstream os;
    os << "rows\t" << ds.rows.size() << '\n';
    os << "users\t" << ds.users.size() << '\n';
    os << "movies\t" << ds.movies.size() - 1 << '\n';
    os << "movie_vocab\t" << ds.movies.size() << '\n';
    os << "titles\t" << ds.titles.size() << '\n';
    os << "rating_scale\t" << detail::real(ds.rating_scale.min) << '\t' << detail::real(ds.rating_scale.max) << '\n';
    if (!ds.rows.empty()) os << "timestamps\t" << tmin << '\t' << tmax << '\n';
    os << "rating_histogram\n";
    for (const auto& [r, n] : hist) os << detail::real(r) << '\t' << n << '\n';
    return os.str();
}

inline int cmd_ingest(const std::string& ratings, const std::string& movies, const fs::path& out_dir,
                      data::RatingScale scale, std::ostream& out) {
    auto log = data::load_ratings(ratings, scale);
    if (log.rows.empty()) throw ValidationError(ratings + ": no interactions");
    data::MovieTitles titles;
    if (!movies.empty()) titles = data::load_movies(movies);
    auto ds = data::Dataset::from_log(log, std::move(titles));
    fs::create_directories(out_dir);
    std::ostringstream body;
    data::write_dataset(body, ds);
    atomic_write(out_dir / kDatasetFile, body.str());
    const auto summary = ingest_summary(ds);
    atomic_write(out_dir / kSummaryFile, summary);
    out << summary;
    return kExitOk;
}

inline std::string epoch_log_csv(const std::vector<seq::EpochStats>& log) {
    std::ostringstream os;
    os << "epoch,loss,ppl\n";
    for (const auto& e : log) os << e.epoch << ',' << detail::real(e.loss) << ',' << detail::real(e.perplexity) << '\n';
    return os.str();
}

inline std::string epoch_log_csv(const std::vector<rate::EpochStats>& log) {
    std::ostringstream os;
    os << "epoch,mse,rmse\n";
    for (const auto& e : log) os << e.epoch << ',' << detail::real(e.mse) << ',' << detail::real(std::sqrt(e.mse)) << '\n';
    return os.str();
}

inline fs::path epoch_log_path(const fs::path& ckpt) {
    auto p = ckpt;
    p += ".epochs.csv";
    return p;
}

inline int cmd_train_seq(const fs::path& dataset, const RunConfig& cfg, const fs::path& out_path, std::ostream& out) {
    const auto ds = data::load_dataset(detail::dataset_file(dataset).string());
    const auto splits = pipeline::make_splits(ds.histories(), cfg.split_params());
    if (splits.seq_train.empty()) throw Error("no sequence windows in the training split");
    seq::SeqModel<float> model(cfg.seq_model(static_cast<int>(ds.movies.size()), static_cast<int>(ds.users.size())),
                               cfg.seed);
    seq::TrainConfig tc{cfg.seq_epochs, cfg.batch, cfg.seq_lr, cfg.seed, true};
    out << "epoch,loss,ppl\n";
    auto log = seq::train_seq(model, splits.seq_train, tc, [&](const seq::EpochStats& e) {
        out << e.epoch << ',' << detail::real(e.loss) << ',' << detail::real(e.perplexity) << '\n' << std::flush;
    });
    json manifest;
    manifest["model"] = "seq";
    manifest["seed"] = cfg.seed;
    manifest["epochs"] = cfg.seq_epochs;
    manifest["config"] = cfg;
    manifest["dataset"] = detail::dataset_fingerprint(ds);
    manifest["init"] = "uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); pad row zero and frozen; layer-norm gain 1, bias 0";
    manifest["positional_encoding"] = cfg.seq_learnable_positions ? "learned (sin/cos init)" : "sin/cos fixed";
    manifest["split"] = {{"train_windows", splits.seq_train.size()}, {"test_windows", splits.seq_test.size()}};
    json epochs = json::array();
    for (const auto& e : log) epochs.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"ppl", e.perplexity}});
    manifest["metrics"] = {{"epoch_log", epochs}};
    save_checkpoint(out_path, manifest, model.params());
    atomic_write(epoch_log_path(out_path), epoch_log_csv(log));
    return kExitOk;
}

inline int cmd_train_rating(const fs::path& dataset, const RunConfig& cfg, const fs::path& out_path,
                            std::ostream& out) {
    const auto ds = data::load_dataset(detail::dataset_file(dataset).string());
    const auto splits = pipeline::make_splits(ds.histories(), cfg.split_params());
    rate::RatingModel<float> model(
        cfg.rating_model(static_cast<int>(ds.movies.size()), static_cast<int>(ds.users.size()), ds.rating_scale),
        cfg.seed);
    rate::TrainConfig tc{cfg.rate_epochs, cfg.batch, cfg.seed, true};
    out << "epoch,mse,rmse\n";
    auto log = rate::train_rating(model, splits.rate_train, tc, [&](const rate::EpochStats& e) {
        out << e.epoch << ',' << detail::real(e.mse) << ',' << detail::real(std::sqrt(e.mse)) << '\n' << std::flush;
    });
    json manifest;
    manifest["model"] = "rating";
    manifest["seed"] = cfg.seed;
    manifest["epochs"] = cfg.rate_epochs;
    manifest["config"] = cfg;
    manifest["dataset"] = detail::dataset_fingerprint(ds);
    manifest["init"] = "uniform(-1/sqrt(fan_in), 1/sqrt(fan_in))";
    manifest["split"] = {{"train_ratings", splits.rate_train.size()}, {"test_ratings", splits.rate_test.size()}};
    json epochs = json::array();
    for (const auto& e : log) epochs.push_back({{"epoch", e.epoch}, {"mse", e.mse}});
    manifest["metrics"] = {{"epoch_log", epochs}};
    save_checkpoint(out_path, manifest, model.params());
    atomic_write(epoch_log_path(out_path), epoch_log_csv(log));
    return kExitOk;
}

/// Headline metrics: hit-NDCG@10 for the sequential model and the popularity
/// baseline on identical held-out items; RMSE, precision/recall@k and NDCG
/// for the rating model.
inline std::vector<metrics::MetricReport> evaluate(const data::Dataset& ds, const fs::path& seq_ckpt,
                                                   const fs::path& rating_ckpt, std::vector<int> k_values) {
    std::vector<metrics::MetricReport> reports;
    const auto histories = ds.histories();
    if (!seq_ckpt.empty()) {
        RunConfig cfg;
        auto model = detail::restore_seq(seq_ckpt, ds, &cfg);
        const auto splits = pipeline::make_splits(histories, cfg.split_params());
        if (splits.seq_test.empty()) throw Error("sequential test split is empty; nothing to evaluate");
        const auto popular = pipeline::popularity_ranking(data::rating_examples(histories), cfg.baseline_quantile);
        for (int k : k_values) {
            const auto sk = static_cast<std::size_t>(k);
            auto model_cases = pipeline::sequential_cases(model, splits.seq_test, sk);
            auto base_cases = pipeline::baseline_cases(popular, splits.seq_test, sk);
            reports.push_back({"seq_hit_ndcg", k, metrics::hit_ndcg_at_k(model_cases, sk), splits.seq_test.size()});
            reports.push_back({"baseline_hit_ndcg", k, metrics::hit_ndcg_at_k(base_cases, sk), splits.seq_test.size()});
        }
        const double loss = model.evaluate_loss(splits.seq_test);
        reports.push_back({"seq_test_loss", std::nullopt, loss, splits.seq_test.size()});
        reports.push_back({"seq_test_ppl", std::nullopt, metrics::perplexity(loss), splits.seq_test.size()});
    }
    if (!rating_ckpt.empty()) {
        RunConfig cfg;
        auto model = detail::restore_rating(rating_ckpt, ds, &cfg);
        const auto splits = pipeline::make_splits(histories, cfg.split_params());
        if (splits.rate_test.empty()) throw Error("rating test split is empty; nothing to evaluate");
        std::vector<metrics::EstimateTruth> pairs;
        auto users = pipeline::rating_predictions(model, splits.rate_test, &pairs);
        reports.push_back({"rating_rmse", std::nullopt, metrics::rmse(pairs), users.size()});
        double mean = 0;
        for (const auto& r : splits.rate_train) mean += r.rating;
        mean /= static_cast<double>(splits.rate_train.size());
        std::vector<metrics::EstimateTruth> flat;
        for (const auto& r : splits.rate_test) flat.push_back({mean, r.rating});
        reports.push_back({"global_mean_rmse", std::nullopt, metrics::rmse(flat), users.size()});
        for (int k : k_values) {
            auto pr = metrics::precision_recall_at_k(users, static_cast<std::size_t>(k), 3.0);
            reports.push_back({"rating_precision", k, pr.precision, users.size()});
            reports.push_back({"rating_recall", k, pr.recall, users.size()});
            reports.push_back({"rating_ndcg", k, metrics::ndcg_rated(users, static_cast<std::size_t>(k)), users.size()});
        }
        reports.push_back({"base_relevance_rate", std::nullopt, pipeline::base_relevance_rate(users), users.size()});
    }
    return reports;
}

inline int cmd_eval(const fs::path& dataset, const fs::path& seq_ckpt, const fs::path& rating_ckpt,
                    const std::vector<int>& k_values, const fs::path& csv_out, std::ostream& out) {
    if (seq_ckpt.empty() && rating_ckpt.empty()) throw UsageError("eval needs --seq and/or --rating");
    const auto ds = data::load_dataset(detail::dataset_file(dataset).string());
    const auto reports = evaluate(ds, seq_ckpt, rating_ckpt, k_values);
    metrics::write_table(out, reports);
    out << "\nreference (MovieLens-20M): seq hit-NDCG@10 0.0849, baseline hit-NDCG@10 0.0082, "
           "precision@50 0.8530, recall@50 0.9402, RMSE 1.0518\n";
    if (!csv_out.empty()) {
        std::ostringstream os;
        metrics::write_csv(os, reports);
        atomic_write(csv_out, os.str());
    }
    return kExitOk;
}

struct Recommendations {
    rank::ScoredList rating, sequential, fused;
};

/// Three lists for one user, all excluding every movie the user has rated.
inline Recommendations recommend(const data::Dataset& ds, const seq::SeqModel<float>& seq_model,
                                 const rate::RatingModel<float>& rating_model, int user, std::size_t k, double sigma1,
                                 rank::Normalization norm = rank::Normalization::minmax) {
    const auto histories = ds.histories();
    const data::UserHistory* h = nullptr;
    for (const auto& x : histories)
        if (x.user_index == user) h = &x;
    if (!h || h->movie_indices.empty()) throw UsageError("user has no history");
    const auto& watched = h->movie_indices;
    const auto all = std::numeric_limits<std::size_t>::max() / 2;
    Recommendations r;
    auto full_rating = rating_model.recommend_unseen(user, watched, all);
    auto full_seq = seq_model.recommend_next(user, watched, all);
    r.fused = rank::truncate(rank::fuse(full_rating, full_seq, {sigma1, norm, std::nullopt, std::nullopt}), k);
    r.rating = rank::truncate(std::move(full_rating), k);
    r.sequential = rank::truncate(std::move(full_seq), k);
    return r;
}

inline int cmd_recommend(const fs::path& dataset, const fs::path& seq_ckpt, const fs::path& rating_ckpt,
                         const std::string& user_id, std::size_t k, double sigma1, std::ostream& out) {
    if (!(sigma1 >= 0 && sigma1 <= 1)) throw ConfigError("--sigma must lie in [0, 1]");
    const auto ds = data::load_dataset(detail::dataset_file(dataset).string());
    const int user = detail::resolve_user(ds, user_id);
    RunConfig cfg;
    auto seq_model = detail::restore_seq(seq_ckpt, ds, &cfg);
    auto rating_model = detail::restore_rating(rating_ckpt, ds);
    auto recs = recommend(ds, seq_model, rating_model, user, k, sigma1, cfg.normalization_kind());
    auto section = [&](const std::string& title, const rank::ScoredList& list) {
        out << "== " << title << " ==\n";
        for (std::size_t i = 0; i < list.entries.size(); ++i)
            out << std::setw(3) << i + 1 << ". " << ds.display_name(list.entries[i].movie) << "  ("
                << detail::fixed(list.entries[i].score) << ")\n";
        if (list.exhausted) out << "   (fewer candidates than requested)\n";
    };
    out << "user " << ds.users.decode(user) << ", sigma1 = " << detail::real(sigma1) << '\n';
    section("Personalized recommendation based on rating", recs.rating);
    section("Personalized recommendation based on sequence of watched movies", recs.sequential);
    section("Fused recommendation", recs.fused);
    return kExitOk;
}

inline std::string sweep_csv(const std::vector<pipeline::SweepRow>& rows) {
    std::ostringstream os;
    os << "sigma1,ndcg_at_10,precision_at_50,recall_at_50,overlap_with_p1,overlap_with_p2\n";
    for (const auto& r : rows)
        os << detail::real(r.sigma1) << ',' << detail::real(r.ndcg_at_10) << ',' << detail::real(r.precision_at_50)
           << ',' << detail::real(r.recall_at_50) << ',' << detail::real(r.overlap_with_p1) << ','
           << detail::real(r.overlap_with_p2) << '\n';
    return os.str();
}

inline int cmd_sweep(const fs::path& dataset, const fs::path& seq_ckpt, const fs::path& rating_ckpt,
                     const std::vector<double>& grid, const fs::path& out_csv, std::ostream& out) {
    if (grid.empty()) throw UsageError("sigma grid is empty");
    for (double s : grid)
        if (!(s >= 0 && s <= 1)) throw ConfigError("sigma grid values must lie in [0, 1]");
    const auto ds = data::load_dataset(detail::dataset_file(dataset).string());
    RunConfig cfg;
    auto seq_model = detail::restore_seq(seq_ckpt, ds);
    auto rating_model = detail::restore_rating(rating_ckpt, ds, &cfg);
    const auto histories = ds.histories();
    const auto splits = pipeline::make_splits(histories, cfg.split_params());
    const auto cases =
        pipeline::fusion_cases(rating_model, seq_model, histories, splits.rate_train, splits.rate_test);
    std::vector<pipeline::SweepRow> rows;
    for (double s : grid) rows.push_back(pipeline::sweep_row(cases, s, cfg.normalization_kind()));
    const auto csv = sweep_csv(rows);
    if (!out_csv.empty()) atomic_write(out_csv, csv);
    out << csv;
    return kExitOk;
}

// ---------------------------------------------------------------------------

/// Parses argv and dispatches. Never throws; errors go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"hyrec: hybrid sequential + rating movie recommender"};
    app.require_subcommand(1);
    detail::Flags flags;

    std::string ratings, movies, out_dir;
    double scale_min = 0.5, scale_max = 5.0;
    auto* ingest = app.add_subcommand("ingest", "Parse MovieLens CSVs into a dataset file");
    ingest->add_option("--ratings", ratings, "Ratings CSV")->required();
    ingest->add_option("--movies", movies, "Optional movies CSV with titles");
    ingest->add_option("--out", out_dir, "Output directory")->required();
    ingest->add_option("--scale-min", scale_min, "Lowest valid rating");
    ingest->add_option("--scale-max", scale_max, "Highest valid rating");

    std::string dataset, ckpt_out, seq_ckpt, rating_ckpt, csv_out, user, grid;
    int steps = 0;

    auto* train_seq = app.add_subcommand("train-seq", "Train the sequential next-movie model");
    train_seq->add_option("--dataset", dataset, "Dataset file or ingest directory")->required();
    train_seq->add_option("--out", ckpt_out, "Checkpoint manifest path")->required();
    flags.add_common(train_seq);
    flags.add_data(train_seq);
    flags.add_training(train_seq);
    train_seq->add_option("--heads", flags.heads, "Attention heads")->check(CLI::PositiveNumber);
    train_seq->add_option("--layers", flags.layers, "Encoder layers")->check(CLI::NonNegativeNumber);
    train_seq->add_flag("--learnable-positions", flags.learnable_positions, "Learn the position matrix");

    auto* train_rating = app.add_subcommand("train-rating", "Train the rating model");
    train_rating->add_option("--dataset", dataset, "Dataset file or ingest directory")->required();
    train_rating->add_option("--out", ckpt_out, "Checkpoint manifest path")->required();
    flags.add_common(train_rating);
    flags.add_data(train_rating);
    flags.add_training(train_rating);
    train_rating->add_option("--hidden", flags.hidden, "Hidden width")->check(CLI::PositiveNumber);
    train_rating->add_option("--layers", flags.layers, "Hidden layers")->check(CLI::PositiveNumber);

    auto* eval = app.add_subcommand("eval", "Evaluate checkpoints against the popularity baseline");
    eval->add_option("--dataset", dataset, "Dataset file or ingest directory")->required();
    eval->add_option("--seq", seq_ckpt, "Sequential checkpoint");
    eval->add_option("--rating", rating_ckpt, "Rating checkpoint");
    eval->add_option("--k", flags.k, "Cutoffs")->delimiter(',');
    eval->add_option("--out", csv_out, "Also write the report as CSV");

    std::size_t k_rec = 10;
    auto* recommend_cmd = app.add_subcommand("recommend", "Rating, sequential and fused lists for one user");
    recommend_cmd->add_option("--dataset", dataset, "Dataset file or ingest directory")->required();
    recommend_cmd->add_option("--seq", seq_ckpt, "Sequential checkpoint")->required();
    recommend_cmd->add_option("--rating", rating_ckpt, "Rating checkpoint")->required();
    recommend_cmd->add_option("--user", user, "User id (raw or user_-prefixed)")->required();
    recommend_cmd->add_option("--k", k_rec, "List length")->check(CLI::PositiveNumber);
    recommend_cmd->add_option("--sigma", flags.sigma, "Fusion weight on the rating model, in [0, 1]")->required();

    auto* sweep = app.add_subcommand("sweep", "Evaluate fused rankings over a grid of sigma1");
    sweep->add_option("--dataset", dataset, "Dataset file or ingest directory")->required();
    sweep->add_option("--seq", seq_ckpt, "Sequential checkpoint")->required();
    sweep->add_option("--rating", rating_ckpt, "Rating checkpoint")->required();
    auto* grid_opt = sweep->add_option("--grid", grid, "Comma-separated sigma1 values");
    auto* steps_opt = sweep->add_option("--steps", steps, "Evenly spaced sigma1 values over [0, 1]")->check(CLI::Range(2, 100000));
    grid_opt->excludes(steps_opt);
    sweep->add_option("--out", csv_out, "Sweep CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(ratings, movies, out_dir, {scale_min, scale_max}, out);
        if (train_seq->parsed()) return cmd_train_seq(dataset, flags.resolve(true), ckpt_out, out);
        if (train_rating->parsed()) return cmd_train_rating(dataset, flags.resolve(false), ckpt_out, out);
        if (eval->parsed())
            return cmd_eval(dataset, seq_ckpt, rating_ckpt, flags.k.empty() ? std::vector<int>{10, 50} : flags.k,
                            csv_out, out);
        if (recommend_cmd->parsed()) return cmd_recommend(dataset, seq_ckpt, rating_ckpt, user, k_rec, *flags.sigma, out);
        if (sweep->parsed()) {
            std::vector<double> g;
            if (steps > 0)
                for (int i = 0; i < steps; ++i) g.push_back(static_cast<double>(i) / (steps - 1));
            else
                g = detail::parse_grid(grid);
            return cmd_sweep(dataset, seq_ckpt, rating_ckpt, g, csv_out, out);
        }
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RowError& e) {
        err << "row error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace hyrec::cli
