// Acceptance run: one PASS/FAIL line per criterion. Criteria 4, 5 and 8 need
// the MovieLens-100K CSVs (--data DIR); everything else is synthetic.

#include <chrono>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "hyrec/cli/commands.hpp"
#include "hyrec/hyrec.hpp"
#include "oracles.hpp"

using namespace hyrec;
namespace fs = std::filesystem;
using json = nlohmann::json;
using TD = num::Tensor<double>;
using VD = num::Var<double>;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

VD leaf(TD t) { return VD(std::move(t), true); }

seq::SeqModelConfig tiny_seq(int V, int U, int d, int n) {
    seq::SeqModelConfig c;
    c.movie_vocab_size = V;
    c.user_vocab_size = U;
    c.d_model = d;
    c.n_heads = 2;
    c.n_layers = 2;
    c.window_len = n;
    return c;
}

rate::RatingModelConfig tiny_rating(int U, int V) {
    rate::RatingModelConfig c;
    c.embed_dim = 8;
    c.hidden_dim = 16;
    c.user_vocab_size = U;
    c.movie_vocab_size = V;
    c.rating_scale = {1.0, 5.0};
    return c;
}

std::vector<data::SequenceExample> random_windows(std::size_t count, int V, int U, int n, std::mt19937_64& rng) {
    std::vector<data::SequenceExample> out;
    for (std::size_t i = 0; i < count; ++i) {
        data::SequenceExample ex;
        ex.user_index = int(rng() % std::uint64_t(U));
        const int pads = int(rng() % std::uint64_t(n - 1));
        for (int j = 0; j < n; ++j) ex.window.push_back(j < pads ? 0 : 1 + int(rng() % std::uint64_t(V - 1)));
        out.push_back(ex);
    }
    return out;
}

// ---------------------------------------------------------------------------

Outcome gradients() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(99);
    auto rand = [&](num::Shape s, double lo = -1, double hi = 1) { return oracle::random_tensor(std::move(s), rng, lo, hi); };
    struct Case {
        std::string name;
        std::vector<VD> leaves;
        std::function<VD()> build;
    };
    std::vector<Case> cases;
    {
        auto a = leaf(rand({3, 4})), b = leaf(rand({4, 2}));
        auto t = num::constant(rand({3, 2}));
        cases.push_back({"matmul", {a, b}, [=] { return num::mse(num::matmul(a, b), t); }});
    }
    {
        auto a = leaf(rand({3, 4}));
        auto t = num::constant(rand({4, 3}));
        cases.push_back({"transpose", {a}, [=] { return num::mse(num::transpose(a), t); }});
    }
    {
        auto a = leaf(rand({3, 4})), b = leaf(rand({3, 4})), bias = leaf(rand({4}));
        auto t = num::constant(rand({3, 4}));
        cases.push_back({"add/add_bias", {a, b, bias}, [=] { return num::mse(num::add_bias(num::add(a, b), bias), t); }});
    }
    {
        auto x = leaf(rand({6, 2})), tile = leaf(rand({3, 2}));
        auto t = num::constant(rand({6, 2}));
        cases.push_back({"add_tiled", {x, tile}, [=] { return num::mse(num::add_tiled(x, tile), t); }});
    }
    {
        auto a = leaf(rand({2, 3}));
        auto t = num::constant(TD::scalar(0.3));
        cases.push_back({"scale/sum", {a}, [=] { return num::mse(num::sum(num::scale(a, -1.7)), t); }});
    }
    {
        auto v = rand({4, 4});
        for (auto& x : v.data()) x += x >= 0 ? 0.1 : -0.1;
        auto a = leaf(v);
        auto t = num::constant(rand({4, 4}));
        cases.push_back({"relu", {a}, [=] { return num::mse(num::relu(a), t); }});
    }
    {
        auto a = leaf(rand({5, 4}));
        auto t = num::constant(rand({5, 4}));
        cases.push_back({"dropout", {a}, [=] {
                             num::DropoutStream s(77);
                             return num::mse(num::dropout(a, 0.3, true, s), t);
                         }});
    }
    {
        auto x = leaf(rand({3, 6})), g = leaf(rand({6}, 0.5, 1.5)), b = leaf(rand({6}));
        auto t = num::constant(rand({3, 6}));
        cases.push_back({"layer_norm", {x, g, b}, [=] { return num::mse(num::layer_norm(x, g, b), t); }});
    }
    {
        auto x = leaf(rand({3, 5}, -2, 2));
        auto t = num::constant(rand({3, 5}, 0, 1));
        cases.push_back({"softmax", {x}, [=] { return num::mse(num::softmax(x), t); }});
    }
    {
        auto table = leaf(rand({5, 3}));
        auto t = num::constant(rand({6, 3}));
        cases.push_back({"embedding_lookup", {table}, [=] {
                             std::vector<int> idx{4, 1, 4, 0, 2, 3};
                             return num::mse(num::embedding_lookup(table, idx), t);
                         }});
    }
    {
        auto a = leaf(rand({3, 2})), b = leaf(rand({3, 4}));
        auto t = num::constant(rand({3, 6}));
        cases.push_back({"concat_cols", {a, b}, [=] { return num::mse(num::concat_cols(a, b), t); }});
    }
    {
        auto q = leaf(rand({8, 6})), k = leaf(rand({8, 6})), v = leaf(rand({8, 6}));
        auto t = num::constant(rand({8, 6}));
        cases.push_back({"attention", {q, k, v}, [=] {
                             num::AttentionMask mask{true, {0, 1, 1, 1, 1, 1, 1, 1}};
                             return num::mse(num::attention(q, k, v, 4, 2, mask), t);
                         }});
    }
    {
        auto logits = leaf(rand({4, 6}, -2, 2));
        cases.push_back({"cross_entropy", {logits}, [=] {
                             std::vector<int> targets{3, 0, 5, 1};
                             return num::cross_entropy(logits, targets, 0);
                         }});
    }
    {
        auto a = leaf(rand({3, 3})), b = leaf(rand({3, 3}));
        cases.push_back({"mse", {a, b}, [=] { return num::mse(a, b); }});
    }

    double worst_primitive = 0;
    std::string worst_name;
    for (auto& c : cases) {
        auto r = oracle::check_gradients(c.leaves, c.build);
        if (r.worst > worst_primitive) {
            worst_primitive = r.worst;
            worst_name = c.name;
        }
    }

    double worst_model = 0;
    for (bool learnable : {false, true}) {
        auto c = tiny_seq(7, 3, 8, 4);
        c.learnable_positions = learnable;
        seq::SeqModel<double> m(c, 11);
        auto batch = random_windows(3, 7, 3, 4, rng);
        std::vector<VD> leaves;
        for (auto& p : m.params()) leaves.push_back(p.var);
        worst_model = std::max(worst_model, oracle::check_gradients(leaves, [&] {
                                                num::DropoutStream s(3);
                                                return m.batch_loss(batch, true, s);
                                            }).worst);
    }
    {
        rate::RatingModel<double> m(tiny_rating(6, 12), 2);
        std::vector<int> users{0, 3, 3}, movies{4, 1, 7};
        auto truth = num::constant(TD({3, 1}, {4.0, 2.0, 5.0}));
        std::vector<VD> leaves;
        for (auto& p : m.params()) leaves.push_back(p.var);
        worst_model = std::max(worst_model, oracle::check_gradients(leaves, [&] {
                                                num::DropoutStream s(5);
                                                return num::mse(m.forward(users, movies, true, s), truth);
                                            }).worst);
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = worst_primitive < 1e-4 && worst_model < 1e-3 && secs < 60;
    o.detail = "worst primitive " + fmt(worst_primitive, 3) + " (" + worst_name + "), worst model " +
               fmt(worst_model, 3) + ", " + fmt(secs, 3) + " s";
    return o;
}

// ---------------------------------------------------------------------------

Outcome metric_oracles() {
    std::mt19937_64 rng(2024);
    auto random_user = [&] {
        const std::size_t n = 1 + rng() % 12;
        std::vector<int> movies;
        for (int m = 1; m <= 40; ++m) movies.push_back(m);
        std::shuffle(movies.begin(), movies.end(), rng);
        std::vector<oracle::Pred> out;
        for (std::size_t i = 0; i < n; ++i)
            out.push_back({movies[i], 0.5 * double(1 + rng() % 10), 0.5 * double(rng() % 11)});
        return out;
    };
    std::size_t count_mismatch = 0;
    double worst_real = 0;
    for (int f = 0; f < 1000; ++f) {
        const std::size_t k = 1 + rng() % 10;
        const double thr = 0.5 * double(rng() % 11);
        std::vector<metrics::HeldOutCase> cases;
        std::vector<std::pair<std::vector<int>, int>> ocases;
        std::vector<metrics::EstimateTruth> pairs;
        std::vector<std::pair<double, double>> opairs;
        const std::size_t n_users = 1 + rng() % 6;
        for (std::size_t u = 0; u < n_users; ++u) {
            auto raw = random_user();
            metrics::UserPredictions preds;
            std::vector<int> ranked;
            for (const auto& p : raw) {
                preds.push_back({p.movie, p.est, p.truth});
                ranked.push_back(p.movie);
                pairs.push_back({p.est, p.truth});
                opairs.emplace_back(p.est, p.truth);
            }
            auto want = oracle::precision_recall(raw, k, thr, thr);
            auto got = metrics::precision_recall_user(preds, k, thr, thr);
            count_mismatch += got.precision != want.precision || got.recall != want.recall;
            worst_real = std::max(worst_real, std::abs(metrics::ndcg_rated_user(preds, k) - oracle::ndcg(raw, k)));
            const int held = rng() % 3 == 0 ? 99 : ranked[rng() % ranked.size()];
            cases.push_back({ranked, held});
            ocases.emplace_back(ranked, held);
        }
        worst_real = std::max(worst_real, std::abs(metrics::hit_ndcg_at_k(cases, k) - oracle::hit_ndcg(ocases, k)));
        worst_real = std::max(worst_real, std::abs(metrics::rmse(pairs) - oracle::rmse(opairs)));
        const double loss = 0.01 * double(rng() % 1000);
        worst_real = std::max(worst_real, std::abs(metrics::perplexity(loss) - std::exp(loss)) / std::exp(loss));
    }
    return {count_mismatch == 0 && worst_real <= 1e-9,
            "1000 fixtures, count mismatches " + std::to_string(count_mismatch) + ", worst real deviation " +
                fmt(worst_real, 3)};
}

// ---------------------------------------------------------------------------

Outcome perplexity_identity() {
    std::mt19937_64 rng(8);
    seq::SeqModel<double> init(tiny_seq(500, 20, 16, 4), 3);
    auto held = random_windows(200, 500, 20, 4, rng);
    const double init_ppl = metrics::perplexity(init.evaluate_loss(held));

    seq::SeqModel<double> m(tiny_seq(7, 3, 8, 4), 4);
    auto train = random_windows(40, 7, 3, 4, rng);
    auto log = seq::train_seq(m, train, {3, 8, 0.1, 1, true});
    double worst = 0;
    for (const auto& e : log) worst = std::max(worst, std::abs(e.perplexity - std::exp(e.loss)) / e.perplexity);
    const bool pass = worst <= 1e-9 && std::abs(init_ppl - 500.0) <= 100.0;
    return {pass, "init PPL " + fmt(init_ppl) + " on V=500, worst |PPL - exp(loss)|/PPL " + fmt(worst, 3) +
                      ", exp(6.56) = " + fmt(std::exp(6.56))};
}

// ---------------------------------------------------------------------------
// Real-data criteria share one trained pair of models.

struct RealRun {
    data::Dataset ds;
    cli::RunConfig cfg;
    pipeline::Splits splits;
    std::optional<seq::SeqModel<float>> seq_model;
    std::optional<rate::RatingModel<float>> rating_model;
    double seq_seconds = 0;
};

std::optional<RealRun> load_real(const fs::path& dir, std::string& why) {
    const auto ratings = dir / "ratings.csv";
    if (!fs::exists(ratings)) {
        why = "no ratings.csv under " + dir.string();
        return std::nullopt;
    }
    RealRun r;
    auto log = data::load_ratings(ratings.string(), {0.5, 5.0});
    data::MovieTitles titles;
    if (fs::exists(dir / "movies.csv")) titles = data::load_movies((dir / "movies.csv").string());
    r.ds = data::Dataset::from_log(log, std::move(titles));
    r.splits = pipeline::make_splits(r.ds.histories(), r.cfg.split_params());
    return r;
}

Outcome beats_popularity(RealRun& r) {
    const auto t0 = Clock::now();
    const auto& cfg = r.cfg;
    r.seq_model.emplace(cfg.seq_model(int(r.ds.movies.size()), int(r.ds.users.size())), cfg.seed);
    seq::train_seq(*r.seq_model, r.splits.seq_train, {cfg.seq_epochs, cfg.batch, cfg.seq_lr, cfg.seed, true});
    const auto popular = pipeline::popularity_ranking(data::rating_examples(r.ds.histories()), cfg.baseline_quantile);
    const double model = metrics::hit_ndcg_at_k(pipeline::sequential_cases(*r.seq_model, r.splits.seq_test, 10), 10);
    const double base = metrics::hit_ndcg_at_k(pipeline::baseline_cases(popular, r.splits.seq_test, 10), 10);
    r.seq_seconds = seconds_since(t0);
    const double ratio = base > 0 ? model / base : 0;
    Outcome o;
    o.pass = model > base && ratio >= 2.0 && r.seq_seconds <= 600;
    o.detail = std::to_string(r.ds.rows.size()) + " ratings, " + std::to_string(r.splits.seq_test.size()) +
               " held-out windows: model " + fmt(model, 4) + " vs baseline " + fmt(base, 4) + " (ratio " +
               fmt(ratio, 3) + "x, target 2x), " + fmt(r.seq_seconds, 3) + " s";
    return o;
}

Outcome rating_usefulness(RealRun& r) {
    const auto& cfg = r.cfg;
    r.rating_model.emplace(cfg.rating_model(int(r.ds.movies.size()), int(r.ds.users.size()), r.ds.rating_scale),
                           cfg.seed);
    rate::train_rating(*r.rating_model, r.splits.rate_train, {cfg.rate_epochs, cfg.batch, cfg.seed, true});
    std::vector<metrics::EstimateTruth> pairs;
    auto users = pipeline::rating_predictions(*r.rating_model, r.splits.rate_test, &pairs);
    const double rmse = metrics::rmse(pairs);

    // Global-mean predictor and base relevance rate, by plain loops.
    double mean = 0;
    for (const auto& x : r.splits.rate_train) mean += x.rating;
    mean /= double(r.splits.rate_train.size());
    double sq = 0;
    for (const auto& x : r.splits.rate_test) sq += (x.rating - mean) * (x.rating - mean);
    const double mean_rmse = std::sqrt(sq / double(r.splits.rate_test.size()));
    std::map<int, std::pair<double, double>> rel;
    for (const auto& x : r.splits.rate_test) {
        rel[x.user_index].first += x.rating >= 3.0;
        rel[x.user_index].second += 1;
    }
    double base_rate = 0;
    for (const auto& [u, c] : rel) base_rate += c.first / c.second;
    base_rate /= double(rel.size());

    auto pr = metrics::precision_recall_at_k(users, 50, 3.0);
    Outcome o;
    o.pass = rmse < mean_rmse && pr.precision >= base_rate;
    o.detail = "RMSE " + fmt(rmse, 4) + " vs global mean " + fmt(mean_rmse, 4) + "; precision@50 " +
               fmt(pr.precision, 4) + " vs base rate " + fmt(base_rate, 4) + "; recall@50 " + fmt(pr.recall, 4) +
               " (reference 1.0518 / 0.8530 / 0.9402)";
    return o;
}

// ---------------------------------------------------------------------------

Outcome fusion_algebra() {
    std::mt19937_64 rng(3);
    auto random_list = [&](std::size_t n, double lo, double hi, rank::Source src) {
        std::vector<int> movies;
        for (int m = 1; m <= 60; ++m) movies.push_back(m);
        std::shuffle(movies.begin(), movies.end(), rng);
        std::uniform_real_distribution<double> u(lo, hi);
        rank::ScoredList l;
        l.source = src;
        for (std::size_t i = 0; i < n; ++i) l.entries.push_back({movies[i], u(rng)});
        rank::sort_entries(l.entries);
        return l;
    };
    // Reference ranking at an endpoint: min-max normalized source scores over
    // the union, absent movies at 0, descending with ties by movie index.
    auto endpoint = [](const rank::ScoredList& src, const rank::ScoredList& other) {
        double lo = src.entries.front().score, hi = lo;
        for (const auto& e : src.entries) lo = std::min(lo, e.score), hi = std::max(hi, e.score);
        std::map<int, double> s;
        for (const auto& e : other.entries) s[e.movie] = 0.0;
        for (const auto& e : src.entries) s[e.movie] = hi > lo ? (e.score - lo) / (hi - lo) : 1.0;
        std::vector<std::pair<int, double>> v(s.begin(), s.end());
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        std::vector<int> order;
        for (const auto& [m, x] : v) order.push_back(m);
        return order;
    };
    std::size_t order_mismatch = 0;
    double worst_affine = 0;
    const double grid[5] = {0, 0.25, 0.5, 0.75, 1};
    for (int t = 0; t < 200; ++t) {
        auto p1 = random_list(2 + rng() % 30, 1, 5, rank::Source::rating);
        auto p2 = random_list(2 + rng() % 30, 0, 0.05, rank::Source::sequential);
        order_mismatch += rank::fuse(p1, p2, {1.0}).movies() != endpoint(p1, p2);
        order_mismatch += rank::fuse(p1, p2, {0.0}).movies() != endpoint(p2, p1);
        std::map<int, std::vector<double>> ys;
        for (double s : grid)
            for (const auto& e : rank::fuse(p1, p2, {s}).entries) ys[e.movie].push_back(e.score);
        for (const auto& [m, y] : ys)
            for (int i = 0; i < 5; ++i)
                worst_affine = std::max(worst_affine, std::abs(y[i] - (y[0] + grid[i] * (y[4] - y[0]))));
    }
    return {order_mismatch == 0 && worst_affine < 1e-9,
            "200 list pairs: endpoint order mismatches " + std::to_string(order_mismatch) +
                ", max affine deviation " + fmt(worst_affine, 3)};
}

Outcome causality() {
    std::mt19937_64 rng(6);
    std::size_t violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        seq::SeqModel<double> m(tiny_seq(9, 3, 8, 5), rng());
        data::SequenceExample ex{int(rng() % 3), {}};
        for (int j = 0; j < 5; ++j) ex.window.push_back(1 + int(rng() % 8));
        const std::size_t j = 1 + rng() % 3;
        auto before = m.forward(ex).value();
        auto changed = ex;
        changed.window[j] = changed.window[j] % 8 + 1;
        auto after = m.forward(changed).value();
        for (std::size_t pos = 0; pos < j; ++pos)
            for (std::size_t v = 0; v < 9; ++v) violations += before.at(pos, v) != after.at(pos, v);
    }
    return {violations == 0, "100 trials, " + std::to_string(violations) + " changed logits before the perturbation"};
}

Outcome filtering(RealRun& r) {
    const auto histories = r.ds.histories();
    std::vector<const data::UserHistory*> pool;
    for (const auto& h : histories)
        if (!h.movie_indices.empty()) pool.push_back(&h);
    std::mt19937_64 rng(17);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min<std::size_t>(200, pool.size()));
    const auto popular = pipeline::popularity_ranking(data::rating_examples(histories), r.cfg.baseline_quantile);
    std::size_t leaks = 0, lists = 0;
    for (const auto* h : pool) {
        std::vector<std::uint8_t> seen(r.ds.movies.size(), 0);
        for (int m : h->movie_indices) seen[std::size_t(m)] = 1;
        auto recs = cli::recommend(r.ds, *r.seq_model, *r.rating_model, h->user_index, 50, 0.5);
        auto base = rank::truncate(rank::exclude(popular, h->movie_indices), 50);
        for (const auto* l : {&recs.rating, &recs.sequential, &recs.fused, &base}) {
            ++lists;
            for (int m : l->movies()) leaks += m == data::kPadIndex || seen[std::size_t(m)];
        }
    }
    return {leaks == 0 && pool.size() == 200,
            std::to_string(pool.size()) + " users, " + std::to_string(lists) + " lists, " + std::to_string(leaks) +
                " watched or pad entries"};
}

Outcome determinism_and_persistence() {
    std::mt19937_64 rng(10);
    auto train = random_windows(60, 7, 3, 4, rng);
    seq::SeqModel<float> a(tiny_seq(7, 3, 8, 4), 9), b(tiny_seq(7, 3, 8, 4), 9);
    const auto la = cli::epoch_log_csv(seq::train_seq(a, train, {3, 16, 0.1, 2, true}));
    const auto lb = cli::epoch_log_csv(seq::train_seq(b, train, {3, 16, 0.1, 2, true}));
    const bool logs_equal = la == lb;

    const auto dir = fs::temp_directory_path() / ("hyrec_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    cli::save_checkpoint(dir / "a.json", json{{"model", "seq"}}, a.params());
    seq::SeqModel<float> c(tiny_seq(7, 3, 8, 4), 1);
    cli::restore_parameters(c.params(), cli::load_checkpoint(dir / "a.json"));
    bool bit_exact = true;
    auto pa = a.params().items(), pc = c.params().items();
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const auto& x = pa[i].var.value().data();
        const auto& y = pc[i].var.value().data();
        bit_exact &= x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(float)) == 0;
    }
    fs::remove_all(dir);

    seq::SeqModel<float> one(tiny_seq(50, 4, 16, 4), 5);
    std::vector<data::SequenceExample> single{{2, {7, 19, 3, 41}}};
    num::DropoutStream s(1);
    auto opt = num::OptimizerState::sgd(0.1);
    double loss = 0;
    int steps = 0;
    for (; steps < 200; ++steps) {
        auto l = one.batch_loss(single, true, s);
        loss = l.value()[0];
        if (loss < 0.05) break;
        one.params().zero_grad();
        num::backward(l);
        num::sgd_step(one.params(), opt);
    }

    rate::RatingModelConfig rc;
    rc.user_vocab_size = 4;
    rc.movie_vocab_size = 8;
    rc.dropout_rate = 0;
    rate::RatingModel<float> rm(rc, 4);
    std::vector<data::RatingExample> target{{2, 5, 3.5}};
    rate::train_rating(rm, target, {4000, 1, 1, false});
    const double err = std::abs(rm.predict_rating(2, 5).raw - 3.5);

    Outcome o;
    o.pass = logs_equal && bit_exact && loss < 0.05 && err <= 0.05;
    o.detail = std::string("epoch logs ") + (logs_equal ? "identical" : "differ") + ", checkpoint " +
               (bit_exact ? "bit-exact" : "differs") + ", single-window loss " + fmt(loss, 3) + " after " +
               std::to_string(steps) + " steps, rating error " + fmt(err, 3);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyrec acceptance run"};
    std::string data_dir;
    app.add_option("--data", data_dir, "Directory with MovieLens-100K ratings.csv and movies.csv")->required();
    CLI11_PARSE(app, argc, argv);

    bool all = true;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        all &= o.pass;
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << o.detail
                  << "]" << std::endl;
    };

    report(1, "gradient correctness", gradients);
    report(2, "metric oracle equivalence", metric_oracles);
    report(3, "perplexity identity", perplexity_identity);

    std::string why;
    std::optional<RealRun> real;
    try {
        real = load_real(data_dir, why);
    } catch (const std::exception& e) {
        why = e.what();
    }
    auto needs_data = [&](auto fn) {
        return [&, fn]() -> Outcome { return real ? fn(*real) : Outcome{false, "dataset unavailable: " + why}; };
    };
    report(4, "sequential model beats popularity", needs_data(beats_popularity));
    report(5, "rating model usefulness", needs_data(rating_usefulness));
    report(6, "fusion algebra", fusion_algebra);
    report(7, "causality", causality);
    report(8, "filtering", needs_data([](RealRun& r) -> Outcome {
               if (!r.seq_model || !r.rating_model) return {false, "models from criteria 4 and 5 unavailable"};
               return filtering(r);
           }));
    report(9, "determinism and persistence", determinism_and_persistence);
    return all ? 0 : 1;
}
