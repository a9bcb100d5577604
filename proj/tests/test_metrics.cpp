#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hyrec/metrics.hpp"
#include "oracles.hpp"

using namespace hyrec;
using metrics::RatedPrediction;
using metrics::UserPredictions;

namespace {

UserPredictions to_user(const std::vector<oracle::Pred>& ps) {
    UserPredictions u;
    for (const auto& p : ps) u.push_back({p.movie, p.est, p.truth});
    return u;
}

/// Small random fixture with deliberate estimate ties and half-step ratings.
std::vector<oracle::Pred> random_user(std::mt19937_64& rng) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<int> movies;
    for (int m = 1; m <= 40; ++m) movies.push_back(m);
    std::shuffle(movies.begin(), movies.end(), rng);
    std::vector<oracle::Pred> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double est = 0.5 * double(1 + rng() % 10);
        const double truth = 0.5 * double(rng() % 11);
        out.push_back({movies[i], est, truth});
    }
    return out;
}

}  // namespace

TEST(Rmse, Examples) {
    std::vector<metrics::EstimateTruth> same{{3, 3}, {4, 4}};
    EXPECT_EQ(metrics::rmse(same), 0.0);
    std::vector<metrics::EstimateTruth> off{{1, 2}, {5, 4}};
    EXPECT_DOUBLE_EQ(metrics::rmse(off), 1.0);
    std::vector<metrics::EstimateTruth> ex{{3, 5}, {4, 4}};
    EXPECT_DOUBLE_EQ(metrics::rmse(ex), std::sqrt(2.0));
    EXPECT_THROW(metrics::rmse(std::vector<metrics::EstimateTruth>{}), Error);
}

TEST(Perplexity, Examples) {
    EXPECT_EQ(metrics::perplexity(0), 1.0);
    EXPECT_NEAR(metrics::perplexity(std::log(1234.0)), 1234.0, 1e-9);
    EXPECT_NEAR(metrics::perplexity(6.56), 706.27, 0.01);
    EXPECT_THROW(metrics::perplexity(-1), Error);
}

TEST(PrecisionRecall, HandExample) {
    UserPredictions u{{1, 4.5, 4}, {2, 4.0, 2}, {3, 3.5, 5}};
    std::vector<UserPredictions> users{u};
    auto pr = metrics::precision_recall_at_k(users, 2, 3.0);
    EXPECT_DOUBLE_EQ(pr.precision, 0.5);
    EXPECT_DOUBLE_EQ(pr.recall, 0.5);
}

TEST(PrecisionRecall, Conventions) {
    UserPredictions all_good{{1, 4, 4}, {2, 3.5, 5}, {3, 3, 3}};
    std::vector<UserPredictions> a{all_good};
    EXPECT_EQ(metrics::precision_recall_at_k(a, 3).precision, 1.0);
    UserPredictions none_relevant{{1, 4, 1}, {2, 3.5, 2}};
    std::vector<UserPredictions> b{none_relevant};
    EXPECT_EQ(metrics::precision_recall_at_k(b, 2).recall, 0.0);
    UserPredictions none_recommended{{1, 2, 5}};
    std::vector<UserPredictions> c{none_recommended};
    EXPECT_EQ(metrics::precision_recall_at_k(c, 1).precision, 0.0);
    EXPECT_THROW(metrics::precision_recall_at_k(c, 0), ConfigError);
}

TEST(Ndcg, Examples) {
    UserPredictions ordered{{1, 3, 5}, {2, 2, 3}, {3, 1, 1}};
    EXPECT_DOUBLE_EQ(metrics::ndcg_rated_user(ordered, 3), 1.0);
    UserPredictions swapped{{1, 2, 0}, {2, 1, 5}};
    EXPECT_NEAR(metrics::ndcg_rated_user(swapped, 2), 1.0 / std::log2(3.0), 1e-15);
    EXPECT_NEAR(metrics::ndcg_rated_user(swapped, 2), 0.6309, 1e-4);
    UserPredictions zeros{{1, 2, 0}, {2, 1, 0}};
    EXPECT_EQ(metrics::ndcg_rated_user(zeros, 2), 0.0);
    EXPECT_THROW(metrics::ndcg_rated_user({}, 2), Error);
}

TEST(HitNdcg, Examples) {
    std::vector<metrics::HeldOutCase> first{{{4, 5, 6}, 4}, {{1, 2}, 1}};
    EXPECT_EQ(metrics::hit_ndcg_at_k(first), 1.0);
    std::vector<metrics::HeldOutCase> never{{{4, 5, 6}, 9}, {{1, 2}, 3}};
    EXPECT_EQ(metrics::hit_ndcg_at_k(never), 0.0);
    std::vector<metrics::HeldOutCase> second{{{4, 5, 6}, 5}, {{1, 2}, 2}};
    EXPECT_NEAR(metrics::hit_ndcg_at_k(second), 0.6309, 1e-4);
    std::vector<metrics::HeldOutCase> beyond{{{1, 2, 3}, 3}};
    EXPECT_EQ(metrics::hit_ndcg_at_k(beyond, 2), 0.0);
    EXPECT_THROW(metrics::hit_ndcg_at_k(std::vector<metrics::HeldOutCase>{}), Error);
}

TEST(MetricOracles, ThousandRandomFixtures) {
    std::mt19937_64 rng(2024);
    for (int f = 0; f < 1000; ++f) {
        const std::size_t n_users = 1 + rng() % 6;
        std::vector<std::vector<oracle::Pred>> raw;
        std::vector<UserPredictions> users;
        for (std::size_t u = 0; u < n_users; ++u) {
            raw.push_back(random_user(rng));
            users.push_back(to_user(raw.back()));
        }
        const std::size_t k = 1 + rng() % 10;
        const double thr = 0.5 * double(rng() % 11);

        double p = 0, r = 0, nd = 0;
        for (std::size_t u = 0; u < n_users; ++u) {
            auto o = oracle::precision_recall(raw[u], k, thr, thr);
            auto got = metrics::precision_recall_user(users[u], k, thr, thr);
            // Count-based terms: compare the exact ratios the oracle counted.
            ASSERT_EQ(got.precision, o.precision) << f;
            ASSERT_EQ(got.recall, o.recall) << f;
            p += o.precision;
            r += o.recall;
            const double nd_u = oracle::ndcg(raw[u], k);
            ASSERT_NEAR(metrics::ndcg_rated_user(users[u], k), nd_u, 1e-9) << f;
            nd += nd_u;
        }
        auto pr = metrics::precision_recall_at_k(users, k, thr);
        ASSERT_NEAR(pr.precision, p / double(n_users), 1e-9);
        ASSERT_NEAR(pr.recall, r / double(n_users), 1e-9);
        ASSERT_NEAR(metrics::ndcg_rated(users, k), nd / double(n_users), 1e-9);

        // Means over users ignore user order.
        auto reversed = users;
        std::reverse(reversed.begin(), reversed.end());
        ASSERT_NEAR(metrics::ndcg_rated(reversed, k), metrics::ndcg_rated(users, k), 1e-12);

        std::vector<metrics::HeldOutCase> cases;
        std::vector<std::pair<std::vector<int>, int>> ocases;
        std::vector<metrics::EstimateTruth> pairs;
        std::vector<std::pair<double, double>> opairs;
        for (const auto& u : raw) {
            std::vector<int> ranked;
            for (const auto& x : u) ranked.push_back(x.movie);
            const int held = rng() % 3 == 0 ? 99 : ranked[rng() % ranked.size()];
            cases.push_back({ranked, held});
            ocases.emplace_back(ranked, held);
            for (const auto& x : u) {
                pairs.push_back({x.est, x.truth});
                opairs.emplace_back(x.est, x.truth);
            }
        }
        ASSERT_NEAR(metrics::hit_ndcg_at_k(cases, k), oracle::hit_ndcg(ocases, k), 1e-9);
        ASSERT_NEAR(metrics::rmse(pairs), oracle::rmse(opairs), 1e-9);
        const double loss = 0.01 * double(rng() % 1000);
        ASSERT_NEAR(metrics::perplexity(loss), std::exp(loss), 1e-9 * std::exp(loss));
    }
}

TEST(MetricProperties, BoundsAndIdealOrder) {
    std::mt19937_64 rng(7);
    for (int f = 0; f < 300; ++f) {
        auto raw = random_user(rng);
        auto u = to_user(raw);
        const std::size_t k = 1 + rng() % 12;
        auto ideal = u;
        for (auto& p : ideal) p.estimated = p.true_rating;
        const double nd = metrics::ndcg_rated_user(u, k);
        EXPECT_GE(nd, 0.0);
        EXPECT_LE(nd, 1.0 + 1e-12);
        EXPECT_LE(nd, metrics::ndcg_rated_user(ideal, k) + 1e-12);
        auto pr = metrics::precision_recall_user(u, k, 3.0, 3.0);
        EXPECT_GE(pr.precision, 0.0);
        EXPECT_LE(pr.precision, 1.0);
        EXPECT_GE(pr.recall, 0.0);
        EXPECT_LE(pr.recall, 1.0);
    }
}

TEST(MetricOutput, TableAndCsv) {
    std::vector<metrics::MetricReport> reports{{"rmse", std::nullopt, 0.9, 10}, {"precision", 50, 0.85, 10}};
    std::ostringstream t, c;
    metrics::write_table(t, reports);
    metrics::write_csv(c, reports);
    EXPECT_NE(t.str().find("precision@50"), std::string::npos);
    EXPECT_NE(t.str().find("0.850000"), std::string::npos);
    EXPECT_EQ(c.str().substr(0, 15), "metric,k,value,");
    EXPECT_NE(c.str().find("precision,50,0.84999999999999998,10"), std::string::npos);
}
