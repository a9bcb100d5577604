#pragma once

// Rating model: concatenated user and movie embeddings through ReLU hidden
// layers with dropout, regressing the rating under MSE with Adam.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hyrec/dataset.hpp"
#include "hyrec/metrics.hpp"
#include "hyrec/numerics.hpp"
#include "hyrec/ranking.hpp"

namespace hyrec::rate {

using num::Tensor;
using num::Var;

struct RatingModelConfig {
    int embed_dim = 64;
    int hidden_dim = 128;
    int hidden_layers = 1;
    double dropout_rate = 0.1;
    double learning_rate = 1e-3;
    data::RatingScale rating_scale{0.5, 5.0};
    int user_vocab_size = 0;
    int movie_vocab_size = 0;

    void validate() const {
        if (embed_dim < 1 || hidden_dim < 1) throw ConfigError("embedding and hidden dimensions must be positive");
        if (hidden_layers < 1) throw ConfigError("rating model needs at least one hidden layer");
        if (!(dropout_rate >= 0 && dropout_rate < 1)) throw ConfigError("dropout rate must lie in [0, 1)");
        if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
        if (!(rating_scale.min < rating_scale.max)) throw ConfigError("rating scale min must be below max");
        if (user_vocab_size < 1 || movie_vocab_size < 1) throw ConfigError("vocabulary sizes must be positive");
    }
};

struct Prediction {
    double raw = 0;      // used for ranking and RMSE
    double clipped = 0;  // clamped to the rating scale, for display
};

struct EpochStats {
    int epoch = 0;
    double mse = 0;
};

struct TrainConfig {
    int epochs = 10;
    std::size_t batch_size = 256;
    std::uint64_t seed = 42;
    bool shuffle = true;
};

template <class T>
class RatingModel {
public:
    RatingModel(RatingModelConfig cfg, std::uint64_t seed) : cfg_(cfg) {
        cfg_.validate();
        std::mt19937_64 rng(seed);
        const auto e = static_cast<std::size_t>(cfg_.embed_dim);
        const auto h = static_cast<std::size_t>(cfg_.hidden_dim);
        auto uni = [&](num::Shape s, double bound) { return num::uniform_tensor<T>(std::move(s), bound, rng); };
        const double be = 1.0 / std::sqrt(static_cast<double>(e));
        user_embedding_ = params_.add("user_embedding", uni({static_cast<std::size_t>(cfg_.user_vocab_size), e}, be));
        movie_embedding_ =
            params_.add("movie_embedding", uni({static_cast<std::size_t>(cfg_.movie_vocab_size), e}, be));
        std::size_t in = 2 * e;
        for (int l = 0; l < cfg_.hidden_layers; ++l) {
            const double b = 1.0 / std::sqrt(static_cast<double>(in));
            const std::string pre = "hidden" + std::to_string(l) + ".";
            hidden_.push_back({params_.add(pre + "weight", uni({in, h}, b)), params_.add(pre + "bias", uni({h}, b))});
            in = h;
        }
        const double bo = 1.0 / std::sqrt(static_cast<double>(in));
        output_w_ = params_.add("output.weight", uni({in, 1}, bo));
        output_b_ = params_.add("output.bias", uni({1}, bo));
    }

    const RatingModelConfig& config() const { return cfg_; }
    num::ParameterSet<T>& params() { return params_; }
    const num::ParameterSet<T>& params() const { return params_; }

    /// Raw predictions [B x 1].
    Var<T> forward(std::span<const int> users, std::span<const int> movies, bool training,
                   num::DropoutStream& stream) const {
        if (users.size() != movies.size() || users.empty())
            throw DimensionError("forward needs equally many (nonzero) users and movies");
        auto x = num::concat_cols(num::embedding_lookup(user_embedding_, users),
                                  num::embedding_lookup(movie_embedding_, movies));
        for (const auto& layer : hidden_)
            x = num::dropout(num::relu(num::add_bias(num::matmul(x, layer.weight), layer.bias)), cfg_.dropout_rate,
                             training, stream);
        return num::add_bias(num::matmul(x, output_w_), output_b_);
    }

    Prediction predict_rating(int user, int movie) const {
        num::DropoutStream stream(0);
        auto out = forward(std::span<const int>(&user, 1), std::span<const int>(&movie, 1), false, stream);
        const double raw = static_cast<double>(out.value()[0]);
        return {raw, std::clamp(raw, cfg_.rating_scale.min, cfg_.rating_scale.max)};
    }

    /// Raw scores of `movies` for one user, evaluated in chunks of `batch_size`.
    std::vector<double> score_movies(int user, std::span<const int> movies, std::size_t batch_size = 1024) const {
        if (batch_size < 1) throw ConfigError("batch size must be at least 1");
        std::vector<double> out;
        out.reserve(movies.size());
        num::DropoutStream stream(0);
        for (std::size_t i = 0; i < movies.size(); i += batch_size) {
            auto part = movies.subspan(i, std::min(batch_size, movies.size() - i));
            std::vector<int> users(part.size(), user);
            auto y = forward(users, part, false, stream);
            for (auto v : y.value().data()) out.push_back(static_cast<double>(v));
        }
        return out;
    }

    /// Raw predictions for arbitrary (user, movie) pairs.
    std::vector<double> predict_pairs(std::span<const data::RatingExample> pairs, std::size_t batch_size = 1024) const {
        std::vector<double> out;
        out.reserve(pairs.size());
        num::DropoutStream stream(0);
        for (std::size_t i = 0; i < pairs.size(); i += batch_size) {
            auto part = pairs.subspan(i, std::min(batch_size, pairs.size() - i));
            std::vector<int> u, m;
            for (const auto& p : part) {
                u.push_back(p.user_index);
                m.push_back(p.movie_index);
            }
            auto y = forward(u, m, false, stream);
            for (auto v : y.value().data()) out.push_back(static_cast<double>(v));
        }
        return out;
    }

    double evaluate_mse(std::span<const data::RatingExample> examples) const {
        if (examples.empty()) throw Error("evaluate_mse over an empty set");
        auto pred = predict_pairs(examples);
        double s = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - examples[i].rating) * (pred[i] - examples[i].rating);
        return s / static_cast<double>(pred.size());
    }

    /// Top-k movies not in `watched`, by raw predicted rating.
    rank::ScoredList recommend_unseen(int user, std::span<const int> watched, std::size_t k) const {
        if (k < 1) throw ConfigError("k must be at least 1");
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(cfg_.movie_vocab_size), 0);
        for (int m : watched)
            if (m >= 0 && m < cfg_.movie_vocab_size) seen[static_cast<std::size_t>(m)] = 1;
        std::vector<int> unseen;
        for (int m = 1; m < cfg_.movie_vocab_size; ++m)
            if (!seen[static_cast<std::size_t>(m)]) unseen.push_back(m);
        rank::ScoredList out;
        out.source = rank::Source::rating;
        if (unseen.empty()) {
            out.exhausted = true;
            return out;
        }
        auto scores = score_movies(user, unseen);
        std::vector<double> dense(static_cast<std::size_t>(cfg_.movie_vocab_size), 0.0);
        for (std::size_t i = 0; i < unseen.size(); ++i) dense[static_cast<std::size_t>(unseen[i])] = scores[i];
        return rank::top_k(dense, seen, k, rank::Source::rating);
    }

private:
    struct Dense {
        Var<T> weight, bias;
    };

    RatingModelConfig cfg_;
    num::ParameterSet<T> params_;
    Var<T> user_embedding_, movie_embedding_, output_w_, output_b_;
    std::vector<Dense> hidden_;
};

/// Per-batch Adam steps on MSE. Returns the mean training MSE of each epoch.
template <class T>
std::vector<EpochStats> train_rating(RatingModel<T>& model, std::span<const data::RatingExample> train,
                                     const TrainConfig& cfg,
                                     const std::function<void(const EpochStats&)>& on_epoch = {}) {
    if (train.empty()) throw Error("rating training set is empty");
    if (cfg.epochs < 0) throw ConfigError("epochs must be nonnegative");
    if (cfg.batch_size < 1) throw ConfigError("batch size must be at least 1");
    num::DropoutStream stream(num::splitmix64(cfg.seed ^ 0xA7E5ull));
    auto opt = num::OptimizerState::adam(model.config().learning_rate);
    std::vector<EpochStats> log;
    std::vector<data::RatingExample> order(train.begin(), train.end());
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            auto perm = data::shuffled_indices(train.size(), num::splitmix64(cfg.seed + static_cast<std::uint64_t>(epoch)));
            for (std::size_t i = 0; i < perm.size(); ++i) order[i] = train[perm[i]];
        }
        double total = 0;
        for (std::size_t i = 0; i < order.size(); i += cfg.batch_size) {
            const auto n = std::min(cfg.batch_size, order.size() - i);
            std::vector<int> users(n), movies(n);
            Tensor<T> truth({n, 1});
            for (std::size_t j = 0; j < n; ++j) {
                users[j] = order[i + j].user_index;
                movies[j] = order[i + j].movie_index;
                truth[j] = static_cast<T>(order[i + j].rating);
            }
            auto loss = num::mse(model.forward(users, movies, true, stream), num::constant(std::move(truth)));
            model.params().zero_grad();
            num::backward(loss);
            num::adam_step(model.params(), opt);
            total += static_cast<double>(loss.value()[0]) * static_cast<double>(n);
        }
        EpochStats s{epoch, total / static_cast<double>(order.size())};
        log.push_back(s);
        if (on_epoch) on_epoch(s);
    }
    return log;
}

}  // namespace hyrec::rate
