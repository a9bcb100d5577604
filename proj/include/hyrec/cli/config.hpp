#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyrec/error.hpp"
#include "hyrec/pipeline.hpp"
#include "hyrec/ranking.hpp"
#include "hyrec/raterec.hpp"
#include "hyrec/seqrec.hpp"

namespace hyrec::cli {

using json = nlohmann::json;

/// Every knob of a run. Serialized as the "config" object of a checkpoint
/// manifest; the same object is accepted by --config.
struct RunConfig {
    std::uint64_t seed = 42;

    // data
    int window = 4;
    int step = 2;
    std::size_t batch = 256;
    double train_fraction = 0.8;

    // sequential model
    int seq_d_model = 64;
    int seq_heads = 2;
    int seq_layers = 2;
    int seq_ff_dim = 0;
    double seq_dropout = 0.1;
    bool seq_learnable_positions = false;
    int seq_epochs = 5;
    double seq_lr = 1.0;

    // rating model
    int rate_embed = 64;
    int rate_hidden = 128;
    int rate_hidden_layers = 1;
    double rate_dropout = 0.1;
    int rate_epochs = 10;
    double rate_lr = 1e-3;

    // ranking
    std::optional<double> sigma1;
    std::string normalization = "minmax";
    double baseline_quantile = 0.95;
    std::size_t baseline_list_size = 10;
    std::vector<int> k_values{10, 50};

    pipeline::SplitParams split_params() const { return {window, step, train_fraction, seed}; }

    seq::SeqModelConfig seq_model(int movies, int users) const {
        seq::SeqModelConfig c;
        c.d_model = seq_d_model;
        c.n_heads = seq_heads;
        c.n_layers = seq_layers;
        c.window_len = window;
        c.ff_dim = seq_ff_dim;
        c.dropout_rate = seq_dropout;
        c.learnable_positions = seq_learnable_positions;
        c.movie_vocab_size = movies;
        c.user_vocab_size = users;
        return c;
    }

    rate::RatingModelConfig rating_model(int movies, int users, data::RatingScale scale) const {
        rate::RatingModelConfig c;
        c.embed_dim = rate_embed;
        c.hidden_dim = rate_hidden;
        c.hidden_layers = rate_hidden_layers;
        c.dropout_rate = rate_dropout;
        c.learning_rate = rate_lr;
        c.rating_scale = scale;
        c.movie_vocab_size = movies;
        c.user_vocab_size = users;
        return c;
    }

    /// Rejects invariant violations before any work starts.
    void validate() const {
        if (window < 2) throw ConfigError("--window must be at least 2");
        if (step < 1) throw ConfigError("--step must be at least 1");
        if (batch < 1) throw ConfigError("--batch must be at least 1");
        if (!(train_fraction > 0 && train_fraction < 1)) throw ConfigError("train fraction must lie in (0, 1)");
        if (seq_epochs < 0 || rate_epochs < 0) throw ConfigError("--epochs must be nonnegative");
        if (!(seq_lr > 0) || !(rate_lr > 0)) throw ConfigError("--lr must be positive");
        if (sigma1 && !(*sigma1 >= 0 && *sigma1 <= 1)) throw ConfigError("--sigma must lie in [0, 1]");
        if (normalization != "minmax" && normalization != "none")
            throw ConfigError("normalization must be 'minmax' or 'none'");
        if (!(baseline_quantile > 0 && baseline_quantile < 1)) throw ConfigError("baseline quantile must lie in (0, 1)");
        for (int k : k_values)
            if (k < 1) throw ConfigError("--k values must be positive");
        seq_model(2, 1).validate();
        rating_model(1, 1, {0.5, 5.0}).validate();
    }

    rank::Normalization normalization_kind() const {
        return normalization == "none" ? rank::Normalization::none : rank::Normalization::minmax;
    }
};

inline void to_json(json& j, const RunConfig& c) {
    j = json{{"seed", c.seed},
             {"data", {{"window", c.window}, {"step", c.step}, {"batch", c.batch}, {"train_fraction", c.train_fraction}}},
             {"seq",
              {{"d_model", c.seq_d_model},
               {"heads", c.seq_heads},
               {"layers", c.seq_layers},
               {"ff_dim", c.seq_ff_dim},
               {"dropout", c.seq_dropout},
               {"learnable_positions", c.seq_learnable_positions},
               {"epochs", c.seq_epochs},
               {"lr", c.seq_lr},
               {"optimizer", "sgd"}}},
             {"rating",
              {{"embed", c.rate_embed},
               {"hidden", c.rate_hidden},
               {"hidden_layers", c.rate_hidden_layers},
               {"dropout", c.rate_dropout},
               {"epochs", c.rate_epochs},
               {"lr", c.rate_lr},
               {"optimizer", "adam"},
               {"adam", {{"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}}}}},
             {"fusion", {{"sigma1", c.sigma1 ? json(*c.sigma1) : json(nullptr)}, {"normalization", c.normalization}}},
             {"baseline", {{"quantile", c.baseline_quantile}, {"list_size", c.baseline_list_size}}},
             {"k", c.k_values}};
}

inline void from_json(const json& j, RunConfig& c) {
    RunConfig d;
    c.seed = j.value("seed", d.seed);
    if (auto it = j.find("data"); it != j.end()) {
        c.window = it->value("window", d.window);
        c.step = it->value("step", d.step);
        c.batch = it->value("batch", d.batch);
        c.train_fraction = it->value("train_fraction", d.train_fraction);
    }
    if (auto it = j.find("seq"); it != j.end()) {
        c.seq_d_model = it->value("d_model", d.seq_d_model);
        c.seq_heads = it->value("heads", d.seq_heads);
        c.seq_layers = it->value("layers", d.seq_layers);
        c.seq_ff_dim = it->value("ff_dim", d.seq_ff_dim);
        c.seq_dropout = it->value("dropout", d.seq_dropout);
        c.seq_learnable_positions = it->value("learnable_positions", d.seq_learnable_positions);
        c.seq_epochs = it->value("epochs", d.seq_epochs);
        c.seq_lr = it->value("lr", d.seq_lr);
    }
    if (auto it = j.find("rating"); it != j.end()) {
        c.rate_embed = it->value("embed", d.rate_embed);
        c.rate_hidden = it->value("hidden", d.rate_hidden);
        c.rate_hidden_layers = it->value("hidden_layers", d.rate_hidden_layers);
        c.rate_dropout = it->value("dropout", d.rate_dropout);
        c.rate_epochs = it->value("epochs", d.rate_epochs);
        c.rate_lr = it->value("lr", d.rate_lr);
    }
    if (auto it = j.find("fusion"); it != j.end()) {
        auto s = it->find("sigma1");
        c.sigma1 = (s == it->end() || s->is_null()) ? std::nullopt : std::optional<double>(s->get<double>());
        c.normalization = it->value("normalization", d.normalization);
    }
    if (auto it = j.find("baseline"); it != j.end()) {
        c.baseline_quantile = it->value("quantile", d.baseline_quantile);
        c.baseline_list_size = it->value("list_size", d.baseline_list_size);
    }
    if (auto it = j.find("k"); it != j.end()) c.k_values = it->get<std::vector<int>>();
}

}  // namespace hyrec::cli
