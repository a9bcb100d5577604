#pragma once

// Next-movie model: movie embeddings with injected sin/cos positions, a stack
// of causal multi-head self-attention encoder layers, the user embedding
// concatenated onto every position, and a projection to movie logits.

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

namespace hyrec::seq {

using num::Tensor;
using num::Var;

struct SeqModelConfig {
    int d_model = 64;
    int n_heads = 2;
    int n_layers = 2;
    int window_len = 4;
    /// Hidden width of the position-wise feed-forward block; 0 means 4 * d_model.
    int ff_dim = 0;
    double dropout_rate = 0.1;
    bool learnable_positions = false;
    int movie_vocab_size = 0;
    int user_vocab_size = 0;

    int ff_width() const { return ff_dim > 0 ? ff_dim : 4 * d_model; }
    int d_head() const { return d_model / n_heads; }

    void validate() const {
        if (d_model < 2 || d_model % 2 != 0) throw ConfigError("d_model must be even and at least 2");
        if (n_heads < 1 || d_model % n_heads != 0)
            throw ConfigError("d_model " + std::to_string(d_model) + " not divisible by n_heads " +
                              std::to_string(n_heads));
        if (n_layers < 0) throw ConfigError("n_layers must be nonnegative");
        if (window_len < 2) throw ConfigError("window_len must be at least 2");
        if (!(dropout_rate >= 0 && dropout_rate < 1)) throw ConfigError("dropout rate must lie in [0, 1)");
        if (movie_vocab_size < 2) throw ConfigError("movie vocabulary needs the pad entry and at least one movie");
        if (user_vocab_size < 1) throw ConfigError("user vocabulary must be nonempty");
        if (ff_dim < 0) throw ConfigError("ff_dim must be nonnegative");
    }
};

/// PE[pos, 2i] = sin(pos / 10000^(2i/d)), PE[pos, 2i+1] = cos(same).
template <class T>
Tensor<T> positional_encoding(std::size_t n, std::size_t d) {
    if (d == 0 || d % 2 != 0) throw ConfigError("positional encoding needs an even model dimension");
    if (n == 0) throw ConfigError("positional encoding needs a positive length");
    Tensor<T> pe({n, d});
    for (std::size_t pos = 0; pos < n; ++pos) {
        for (std::size_t i = 0; i < d / 2; ++i) {
            const double angle =
                static_cast<double>(pos) / std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(d));
            pe.at(pos, 2 * i) = static_cast<T>(std::sin(angle));
            pe.at(pos, 2 * i + 1) = static_cast<T>(std::cos(angle));
        }
    }
    return pe;
}

/// Adds the position matrix [n x d] to every length-n block of embeddings.
template <class T>
Var<T> inject_positions(const Var<T>& movie_embeds, const Var<T>& positions) {
    return num::add_tiled(movie_embeds, positions);
}

/// softmax(Q K^T / sqrt(d_h) + mask) V for a single sequence.
template <class T>
Var<T> scaled_attention(const Var<T>& q, const Var<T>& k, const Var<T>& v, bool causal,
                        std::vector<std::uint8_t> key_valid = {}) {
    return num::attention(q, k, v, q.shape().at(0), 1, num::AttentionMask{causal, std::move(key_valid)});
}

template <class T>
struct AttentionParams {
    Var<T> wq, wk, wv, wo;  // each [d x d]; head h owns columns [h*d_h, (h+1)*d_h)
};

template <class T>
struct MultiHeadOutput {
    Var<T> output;  // concat . W_O
    Var<T> concat;  // head outputs side by side, before W_O
};

/// Heads over per-head slices of the same projected input, concatenated and
/// projected by W_O. x is [(B*len) x d].
template <class T>
MultiHeadOutput<T> multi_head(const Var<T>& x, const AttentionParams<T>& p, std::size_t heads, std::size_t len,
                              const num::AttentionMask& mask) {
    const auto d = x.value().cols();
    if (heads == 0 || d % heads != 0)
        throw ConfigError("model dimension " + std::to_string(d) + " not divisible by " + std::to_string(heads) +
                          " heads");
    auto q = num::matmul(x, p.wq);
    auto k = num::matmul(x, p.wk);
    auto v = num::matmul(x, p.wv);
    auto concat = num::attention(q, k, v, len, heads, mask);
    return {num::matmul(concat, p.wo), concat};
}

struct EpochStats {
    int epoch = 0;
    double loss = 0;
    double perplexity = 0;
};

struct TrainConfig {
    int epochs = 5;
    std::size_t batch_size = 256;
    double learning_rate = 1.0;
    std::uint64_t seed = 42;
    bool shuffle = true;
};

template <class T>
class SeqModel {
public:
    SeqModel(SeqModelConfig cfg, std::uint64_t seed) : cfg_(cfg) {
        cfg_.validate();
        std::mt19937_64 rng(seed);
        const auto d = static_cast<std::size_t>(cfg_.d_model);
        const auto V = static_cast<std::size_t>(cfg_.movie_vocab_size);
        const auto U = static_cast<std::size_t>(cfg_.user_vocab_size);
        const auto ff = static_cast<std::size_t>(cfg_.ff_width());
        const double bd = 1.0 / std::sqrt(static_cast<double>(d));
        auto uni = [&](num::Shape s, double bound) { return num::uniform_tensor<T>(std::move(s), bound, rng); };

        auto movie = uni({V, d}, bd);
        std::fill_n(movie.data().begin(), d, T(0));
        movie_embedding_ = params_.add("movie_embedding", std::move(movie));
        movie_embedding_.freeze_row(data::kPadIndex);
        user_embedding_ = params_.add("user_embedding", uni({U, d}, bd));
        const auto pe = positional_encoding<T>(static_cast<std::size_t>(input_len()), d);
        positions_ = cfg_.learnable_positions ? params_.add("position_embedding", pe) : num::constant(pe);

        for (int l = 0; l < cfg_.n_layers; ++l) {
            const std::string pre = "layer" + std::to_string(l) + ".";
            Layer layer;
            layer.attn.wq = params_.add(pre + "attn.wq", uni({d, d}, bd));
            layer.attn.wk = params_.add(pre + "attn.wk", uni({d, d}, bd));
            layer.attn.wv = params_.add(pre + "attn.wv", uni({d, d}, bd));
            layer.attn.wo = params_.add(pre + "attn.wo", uni({d, d}, bd));
            layer.ln1_gain = params_.add(pre + "ln1.gain", Tensor<T>({d}, T(1)));
            layer.ln1_bias = params_.add(pre + "ln1.bias", Tensor<T>({d}, T(0)));
            layer.ff1_w = params_.add(pre + "ff1.weight", uni({d, ff}, bd));
            layer.ff1_b = params_.add(pre + "ff1.bias", uni({ff}, bd));
            const double bf = 1.0 / std::sqrt(static_cast<double>(ff));
            layer.ff2_w = params_.add(pre + "ff2.weight", uni({ff, d}, bf));
            layer.ff2_b = params_.add(pre + "ff2.bias", uni({d}, bf));
            layer.ln2_gain = params_.add(pre + "ln2.gain", Tensor<T>({d}, T(1)));
            layer.ln2_bias = params_.add(pre + "ln2.bias", Tensor<T>({d}, T(0)));
            layers_.push_back(std::move(layer));
        }
        const double bo = 1.0 / std::sqrt(static_cast<double>(2 * d));
        output_w_ = params_.add("output.weight", uni({2 * d, V}, bo));
        output_b_ = params_.add("output.bias", uni({V}, bo));
    }

    const SeqModelConfig& config() const { return cfg_; }
    num::ParameterSet<T>& params() { return params_; }
    const num::ParameterSet<T>& params() const { return params_; }
    /// Positions fed to the encoder: the window minus its last element.
    int input_len() const { return cfg_.window_len - 1; }

    /// Logits [(B*L) x V] for B input sequences of length L = window_len - 1,
    /// given row-major in `inputs` (B*L movie indices) with one user per sequence.
    Var<T> forward_inputs(std::span<const int> users, std::span<const int> inputs, bool training,
                          num::DropoutStream& stream) const {
        const auto L = static_cast<std::size_t>(input_len());
        const std::size_t B = users.size();
        if (B == 0 || inputs.size() != B * L)
            throw DimensionError("forward expects " + std::to_string(L) + " inputs per sequence");
        for (int u : users)
            if (u < 0 || u >= cfg_.user_vocab_size) throw IndexError("user index " + std::to_string(u) + " out of range");
        for (int m : inputs)
            if (m < 0 || m >= cfg_.movie_vocab_size) throw IndexError("movie index " + std::to_string(m) + " out of range");

        num::AttentionMask mask;
        mask.causal = true;
        mask.key_valid.resize(inputs.size());
        for (std::size_t i = 0; i < inputs.size(); ++i) mask.key_valid[i] = inputs[i] != data::kPadIndex;

        const double rate = cfg_.dropout_rate;
        // Lift item embeddings to the scale of the position signal.
        auto x = num::scale(num::embedding_lookup(movie_embedding_, inputs), T(std::sqrt(double(cfg_.d_model))));
        x = inject_positions(x, positions_);
        x = num::dropout(x, rate, training, stream);
        for (const auto& layer : layers_) {
            auto attn = multi_head(x, layer.attn, static_cast<std::size_t>(cfg_.n_heads), L, mask).output;
            x = num::layer_norm(num::add(x, num::dropout(attn, rate, training, stream)), layer.ln1_gain, layer.ln1_bias);
            auto h = num::relu(num::add_bias(num::matmul(x, layer.ff1_w), layer.ff1_b));
            auto f = num::add_bias(num::matmul(h, layer.ff2_w), layer.ff2_b);
            x = num::layer_norm(num::add(x, num::dropout(f, rate, training, stream)), layer.ln2_gain, layer.ln2_bias);
        }
        std::vector<int> user_rows;
        user_rows.reserve(B * L);
        for (int u : users) user_rows.insert(user_rows.end(), L, u);
        auto state = num::concat_cols(x, num::embedding_lookup(user_embedding_, user_rows));
        return num::add_bias(num::matmul(state, output_w_), output_b_);
    }

    /// Logits [(n-1) x V] for one example; the last window element is not read.
    Var<T> forward(const data::SequenceExample& ex, bool training = false) const {
        num::DropoutStream stream(0);
        return forward(ex, training, stream);
    }

    Var<T> forward(const data::SequenceExample& ex, bool training, num::DropoutStream& stream) const {
        check_window(ex);
        const int user = ex.user_index;
        return forward_inputs(std::span<const int>(&user, 1),
                              std::span<const int>(ex.window.data(), static_cast<std::size_t>(input_len())), training,
                              stream);
    }

    /// Mean cross-entropy of next-item prediction over a batch; targets equal
    /// to the pad index are ignored. Also reports the number of counted targets.
    Var<T> batch_loss(std::span<const data::SequenceExample> batch, bool training, num::DropoutStream& stream,
                      std::size_t* counted = nullptr) const {
        const auto L = static_cast<std::size_t>(input_len());
        std::vector<int> users, inputs, targets;
        users.reserve(batch.size());
        inputs.reserve(batch.size() * L);
        targets.reserve(batch.size() * L);
        for (const auto& ex : batch) {
            check_window(ex);
            users.push_back(ex.user_index);
            inputs.insert(inputs.end(), ex.window.begin(), ex.window.end() - 1);
            targets.insert(targets.end(), ex.window.begin() + 1, ex.window.end());
        }
        if (counted)
            *counted = static_cast<std::size_t>(std::count_if(targets.begin(), targets.end(),
                                                              [](int t) { return t != data::kPadIndex; }));
        auto logits = forward_inputs(users, inputs, training, stream);
        return num::cross_entropy(logits, targets, data::kPadIndex);
    }

    /// Mean next-item cross-entropy over a set of examples without dropout.
    double evaluate_loss(std::span<const data::SequenceExample> examples, std::size_t batch_size = 256) const {
        if (examples.empty()) throw Error("evaluate_loss over an empty set");
        num::DropoutStream stream(0);
        double total = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < examples.size(); i += batch_size) {
            auto part = examples.subspan(i, std::min(batch_size, examples.size() - i));
            std::size_t n = 0;
            auto loss = batch_loss(part, false, stream, &n);
            total += static_cast<double>(loss.value()[0]) * static_cast<double>(n);
            count += n;
        }
        return total / static_cast<double>(count);
    }

    /// Next-movie probabilities after the most recent `window_len - 1` items of
    /// `watched` (left-padded when shorter).
    std::vector<double> next_distribution(int user, std::span<const int> watched) const {
        if (watched.empty()) throw Error("recommend_next needs at least one watched movie");
        const auto L = static_cast<std::size_t>(input_len());
        std::vector<int> inputs(L, data::kPadIndex);
        const auto take = std::min(L, watched.size());
        std::copy(watched.end() - static_cast<std::ptrdiff_t>(take), watched.end(),
                  inputs.begin() + static_cast<std::ptrdiff_t>(L - take));
        num::DropoutStream stream(0);
        auto logits = forward_inputs(std::span<const int>(&user, 1), inputs, false, stream);
        const auto V = static_cast<std::size_t>(cfg_.movie_vocab_size);
        const T* last = &logits.value()[(L - 1) * V];
        std::vector<double> probs(V);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < V; ++j) mx = std::max(mx, static_cast<double>(last[j]));
        double z = 0;
        for (std::size_t j = 0; j < V; ++j) z += probs[j] = std::exp(static_cast<double>(last[j]) - mx);
        for (auto& p : probs) p /= z;
        return probs;
    }

    /// Top-k unwatched movies by next-item probability.
    rank::ScoredList recommend_next(int user, std::span<const int> watched, std::size_t k,
                                    std::span<const int> also_exclude = {}) const {
        if (k < 1) throw ConfigError("k must be at least 1");
        auto probs = next_distribution(user, watched);
        std::vector<std::uint8_t> excluded(probs.size(), 0);
        for (int m : watched)
            if (m >= 0 && static_cast<std::size_t>(m) < excluded.size()) excluded[static_cast<std::size_t>(m)] = 1;
        for (int m : also_exclude)
            if (m >= 0 && static_cast<std::size_t>(m) < excluded.size()) excluded[static_cast<std::size_t>(m)] = 1;
        return rank::top_k(probs, excluded, k, rank::Source::sequential);
    }

private:
    struct Layer {
        AttentionParams<T> attn;
        Var<T> ln1_gain, ln1_bias, ff1_w, ff1_b, ff2_w, ff2_b, ln2_gain, ln2_bias;
    };

    void check_window(const data::SequenceExample& ex) const {
        if (ex.window.size() != static_cast<std::size_t>(cfg_.window_len))
            throw DimensionError("window of length " + std::to_string(ex.window.size()) + ", model expects " +
                                 std::to_string(cfg_.window_len));
    }

    SeqModelConfig cfg_;
    num::ParameterSet<T> params_;
    Var<T> movie_embedding_, user_embedding_, positions_, output_w_, output_b_;
    std::vector<Layer> layers_;
};

/// Shifted-target cross-entropy training with SGD. Returns one entry per
/// epoch: the mean training loss over counted targets and exp(loss).
template <class T>
std::vector<EpochStats> train_seq(SeqModel<T>& model, std::span<const data::SequenceExample> train,
                                  const TrainConfig& cfg,
                                  const std::function<void(const EpochStats&)>& on_epoch = {}) {
    if (train.empty()) throw Error("sequential training set is empty");
    if (cfg.epochs < 0) throw ConfigError("epochs must be nonnegative");
    if (cfg.batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (!(cfg.learning_rate > 0)) throw ConfigError("learning rate must be positive");
    num::DropoutStream stream(num::splitmix64(cfg.seed ^ 0x5E9AEC5ull));
    auto opt = num::OptimizerState::sgd(cfg.learning_rate);
    std::vector<EpochStats> log;
    std::vector<data::SequenceExample> order(train.begin(), train.end());
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            auto perm = data::shuffled_indices(train.size(), num::splitmix64(cfg.seed + static_cast<std::uint64_t>(epoch)));
            for (std::size_t i = 0; i < perm.size(); ++i) order[i] = train[perm[i]];
        }
        double total = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < order.size(); i += cfg.batch_size) {
            auto part = std::span<const data::SequenceExample>(order).subspan(i, std::min(cfg.batch_size, order.size() - i));
            std::size_t n = 0;
            auto loss = model.batch_loss(part, true, stream, &n);
            model.params().zero_grad();
            num::backward(loss);
            num::sgd_step(model.params(), opt);
            total += static_cast<double>(loss.value()[0]) * static_cast<double>(n);
            count += n;
        }
        EpochStats s;
        s.epoch = epoch;
        s.loss = total / static_cast<double>(count);
        s.perplexity = metrics::perplexity(s.loss);
        log.push_back(s);
        if (on_epoch) on_epoch(s);
    }
    return log;
}

}  // namespace hyrec::seq
