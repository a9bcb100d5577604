#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hyrec/error.hpp"
#include "hyrec/numerics/tensor.hpp"

namespace hyrec::num {

enum class OptimizerKind { sgd, adam };

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::sgd;
    double learning_rate = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step_count = 0;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;

    static OptimizerState sgd(double lr) { return {OptimizerKind::sgd, lr}; }
    static OptimizerState adam(double lr) { return {OptimizerKind::adam, lr}; }
};

namespace detail {

template <class T>
void check_grads(const ParameterSet<T>& params) {
    for (const auto& p : params)
        if (!p.var.has_grad()) throw Error("parameter '" + p.name + "' has no gradient");
}

inline bool frozen(const std::optional<std::size_t>& row, std::size_t i, std::size_t cols) {
    return row && i / cols == *row;
}

}  // namespace detail

/// p <- p - lr * g
template <class T>
void sgd_step(ParameterSet<T>& params, OptimizerState& state) {
    detail::check_grads(params);
    const T lr = static_cast<T>(state.learning_rate);
    for (auto& p : params) {
        auto& w = p.var.mutable_value();
        const auto& g = p.var.grad();
        const auto cols = w.cols();
        const auto fr = p.var.frozen_row();
        for (std::size_t i = 0; i < w.size(); ++i)
            if (!detail::frozen(fr, i, cols)) w[i] -= lr * g[i];
    }
    ++state.step_count;
}

/// Bias-corrected Adam. Moments are kept in double regardless of T.
template <class T>
void adam_step(ParameterSet<T>& params, OptimizerState& state) {
    detail::check_grads(params);
    if (state.first_moment.empty()) {
        for (const auto& p : params) {
            state.first_moment.emplace_back(p.var.size(), 0.0);
            state.second_moment.emplace_back(p.var.size(), 0.0);
        }
    }
    if (state.first_moment.size() != params.size()) throw Error("optimizer state does not match parameter set");
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    std::size_t k = 0;
    for (auto& p : params) {
        auto& w = p.var.mutable_value();
        const auto& g = p.var.grad();
        auto& m = state.first_moment[k];
        auto& v = state.second_moment[k];
        ++k;
        if (m.size() != w.size()) throw Error("optimizer moment shape mismatch for '" + p.name + "'");
        const auto cols = w.cols();
        const auto fr = p.var.frozen_row();
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (detail::frozen(fr, i, cols)) continue;
            const double gi = static_cast<double>(g[i]);
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * gi;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * gi * gi;
            const double mhat = m[i] / c1, vhat = v[i] / c2;
            w[i] = static_cast<T>(static_cast<double>(w[i]) - state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon));
        }
    }
}

template <class T>
void optimizer_step(ParameterSet<T>& params, OptimizerState& state) {
    if (state.kind == OptimizerKind::sgd)
        sgd_step(params, state);
    else
        adam_step(params, state);
}

}  // namespace hyrec::num
