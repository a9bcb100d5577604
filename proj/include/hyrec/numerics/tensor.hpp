#pragma once

// Dense row-major tensors and the reverse-mode recording built on them.
//
// A Var is a handle to a graph node holding a value, an optional gradient
// buffer and a closure that pushes the node's gradient into its parents.
// backward() orders the reachable nodes topologically and replays those
// closures once each, in reverse.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hyrec/error.hpp"

namespace hyrec::num {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    os << ']';
    return os.str();
}

template <class T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;
    explicit Tensor(Shape shape, T fill = T(0)) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {
        for (auto d : shape_)
            if (d == 0) throw DimensionError("tensor dimensions must be positive, got " + shape_str(shape_));
    }
    Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != shape_size(shape_))
            throw DimensionError("data length " + std::to_string(data_.size()) + " does not match shape " +
                                 shape_str(shape_));
    }

    static Tensor scalar(T v) { return Tensor({1}, std::vector<T>{v}); }
    static Tensor matrix(std::initializer_list<std::initializer_list<T>> rows) {
        std::vector<T> d;
        std::size_t cols = rows.begin()->size();
        for (auto& r : rows) {
            if (r.size() != cols) throw DimensionError("ragged matrix literal");
            d.insert(d.end(), r.begin(), r.end());
        }
        return Tensor({rows.size(), cols}, std::move(d));
    }

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    std::size_t rank() const { return shape_.size(); }
    /// Length of the last axis.
    std::size_t cols() const { return shape_.empty() ? 1 : shape_.back(); }
    /// Product of all axes but the last.
    std::size_t rows() const { return cols() == 0 ? 0 : size() / cols(); }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    T& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    std::span<T> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }

    template <class U>
    Tensor<U> cast() const {
        return Tensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<T> data_;
};

template <class T>
struct Node {
    Tensor<T> value;
    std::vector<T> grad;  // empty until allocated
    bool requires_grad = false;
    bool is_leaf = true;
    std::optional<std::size_t> frozen_row;  // row excluded from gradient and updates
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    bool has_grad() const { return !grad.empty(); }
    std::vector<T>& ensure_grad() {
        if (grad.empty()) grad.assign(value.size(), T(0));
        return grad;
    }
};

/// Handle to a recorded value. Copies share the node.
template <class T>
class Var {
public:
    Var() = default;
    explicit Var(Tensor<T> value, bool requires_grad = false) : node_(std::make_shared<Node<T>>()) {
        node_->value = std::move(value);
        node_->requires_grad = requires_grad;
    }
    explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

    const Tensor<T>& value() const { return node_->value; }
    Tensor<T>& mutable_value() { return node_->value; }
    const Shape& shape() const { return node_->value.shape(); }
    std::size_t size() const { return node_->value.size(); }
    bool requires_grad() const { return node_->requires_grad; }
    bool has_grad() const { return node_->has_grad(); }
    /// Gradient buffer; empty if no backward pass has reached this node.
    const std::vector<T>& grad() const { return node_->grad; }
    std::vector<T>& mutable_grad() { return node_->ensure_grad(); }
    Tensor<T> grad_tensor() const {
        return node_->has_grad() ? Tensor<T>(shape(), node_->grad) : Tensor<T>(shape());
    }
    void zero_grad() { node_->grad.assign(node_->value.size(), T(0)); }
    void clear_grad() { node_->grad.clear(); }
    void freeze_row(std::size_t r) { node_->frozen_row = r; }
    std::optional<std::size_t> frozen_row() const { return node_->frozen_row; }

    Node<T>& node() const { return *node_; }
    const std::shared_ptr<Node<T>>& ptr() const { return node_; }
    explicit operator bool() const { return static_cast<bool>(node_); }

private:
    std::shared_ptr<Node<T>> node_;
};

/// Creates an op output. Parents and the closure are kept only when some
/// parent needs a gradient.
template <class T>
Var<T> make_result(Tensor<T> value, std::vector<Var<T>> parents, std::function<void(Node<T>&)> backward_fn) {
    auto node = std::make_shared<Node<T>>();
    node->value = std::move(value);
    node->is_leaf = false;
    bool need = std::any_of(parents.begin(), parents.end(), [](const Var<T>& p) { return p.requires_grad(); });
    if (need) {
        node->requires_grad = true;
        for (auto& p : parents) node->parents.push_back(p.ptr());
        node->backward_fn = std::move(backward_fn);
    }
    return Var<T>(std::move(node));
}

/// Nodes reachable from `root` that carry gradients, parents before children.
template <class T>
std::vector<Node<T>*> topological_order(Node<T>& root) {
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> seen;
    std::vector<std::pair<Node<T>*, std::size_t>> stack{{&root, 0}};
    seen.insert(&root);
    while (!stack.empty()) {
        auto& [n, i] = stack.back();
        if (i < n->parents.size()) {
            Node<T>* p = n->parents[i++].get();
            if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }
    return order;
}

/// Accumulates d(loss)/d(leaf) into every reachable leaf that requires grad.
/// Intermediate gradients are recomputed on every call; leaf gradients add up.
template <class T>
void backward(const Var<T>& loss) {
    if (loss.size() != 1) throw DimensionError("backward requires a scalar loss, got shape " + shape_str(loss.shape()));
    auto& root = loss.node();
    if (!root.requires_grad) return;
    auto order = topological_order(root);
    for (auto* n : order)
        if (!n->is_leaf) n->grad.assign(n->value.size(), T(0));
    root.ensure_grad()[0] += T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node<T>* n = *it;
        if (n->backward_fn) n->backward_fn(*n);
    }
    for (auto* n : order)
        if (!n->is_leaf) std::vector<T>().swap(n->grad);
}

/// Named trainable tensor.
template <class T>
struct Parameter {
    std::string name;
    Var<T> var;
};

/// Ordered, uniquely named parameters of one model.
template <class T>
class ParameterSet {
public:
    Var<T> add(std::string name, Tensor<T> init) {
        for (const auto& p : params_)
            if (p.name == name) throw ConfigError("duplicate parameter name '" + name + "'");
        Var<T> v(std::move(init), true);
        params_.push_back({std::move(name), v});
        return v;
    }

    void zero_grad() {
        for (auto& p : params_) p.var.zero_grad();
    }

    const Var<T>& get(const std::string& name) const {
        for (const auto& p : params_)
            if (p.name == name) return p.var;
        throw IndexError("no parameter named '" + name + "'");
    }

    std::vector<Parameter<T>>& items() { return params_; }
    const std::vector<Parameter<T>>& items() const { return params_; }
    std::size_t size() const { return params_.size(); }
    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

    std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const auto& p : params_) n += p.var.size();
        return n;
    }

private:
    std::vector<Parameter<T>> params_;
};

}  // namespace hyrec::num
