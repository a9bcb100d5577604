#pragma once

// Differentiable primitives. Each op computes its value eagerly and, when any
// input needs a gradient, records a closure computing its vector-Jacobian
// product. All matrices are 2-D row-major; "rows" of a higher-rank tensor
// means every axis but the last.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hyrec/numerics/parallel.hpp"
#include "hyrec/numerics/random.hpp"
#include "hyrec/numerics/tensor.hpp"

namespace hyrec::num {

namespace detail {

template <class T>
std::vector<T>* grad_of(Node<T>& self, std::size_t i) {
    auto& p = *self.parents[i];
    return p.requires_grad ? &p.ensure_grad() : nullptr;
}

inline void require_matrix(const Shape& s, const char* op) {
    if (s.size() != 2) throw DimensionError(std::string(op) + " expects a matrix, got " + shape_str(s));
}

}  // namespace detail

template <class T>
Var<T> constant(Tensor<T> t) {
    return Var<T>(std::move(t), false);
}

/// a [m x k] . b [k x p]
template <class T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
    detail::require_matrix(a.shape(), "matmul");
    detail::require_matrix(b.shape(), "matmul");
    const std::size_t m = a.shape()[0], k = a.shape()[1], p = b.shape()[1];
    if (b.shape()[0] != k)
        throw DimensionError("matmul shape mismatch: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
    Tensor<T> out({m, p});
    const T* A = a.value().data().data();
    const T* B = b.value().data().data();
    T* C = out.data().data();
    parallel_for(m, k * p, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            T* c = C + i * p;
            for (std::size_t kk = 0; kk < k; ++kk) {
                const T aik = A[i * k + kk];
                if (aik == T(0)) continue;
                const T* brow = B + kk * p;
                for (std::size_t j = 0; j < p; ++j) c[j] += aik * brow[j];
            }
        }
    });
    return make_result<T>(std::move(out), {a, b}, [m, k, p](Node<T>& self) {
        const T* G = self.grad.data();
        const T* A = self.parents[0]->value.data().data();
        const T* B = self.parents[1]->value.data().data();
        if (auto* ga = detail::grad_of(self, 0)) {
            T* GA = ga->data();
            // dA = G . B^T
            parallel_for(m, k * p, [&](std::size_t r0, std::size_t r1) {
                for (std::size_t i = r0; i < r1; ++i) {
                    const T* g = G + i * p;
                    for (std::size_t kk = 0; kk < k; ++kk) {
                        const T* brow = B + kk * p;
                        T s = 0;
                        for (std::size_t j = 0; j < p; ++j) s += g[j] * brow[j];
                        GA[i * k + kk] += s;
                    }
                }
            });
        }
        if (auto* gb = detail::grad_of(self, 1)) {
            T* GB = gb->data();
            // dB = A^T . G, split over rows of B so each worker owns its output
            parallel_for(k, m * p, [&](std::size_t k0, std::size_t k1) {
                for (std::size_t i = 0; i < m; ++i) {
                    const T* g = G + i * p;
                    for (std::size_t kk = k0; kk < k1; ++kk) {
                        const T aik = A[i * k + kk];
                        if (aik == T(0)) continue;
                        T* gbrow = GB + kk * p;
                        for (std::size_t j = 0; j < p; ++j) gbrow[j] += aik * g[j];
                    }
                }
            });
        }
    });
}

template <class T>
Var<T> transpose(const Var<T>& a) {
    detail::require_matrix(a.shape(), "transpose");
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    Tensor<T> out({n, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.at(j, i) = a.value().at(i, j);
    return make_result<T>(std::move(out), {a}, [m, n](Node<T>& self) {
        auto* ga = detail::grad_of(self, 0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) (*ga)[i * n + j] += self.grad[j * m + i];
    });
}

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
    if (a.shape() != b.shape())
        throw DimensionError("add shape mismatch: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    Tensor<T> out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
    return make_result<T>(std::move(out), {a, b}, [](Node<T>& self) {
        for (std::size_t p = 0; p < 2; ++p)
            if (auto* g = detail::grad_of(self, p))
                for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
    });
}

/// Adds a constant tensor of the same shape (e.g. an attention mask).
template <class T>
Var<T> add_const(const Var<T>& a, const Tensor<T>& c) {
    return add(a, constant(c));
}

/// x [rows x n] + bias [n], broadcast over rows.
template <class T>
Var<T> add_bias(const Var<T>& x, const Var<T>& bias) {
    const std::size_t n = x.value().cols();
    if (bias.size() != n)
        throw DimensionError("bias shape " + shape_str(bias.shape()) + " does not match last axis of " +
                             shape_str(x.shape()));
    Tensor<T> out = x.value();
    const std::size_t rows = out.rows();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < n; ++j) out[r * n + j] += bias.value()[j];
    return make_result<T>(std::move(out), {x, bias}, [rows, n](Node<T>& self) {
        if (auto* gx = detail::grad_of(self, 0))
            for (std::size_t i = 0; i < gx->size(); ++i) (*gx)[i] += self.grad[i];
        if (auto* gb = detail::grad_of(self, 1))
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t j = 0; j < n; ++j) (*gb)[j] += self.grad[r * n + j];
    });
}

/// x [(B*L) x d] + tile [L x d] repeated over the B blocks.
template <class T>
Var<T> add_tiled(const Var<T>& x, const Var<T>& tile) {
    detail::require_matrix(tile.shape(), "add_tiled");
    const std::size_t L = tile.shape()[0], d = tile.shape()[1];
    if (x.value().cols() != d || x.value().rows() % L != 0)
        throw DimensionError("add_tiled shape mismatch: " + shape_str(x.shape()) + " vs tile " + shape_str(tile.shape()));
    Tensor<T> out = x.value();
    const std::size_t blocks = out.rows() / L;
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t i = 0; i < L * d; ++i) out[b * L * d + i] += tile.value()[i];
    return make_result<T>(std::move(out), {x, tile}, [blocks, L, d](Node<T>& self) {
        if (auto* gx = detail::grad_of(self, 0))
            for (std::size_t i = 0; i < gx->size(); ++i) (*gx)[i] += self.grad[i];
        if (auto* gt = detail::grad_of(self, 1))
            for (std::size_t b = 0; b < blocks; ++b)
                for (std::size_t i = 0; i < L * d; ++i) (*gt)[i] += self.grad[b * L * d + i];
    });
}

template <class T>
Var<T> scale(const Var<T>& a, T s) {
    Tensor<T> out = a.value();
    for (auto& v : out.data()) v *= s;
    return make_result<T>(std::move(out), {a}, [s](Node<T>& self) {
        auto* g = detail::grad_of(self, 0);
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += s * self.grad[i];
    });
}

template <class T>
Var<T> sum(const Var<T>& a) {
    T s = 0;
    for (auto v : a.value().data()) s += v;
    return make_result<T>(Tensor<T>::scalar(s), {a}, [](Node<T>& self) {
        auto* g = detail::grad_of(self, 0);
        for (auto& v : *g) v += self.grad[0];
    });
}

template <class T>
Var<T> relu(const Var<T>& a) {
    Tensor<T> out = a.value();
    for (auto& v : out.data()) v = v > T(0) ? v : T(0);
    return make_result<T>(std::move(out), {a}, [](Node<T>& self) {
        auto* g = detail::grad_of(self, 0);
        const auto& x = self.parents[0]->value;
        for (std::size_t i = 0; i < g->size(); ++i)
            if (x[i] > T(0)) (*g)[i] += self.grad[i];
    });
}

/// Inverted dropout. Identity unless `training` is set and rate > 0.
template <class T>
Var<T> dropout(const Var<T>& a, double rate, bool training, DropoutStream& stream) {
    if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
    if (!training || rate == 0.0) return a;
    const std::uint64_t key = stream.next();
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
    std::vector<T> mask(a.size());
    Tensor<T> out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) {
        mask[i] = unit_real(splitmix64(key + i)) < rate ? T(0) : keep_scale;
        out[i] *= mask[i];
    }
    return make_result<T>(std::move(out), {a}, [mask = std::move(mask)](Node<T>& self) {
        auto* g = detail::grad_of(self, 0);
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += mask[i] * self.grad[i];
    });
}

/// Normalizes each row to zero mean and unit variance, then applies gain and bias.
template <class T>
Var<T> layer_norm(const Var<T>& x, const Var<T>& gain, const Var<T>& bias, double eps = 1e-5) {
    if (!(eps > 0)) throw ConfigError("layer_norm eps must be positive");
    const std::size_t n = x.value().cols(), rows = x.value().rows();
    if (gain.size() != n || bias.size() != n)
        throw DimensionError("layer_norm gain/bias must match last axis of " + shape_str(x.shape()));
    Tensor<T> out(x.shape());
    std::vector<T> xhat(x.size());
    std::vector<T> inv_std(rows);
    const auto& X = x.value();
    for (std::size_t r = 0; r < rows; ++r) {
        T mean = 0;
        for (std::size_t j = 0; j < n; ++j) mean += X[r * n + j];
        mean /= static_cast<T>(n);
        T var = 0;
        for (std::size_t j = 0; j < n; ++j) {
            T c = X[r * n + j] - mean;
            var += c * c;
        }
        var /= static_cast<T>(n);
        inv_std[r] = T(1) / std::sqrt(var + static_cast<T>(eps));
        for (std::size_t j = 0; j < n; ++j) {
            xhat[r * n + j] = (X[r * n + j] - mean) * inv_std[r];
            out[r * n + j] = xhat[r * n + j] * gain.value()[j] + bias.value()[j];
        }
    }
    return make_result<T>(std::move(out), {x, gain, bias},
                          [n, rows, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node<T>& self) {
                              const auto& G = self.grad;
                              const auto& gval = self.parents[1]->value;
                              if (auto* gx = detail::grad_of(self, 0)) {
                                  std::vector<T> dxhat(n);
                                  for (std::size_t r = 0; r < rows; ++r) {
                                      T s1 = 0, s2 = 0;
                                      for (std::size_t j = 0; j < n; ++j) {
                                          dxhat[j] = G[r * n + j] * gval[j];
                                          s1 += dxhat[j];
                                          s2 += dxhat[j] * xhat[r * n + j];
                                      }
                                      const T k = inv_std[r] / static_cast<T>(n);
                                      for (std::size_t j = 0; j < n; ++j)
                                          (*gx)[r * n + j] +=
                                              k * (static_cast<T>(n) * dxhat[j] - s1 - xhat[r * n + j] * s2);
                                  }
                              }
                              if (auto* gg = detail::grad_of(self, 1))
                                  for (std::size_t r = 0; r < rows; ++r)
                                      for (std::size_t j = 0; j < n; ++j) (*gg)[j] += G[r * n + j] * xhat[r * n + j];
                              if (auto* gb = detail::grad_of(self, 2))
                                  for (std::size_t r = 0; r < rows; ++r)
                                      for (std::size_t j = 0; j < n; ++j) (*gb)[j] += G[r * n + j];
                          });
}

namespace detail {

template <class T>
void softmax_row(const T* in, T* out, std::size_t n) {
    T mx = in[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, in[j]);
    T z = 0;
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = std::exp(in[j] - mx);
        z += out[j];
    }
    for (std::size_t j = 0; j < n; ++j) out[j] /= z;
}

}  // namespace detail

/// Softmax along the last axis, shifted by the row max.
template <class T>
Var<T> softmax(const Var<T>& x) {
    const std::size_t n = x.value().cols(), rows = x.value().rows();
    Tensor<T> out(x.shape());
    for (std::size_t r = 0; r < rows; ++r) detail::softmax_row(&x.value()[r * n], &out[r * n], n);
    return make_result<T>(std::move(out), {x}, [n, rows](Node<T>& self) {
        auto* g = detail::grad_of(self, 0);
        const auto& s = self.value;
        for (std::size_t r = 0; r < rows; ++r) {
            T dot = 0;
            for (std::size_t j = 0; j < n; ++j) dot += self.grad[r * n + j] * s[r * n + j];
            for (std::size_t j = 0; j < n; ++j) (*g)[r * n + j] += s[r * n + j] * (self.grad[r * n + j] - dot);
        }
    });
}

/// Gathers rows of `table` [V x d]; output is [indices.size() x d].
/// Gradients scatter-add into the touched rows, skipping the table's frozen row.
template <class T>
Var<T> embedding_lookup(const Var<T>& table, std::span<const int> indices) {
    detail::require_matrix(table.shape(), "embedding_lookup");
    const std::size_t V = table.shape()[0], d = table.shape()[1];
    for (int i : indices)
        if (i < 0 || static_cast<std::size_t>(i) >= V)
            throw IndexError("embedding index " + std::to_string(i) + " out of range [0, " + std::to_string(V) + ")");
    if (indices.empty()) throw DimensionError("embedding_lookup needs at least one index");
    Tensor<T> out({indices.size(), d});
    for (std::size_t r = 0; r < indices.size(); ++r)
        std::copy_n(&table.value()[static_cast<std::size_t>(indices[r]) * d], d, &out[r * d]);
    std::vector<int> idx(indices.begin(), indices.end());
    return make_result<T>(std::move(out), {table}, [d, idx = std::move(idx)](Node<T>& self) {
        auto& tnode = *self.parents[0];
        auto& g = tnode.ensure_grad();
        for (std::size_t r = 0; r < idx.size(); ++r) {
            auto row = static_cast<std::size_t>(idx[r]);
            if (tnode.frozen_row && *tnode.frozen_row == row) continue;
            for (std::size_t j = 0; j < d; ++j) g[row * d + j] += self.grad[r * d + j];
        }
    });
}

/// [m x p] | [m x q] -> [m x (p+q)]
template <class T>
Var<T> concat_cols(const Var<T>& a, const Var<T>& b) {
    detail::require_matrix(a.shape(), "concat_cols");
    detail::require_matrix(b.shape(), "concat_cols");
    const std::size_t m = a.shape()[0], p = a.shape()[1], q = b.shape()[1];
    if (b.shape()[0] != m)
        throw DimensionError("concat_cols row mismatch: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    Tensor<T> out({m, p + q});
    for (std::size_t i = 0; i < m; ++i) {
        std::copy_n(&a.value()[i * p], p, &out[i * (p + q)]);
        std::copy_n(&b.value()[i * q], q, &out[i * (p + q) + p]);
    }
    return make_result<T>(std::move(out), {a, b}, [m, p, q](Node<T>& self) {
        if (auto* ga = detail::grad_of(self, 0))
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < p; ++j) (*ga)[i * p + j] += self.grad[i * (p + q) + j];
        if (auto* gb = detail::grad_of(self, 1))
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < q; ++j) (*gb)[i * q + j] += self.grad[i * (p + q) + p + j];
    });
}

/// Masking options for attention.
struct AttentionMask {
    bool causal = false;
    /// One flag per key row (B*L); keys with flag 0 are never attended. Empty = all valid.
    std::vector<std::uint8_t> key_valid;
};

/// Batched multi-head scaled dot-product attention over blocks of `len` rows.
///
/// q, k, v are [(B*len) x D]; head h uses columns [h*D/heads, (h+1)*D/heads).
/// The result is the concatenation of the head outputs, [(B*len) x D]. Masked
/// keys get zero weight; a query with no visible key outputs zeros.
template <class T>
Var<T> attention(const Var<T>& q, const Var<T>& k, const Var<T>& v, std::size_t len, std::size_t heads,
                 const AttentionMask& mask = {}) {
    detail::require_matrix(q.shape(), "attention");
    if (k.shape() != q.shape() || v.shape() != q.shape())
        throw DimensionError("attention expects equal Q/K/V shapes, got " + shape_str(q.shape()) + ", " +
                             shape_str(k.shape()) + ", " + shape_str(v.shape()));
    const std::size_t rows = q.shape()[0], D = q.shape()[1];
    if (heads == 0 || D % heads != 0)
        throw ConfigError("model dimension " + std::to_string(D) + " not divisible by " + std::to_string(heads) +
                          " heads");
    if (len == 0 || rows % len != 0) throw DimensionError("attention rows not a multiple of sequence length");
    if (!mask.key_valid.empty() && mask.key_valid.size() != rows)
        throw DimensionError("attention key mask must have one entry per row");
    const std::size_t B = rows / len, dh = D / heads;
    const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));
    const T* Q = q.value().data().data();
    const T* K = k.value().data().data();
    const T* Vv = v.value().data().data();

    auto visible = [&mask, len](std::size_t b, std::size_t i, std::size_t j) {
        if (mask.causal && j > i) return false;
        return mask.key_valid.empty() || mask.key_valid[b * len + j] != 0;
    };

    // probs[(b*heads + h)*len*len + i*len + j]
    std::vector<T> probs(B * heads * len * len, T(0));
    Tensor<T> out({rows, D});
    std::vector<T> scores(len);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t h = 0; h < heads; ++h) {
            T* P = &probs[(b * heads + h) * len * len];
            for (std::size_t i = 0; i < len; ++i) {
                const T* qi = Q + (b * len + i) * D + h * dh;
                T mx = -std::numeric_limits<T>::infinity();
                bool any = false;
                for (std::size_t j = 0; j < len; ++j) {
                    if (!visible(b, i, j)) continue;
                    const T* kj = K + (b * len + j) * D + h * dh;
                    T s = 0;
                    for (std::size_t c = 0; c < dh; ++c) s += qi[c] * kj[c];
                    scores[j] = s * inv_sqrt;
                    mx = std::max(mx, scores[j]);
                    any = true;
                }
                if (!any) continue;
                T z = 0;
                for (std::size_t j = 0; j < len; ++j) {
                    if (!visible(b, i, j)) continue;
                    P[i * len + j] = std::exp(scores[j] - mx);
                    z += P[i * len + j];
                }
                T* oi = &out[(b * len + i) * D + h * dh];
                for (std::size_t j = 0; j < len; ++j) {
                    T& pij = P[i * len + j];
                    if (pij == T(0)) continue;
                    pij /= z;
                    const T* vj = Vv + (b * len + j) * D + h * dh;
                    for (std::size_t c = 0; c < dh; ++c) oi[c] += pij * vj[c];
                }
            }
        }
    }
    return make_result<T>(
        std::move(out), {q, k, v}, [B, len, heads, D, dh, inv_sqrt, probs = std::move(probs)](Node<T>& self) {
            const T* G = self.grad.data();
            const T* Q = self.parents[0]->value.data().data();
            const T* K = self.parents[1]->value.data().data();
            const T* Vv = self.parents[2]->value.data().data();
            auto* gq = detail::grad_of(self, 0);
            auto* gk = detail::grad_of(self, 1);
            auto* gv = detail::grad_of(self, 2);
            std::vector<T> dP(len);
            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t h = 0; h < heads; ++h) {
                    const T* P = &probs[(b * heads + h) * len * len];
                    for (std::size_t i = 0; i < len; ++i) {
                        const T* gi = G + (b * len + i) * D + h * dh;
                        T dot = 0;
                        for (std::size_t j = 0; j < len; ++j) {
                            const T pij = P[i * len + j];
                            dP[j] = 0;
                            if (pij == T(0)) continue;
                            const T* vj = Vv + (b * len + j) * D + h * dh;
                            for (std::size_t c = 0; c < dh; ++c) dP[j] += gi[c] * vj[c];
                            dot += pij * dP[j];
                            if (gv) {
                                T* gvj = gv->data() + (b * len + j) * D + h * dh;
                                for (std::size_t c = 0; c < dh; ++c) gvj[c] += pij * gi[c];
                            }
                        }
                        for (std::size_t j = 0; j < len; ++j) {
                            const T pij = P[i * len + j];
                            if (pij == T(0)) continue;
                            const T ds = pij * (dP[j] - dot) * inv_sqrt;
                            if (gq) {
                                const T* kj = K + (b * len + j) * D + h * dh;
                                T* gqi = gq->data() + (b * len + i) * D + h * dh;
                                for (std::size_t c = 0; c < dh; ++c) gqi[c] += ds * kj[c];
                            }
                            if (gk) {
                                const T* qi = Q + (b * len + i) * D + h * dh;
                                T* gkj = gk->data() + (b * len + j) * D + h * dh;
                                for (std::size_t c = 0; c < dh; ++c) gkj[c] += ds * qi[c];
                            }
                        }
                    }
                }
            }
        });
}

/// Attention weights the fused kernel would use, [len x len] for one block and head.
/// Exposed for inspection and tests.
template <class T>
Tensor<T> attention_weights(const Tensor<T>& q, const Tensor<T>& k, std::size_t block, std::size_t len,
                            std::size_t head, std::size_t heads, const AttentionMask& mask = {}) {
    const std::size_t D = q.cols(), dh = D / heads;
    const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));
    Tensor<T> w({len, len});
    for (std::size_t i = 0; i < len; ++i) {
        std::vector<T> s(len, -std::numeric_limits<T>::infinity());
        T mx = -std::numeric_limits<T>::infinity();
        for (std::size_t j = 0; j < len; ++j) {
            if (mask.causal && j > i) continue;
            if (!mask.key_valid.empty() && !mask.key_valid[block * len + j]) continue;
            T acc = 0;
            for (std::size_t c = 0; c < dh; ++c) acc += q.at(block * len + i, head * dh + c) * k.at(block * len + j, head * dh + c);
            s[j] = acc * inv_sqrt;
            mx = std::max(mx, s[j]);
        }
        if (mx == -std::numeric_limits<T>::infinity()) continue;
        T z = 0;
        for (std::size_t j = 0; j < len; ++j)
            if (s[j] != -std::numeric_limits<T>::infinity()) z += w.at(i, j) = std::exp(s[j] - mx);
        for (std::size_t j = 0; j < len; ++j) w.at(i, j) /= z;
    }
    return w;
}

/// Mean of -log softmax(logits)[target] over rows whose target is not
/// `ignore_index`. logits [N x V], one target per row.
template <class T>
Var<T> cross_entropy(const Var<T>& logits, std::span<const int> targets, int ignore_index) {
    detail::require_matrix(logits.shape(), "cross_entropy");
    const std::size_t N = logits.shape()[0], V = logits.shape()[1];
    if (targets.size() != N)
        throw DimensionError("cross_entropy: " + std::to_string(targets.size()) + " targets for " + std::to_string(N) +
                             " rows");
    std::size_t count = 0;
    for (int t : targets) {
        if (t == ignore_index) continue;
        if (t < 0 || static_cast<std::size_t>(t) >= V)
            throw IndexError("cross_entropy target " + std::to_string(t) + " out of range [0, " + std::to_string(V) +
                             ")");
        ++count;
    }
    if (count == 0) throw Error("cross_entropy: every position is ignored, mean is undefined");
    std::vector<T> probs(N * V, T(0));
    double total = 0;
    for (std::size_t r = 0; r < N; ++r) {
        if (targets[r] == ignore_index) continue;
        const T* x = &logits.value()[r * V];
        T mx = x[0];
        for (std::size_t j = 1; j < V; ++j) mx = std::max(mx, x[j]);
        T z = 0;
        for (std::size_t j = 0; j < V; ++j) z += probs[r * V + j] = std::exp(x[j] - mx);
        for (std::size_t j = 0; j < V; ++j) probs[r * V + j] /= z;
        total += static_cast<double>(std::log(z) + mx - x[static_cast<std::size_t>(targets[r])]);
    }
    std::vector<int> tg(targets.begin(), targets.end());
    return make_result<T>(Tensor<T>::scalar(static_cast<T>(total / static_cast<double>(count))), {logits},
                          [N, V, count, ignore_index, tg = std::move(tg), probs = std::move(probs)](Node<T>& self) {
                              auto* g = detail::grad_of(self, 0);
                              const T k = self.grad[0] / static_cast<T>(count);
                              for (std::size_t r = 0; r < N; ++r) {
                                  if (tg[r] == ignore_index) continue;
                                  T* gr = g->data() + r * V;
                                  const T* pr = &probs[r * V];
                                  for (std::size_t j = 0; j < V; ++j) gr[j] += k * pr[j];
                                  gr[static_cast<std::size_t>(tg[r])] -= k;
                              }
                          });
}

/// Mean squared difference.
template <class T>
Var<T> mse(const Var<T>& pred, const Var<T>& truth) {
    if (pred.shape() != truth.shape())
        throw DimensionError("mse shape mismatch: " + shape_str(pred.shape()) + " vs " + shape_str(truth.shape()));
    const std::size_t n = pred.size();
    T s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        T d = pred.value()[i] - truth.value()[i];
        s += d * d;
    }
    return make_result<T>(Tensor<T>::scalar(s / static_cast<T>(n)), {pred, truth}, [n](Node<T>& self) {
        const auto& p = self.parents[0]->value;
        const auto& t = self.parents[1]->value;
        const T k = T(2) * self.grad[0] / static_cast<T>(n);
        if (auto* gp = detail::grad_of(self, 0))
            for (std::size_t i = 0; i < n; ++i) (*gp)[i] += k * (p[i] - t[i]);
        if (auto* gt = detail::grad_of(self, 1))
            for (std::size_t i = 0; i < n; ++i) (*gt)[i] -= k * (p[i] - t[i]);
    });
}

}  // namespace hyrec::num
