// Minimal reverse-mode autodiff over Tensor<T>. Graphs are built eagerly by
// the op functions below; backward() walks the tape in reverse topological
// order. Convolution backward recomputes its im2col buffers instead of
// caching them, so graph memory stays proportional to the activations.
//
// Everything is single-threaded and evaluation order is fixed, which makes
// training runs bit-reproducible for a fixed seed.

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "pigment/errors.hpp"
#include "pigment/tensor.hpp"

namespace pigment::nn {

template <typename T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;  // allocated on demand during backward
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node<T>>> parents;
  std::function<void(Node<T>&)> backprop;  // reads grad, accumulates into parents

  void ensure_grad() {
    if (grad.size() != value.size()) grad = Tensor<T>(value.shape());
  }
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

template <typename T>
Var<T> constant(Tensor<T> value) {
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  return n;
}

template <typename T>
Var<T> parameter(Tensor<T> value) {
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  n->requires_grad = true;
  return n;
}

template <typename T>
Var<T> make_op(Tensor<T> value, std::vector<Var<T>> parents,
               std::function<void(Node<T>&)> backprop) {
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  n->parents = std::move(parents);
  for (const auto& p : n->parents)
    if (p->requires_grad) n->requires_grad = true;
  if (n->requires_grad) n->backprop = std::move(backprop);
  return n;
}

// Accumulates `delta` into the parent's gradient if it participates.
template <typename T, typename Fn>
void accumulate_grad(const Var<T>& parent, Fn&& fill) {
  if (!parent->requires_grad) return;
  parent->ensure_grad();
  fill(parent->grad);
}

template <typename T>
void backward(const Var<T>& root) {
  if (root->value.size() != 1) throw ShapeError("backward requires a scalar root");

  // Iterative post-order DFS for the topological order.
  std::vector<Node<T>*> topo;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.push_back({root.get(), 0});
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node<T>* next = node->parents[idx].get();
      ++idx;
      if (next->requires_grad && !seen.count(next)) stack.push_back({next, 0});
    } else {
      seen.insert(node);
      topo.push_back(node);
      stack.pop_back();
    }
  }

  for (Node<T>* n : topo) {
    n->ensure_grad();
    n->grad.fill(T(0));
  }
  root->grad[0] = T(1);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backprop) n->backprop(*n);
  }
}

// --- Eigen GEMM helpers -----------------------------------------------------

template <typename T>
using MatMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename T>
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// --- elementwise ops ---------------------------------------------------------

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  if (!a->value.same_shape(b->value)) throw ShapeError("add: shape mismatch");
  Tensor<T> out = a->value;
  out += b->value;
  return make_op<T>(std::move(out), {a, b}, [](Node<T>& self) {
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) { g += self.grad; });
    accumulate_grad(self.parents[1], [&](Tensor<T>& g) { g += self.grad; });
  });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  if (!a->value.same_shape(b->value)) throw ShapeError("sub: shape mismatch");
  Tensor<T> out = a->value;
  out -= b->value;
  return make_op<T>(std::move(out), {a, b}, [](Node<T>& self) {
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) { g += self.grad; });
    accumulate_grad(self.parents[1], [&](Tensor<T>& g) { g -= self.grad; });
  });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  if (!a->value.same_shape(b->value)) throw ShapeError("mul: shape mismatch");
  Tensor<T> out(a->value.shape());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = a->value[i] * b->value[i];
  return make_op<T>(std::move(out), {a, b}, [](Node<T>& self) {
    const auto& av = self.parents[0]->value;
    const auto& bv = self.parents[1]->value;
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * bv[i];
    });
    accumulate_grad(self.parents[1], [&](Tensor<T>& g) {
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * av[i];
    });
  });
}

template <typename T>
Var<T> scale(const Var<T>& a, T s) {
  Tensor<T> out = a->value;
  out *= s;
  return make_op<T>(std::move(out), {a}, [s](Node<T>& self) {
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * s;
    });
  });
}

template <typename T>
Var<T> neg(const Var<T>& a) {
  return scale(a, T(-1));
}

template <typename T, typename Fwd, typename Bwd>
Var<T> unary_elementwise(const Var<T>& a, Fwd fwd, Bwd dydx_from_xy) {
  Tensor<T> out(a->value.shape());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = fwd(a->value[i]);
  return make_op<T>(std::move(out), {a}, [dydx_from_xy](Node<T>& self) {
    const auto& x = self.parents[0]->value;
    const auto& y = self.value;
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * dydx_from_xy(x[i], y[i]);
    });
  });
}

template <typename T>
Var<T> relu(const Var<T>& a) {
  return unary_elementwise(
      a, [](T x) { return x > T(0) ? x : T(0); },
      [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Var<T> leaky_relu(const Var<T>& a, T slope) {
  return unary_elementwise(
      a, [slope](T x) { return x > T(0) ? x : slope * x; },
      [slope](T x, T) { return x > T(0) ? T(1) : slope; });
}

template <typename T>
Var<T> tanh_op(const Var<T>& a) {
  return unary_elementwise(
      a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Var<T> sigmoid(const Var<T>& a) {
  return unary_elementwise(
      a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

// log(1 + e^x), evaluated stably; gradient is sigmoid(x).
template <typename T>
Var<T> softplus(const Var<T>& a) {
  return unary_elementwise(
      a,
      [](T x) { return x > T(0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); },
      [](T x, T) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      });
}

// Clamp to [-1,1]; gradient passes through strictly interior points.
template <typename T>
Var<T> clamp_unit(const Var<T>& a) {
  return unary_elementwise(
      a, [](T x) { return std::min(T(1), std::max(T(-1), x)); },
      [](T x, T) { return (x > T(-1) && x < T(1)) ? T(1) : T(0); });
}

// --- linear algebra ----------------------------------------------------------

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  if (a->value.rank() != 2 || b->value.rank() != 2 || a->value.dim(1) != b->value.dim(0))
    throw ShapeError("matmul: incompatible shapes");
  const int m = a->value.dim(0), k = a->value.dim(1), n = b->value.dim(1);
  Tensor<T> out({m, n});
  MatMap<T>(out.data(), m, n).noalias() =
      ConstMatMap<T>(a->value.data(), m, k) * ConstMatMap<T>(b->value.data(), k, n);
  return make_op<T>(std::move(out), {a, b}, [m, k, n](Node<T>& self) {
    const auto& av = self.parents[0]->value;
    const auto& bv = self.parents[1]->value;
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      MatMap<T>(g.data(), m, k).noalias() += ConstMatMap<T>(self.grad.data(), m, n) *
                                             ConstMatMap<T>(bv.data(), k, n).transpose();
    });
    accumulate_grad(self.parents[1], [&](Tensor<T>& g) {
      MatMap<T>(g.data(), k, n).noalias() += ConstMatMap<T>(av.data(), m, k).transpose() *
                                             ConstMatMap<T>(self.grad.data(), m, n);
    });
  });
}

template <typename T>
Var<T> transpose(const Var<T>& a) {
  if (a->value.rank() != 2) throw ShapeError("transpose expects a matrix");
  const int m = a->value.dim(0), n = a->value.dim(1);
  Tensor<T> out({n, m});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.at(j, i) = a->value.at(i, j);
  return make_op<T>(std::move(out), {a}, [m, n](Node<T>& self) {
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) g.at(i, j) += self.grad.at(j, i);
    });
  });
}

template <typename T>
Var<T> reshape(const Var<T>& a, std::vector<int> shape) {
  Tensor<T> out = a->value.reshaped(shape);
  return make_op<T>(std::move(out), {a}, [](Node<T>& self) {
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    });
  });
}

// Adds a row vector {n} to every row of {m,n}.
template <typename T>
Var<T> add_rowvec(const Var<T>& x, const Var<T>& b) {
  if (x->value.rank() != 2 || b->value.size() != x->value.dim(1))
    throw ShapeError("add_rowvec: shape mismatch");
  const int m = x->value.dim(0), n = x->value.dim(1);
  Tensor<T> out = x->value;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) += b->value[j];
  return make_op<T>(std::move(out), {x, b}, [m, n](Node<T>& self) {
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) { g += self.grad; });
    accumulate_grad(self.parents[1], [&](Tensor<T>& g) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) g[j] += self.grad.at(i, j);
    });
  });
}

// Row-wise softmax over {m,n}.
template <typename T>
Var<T> softmax_rows(const Var<T>& a) {
  if (a->value.rank() != 2) throw ShapeError("softmax_rows expects a matrix");
  const int m = a->value.dim(0), n = a->value.dim(1);
  Tensor<T> out({m, n});
  for (int i = 0; i < m; ++i) {
    T mx = a->value.at(i, 0);
    for (int j = 1; j < n; ++j) mx = std::max(mx, a->value.at(i, j));
    T sum = T(0);
    for (int j = 0; j < n; ++j) {
      out.at(i, j) = std::exp(a->value.at(i, j) - mx);
      sum += out.at(i, j);
    }
    for (int j = 0; j < n; ++j) out.at(i, j) /= sum;
  }
  return make_op<T>(std::move(out), {a}, [m, n](Node<T>& self) {
    const auto& y = self.value;
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (int i = 0; i < m; ++i) {
        T dot = T(0);
        for (int j = 0; j < n; ++j) dot += self.grad.at(i, j) * y.at(i, j);
        for (int j = 0; j < n; ++j) g.at(i, j) += y.at(i, j) * (self.grad.at(i, j) - dot);
      }
    });
  });
}

// --- reductions and broadcasts ----------------------------------------------

template <typename T>
Var<T> sum_all(const Var<T>& a) {
  T s = T(0);
  for (std::int64_t i = 0; i < a->value.size(); ++i) s += a->value[i];
  Tensor<T> out({1});
  out[0] = s;
  return make_op<T>(std::move(out), {a}, [](Node<T>& self) {
    const T g0 = self.grad[0];
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += g0;
    });
  });
}

template <typename T>
Var<T> mean_all(const Var<T>& a) {
  return scale(sum_all(a), T(1) / static_cast<T>(a->value.size()));
}

// --- feature-map ops ({C,H,W}) ------------------------------------------------

template <typename T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b) {
  if (a->value.rank() != 3 || b->value.rank() != 3 || a->value.dim(1) != b->value.dim(1) ||
      a->value.dim(2) != b->value.dim(2))
    throw ShapeError("concat_channels: spatial mismatch");
  const int ca = a->value.dim(0), cb = b->value.dim(0);
  const int h = a->value.dim(1), w = a->value.dim(2);
  Tensor<T> out({ca + cb, h, w});
  std::copy(a->value.data(), a->value.data() + a->value.size(), out.data());
  std::copy(b->value.data(), b->value.data() + b->value.size(), out.data() + a->value.size());
  return make_op<T>(std::move(out), {a, b}, [](Node<T>& self) {
    const std::int64_t na = self.parents[0]->value.size();
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (std::int64_t i = 0; i < na; ++i) g[i] += self.grad[i];
    });
    accumulate_grad(self.parents[1], [&](Tensor<T>& g) {
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[na + i];
    });
  });
}

template <typename T>
Var<T> add_bias_chw(const Var<T>& x, const Var<T>& b) {
  if (x->value.rank() != 3 || b->value.size() != x->value.dim(0))
    throw ShapeError("add_bias_chw: shape mismatch");
  const int c = x->value.dim(0);
  const std::int64_t hw = static_cast<std::int64_t>(x->value.dim(1)) * x->value.dim(2);
  Tensor<T> out = x->value;
  for (int k = 0; k < c; ++k) {
    T* plane = out.data() + k * hw;
    const T bias = b->value[k];
    for (std::int64_t i = 0; i < hw; ++i) plane[i] += bias;
  }
  return make_op<T>(std::move(out), {x, b}, [c, hw](Node<T>& self) {
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) { g += self.grad; });
    accumulate_grad(self.parents[1], [&](Tensor<T>& g) {
      for (int k = 0; k < c; ++k) {
        const T* plane = self.grad.data() + k * hw;
        T s = T(0);
        for (std::int64_t i = 0; i < hw; ++i) s += plane[i];
        g[k] += s;
      }
    });
  });
}

template <typename T>
Var<T> global_avg_pool(const Var<T>& x) {
  if (x->value.rank() != 3) throw ShapeError("global_avg_pool expects {C,H,W}");
  const int c = x->value.dim(0);
  const std::int64_t hw = static_cast<std::int64_t>(x->value.dim(1)) * x->value.dim(2);
  Tensor<T> out({c});
  for (int k = 0; k < c; ++k) {
    const T* plane = x->value.data() + k * hw;
    T s = T(0);
    for (std::int64_t i = 0; i < hw; ++i) s += plane[i];
    out[k] = s / static_cast<T>(hw);
  }
  return make_op<T>(std::move(out), {x}, [c, hw](Node<T>& self) {
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (int k = 0; k < c; ++k) {
        const T gk = self.grad[k] / static_cast<T>(hw);
        T* plane = g.data() + k * hw;
        for (std::int64_t i = 0; i < hw; ++i) plane[i] += gk;
      }
    });
  });
}

// Scales each channel plane of x {C,H,W} by gate {C}.
template <typename T>
Var<T> mul_channels(const Var<T>& x, const Var<T>& gate) {
  if (x->value.rank() != 3 || gate->value.size() != x->value.dim(0))
    throw ShapeError("mul_channels: shape mismatch");
  const int c = x->value.dim(0);
  const std::int64_t hw = static_cast<std::int64_t>(x->value.dim(1)) * x->value.dim(2);
  Tensor<T> out = x->value;
  for (int k = 0; k < c; ++k) {
    T* plane = out.data() + k * hw;
    const T s = gate->value[k];
    for (std::int64_t i = 0; i < hw; ++i) plane[i] *= s;
  }
  return make_op<T>(std::move(out), {x, gate}, [c, hw](Node<T>& self) {
    const auto& xv = self.parents[0]->value;
    const auto& gv = self.parents[1]->value;
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      for (int k = 0; k < c; ++k) {
        const T s = gv[k];
        T* gp = g.data() + k * hw;
        const T* up = self.grad.data() + k * hw;
        for (std::int64_t i = 0; i < hw; ++i) gp[i] += up[i] * s;
      }
    });
    accumulate_grad(self.parents[1], [&](Tensor<T>& g) {
      for (int k = 0; k < c; ++k) {
        const T* up = self.grad.data() + k * hw;
        const T* xp = xv.data() + k * hw;
        T s = T(0);
        for (std::int64_t i = 0; i < hw; ++i) s += up[i] * xp[i];
        g[k] += s;
      }
    });
  });
}

// Instance normalization over spatial dims of {C,H,W} with affine params {C}.
template <typename T>
Var<T> instance_norm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps = T(1e-5)) {
  if (x->value.rank() != 3 || gamma->value.size() != x->value.dim(0) ||
      beta->value.size() != x->value.dim(0))
    throw ShapeError("instance_norm: shape mismatch");
  const int c = x->value.dim(0);
  const std::int64_t hw = static_cast<std::int64_t>(x->value.dim(1)) * x->value.dim(2);

  Tensor<T> out(x->value.shape());
  Tensor<T> xhat(x->value.shape());
  std::vector<T> inv_sigma(static_cast<std::size_t>(c));
  for (int k = 0; k < c; ++k) {
    const T* plane = x->value.data() + k * hw;
    T mean = T(0);
    for (std::int64_t i = 0; i < hw; ++i) mean += plane[i];
    mean /= static_cast<T>(hw);
    T var = T(0);
    for (std::int64_t i = 0; i < hw; ++i) {
      const T d = plane[i] - mean;
      var += d * d;
    }
    var /= static_cast<T>(hw);
    const T inv = T(1) / std::sqrt(var + eps);
    inv_sigma[static_cast<std::size_t>(k)] = inv;
    T* xh = xhat.data() + k * hw;
    T* op = out.data() + k * hw;
    const T g = gamma->value[k], b = beta->value[k];
    for (std::int64_t i = 0; i < hw; ++i) {
      xh[i] = (plane[i] - mean) * inv;
      op[i] = g * xh[i] + b;
    }
  }

  return make_op<T>(
      std::move(out), {x, gamma, beta},
      [c, hw, xhat = std::move(xhat), inv_sigma = std::move(inv_sigma)](Node<T>& self) {
        const auto& gammav = self.parents[1]->value;
        accumulate_grad(self.parents[2], [&](Tensor<T>& g) {
          for (int k = 0; k < c; ++k) {
            const T* up = self.grad.data() + k * hw;
            T s = T(0);
            for (std::int64_t i = 0; i < hw; ++i) s += up[i];
            g[k] += s;
          }
        });
        accumulate_grad(self.parents[1], [&](Tensor<T>& g) {
          for (int k = 0; k < c; ++k) {
            const T* up = self.grad.data() + k * hw;
            const T* xh = xhat.data() + k * hw;
            T s = T(0);
            for (std::int64_t i = 0; i < hw; ++i) s += up[i] * xh[i];
            g[k] += s;
          }
        });
        accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
          for (int k = 0; k < c; ++k) {
            const T* up = self.grad.data() + k * hw;
            const T* xh = xhat.data() + k * hw;
            const T gk = gammav[k];
            T sum_u = T(0), sum_ux = T(0);
            for (std::int64_t i = 0; i < hw; ++i) {
              sum_u += up[i];
              sum_ux += up[i] * xh[i];
            }
            const T mean_u = sum_u / static_cast<T>(hw);
            const T mean_ux = sum_ux / static_cast<T>(hw);
            T* gp = g.data() + k * hw;
            const T scale_k = gk * inv_sigma[static_cast<std::size_t>(k)];
            for (std::int64_t i = 0; i < hw; ++i)
              gp[i] += scale_k * (up[i] - mean_u - xh[i] * mean_ux);
          }
        });
      });
}

}  // namespace pigment::nn
