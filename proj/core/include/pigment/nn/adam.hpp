// Adam over an explicit parameter list. Moment tensors are exposed so
// checkpoints can carry the full optimizer state.

#pragma once

#include <cmath>
#include <vector>

#include "pigment/nn/autodiff.hpp"

namespace pigment::nn {

template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Var<T>> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : params_) {
      m_.emplace_back(p->value.shape());
      v_.emplace_back(p->value.shape());
    }
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = *params_[i];
      if (p.grad.size() != p.value.size()) continue;  // untouched this step
      auto& m = m_[i];
      auto& v = v_[i];
      for (std::int64_t j = 0; j < p.value.size(); ++j) {
        const double g = static_cast<double>(p.grad[j]);
        m[j] = static_cast<T>(beta1_ * m[j] + (1.0 - beta1_) * g);
        v[j] = static_cast<T>(beta2_ * v[j] + (1.0 - beta2_) * g * g);
        const double mhat = static_cast<double>(m[j]) / bc1;
        const double vhat = static_cast<double>(v[j]) / bc2;
        p.value[j] -= static_cast<T>(lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  void zero_grads() {
    for (const auto& p : params_)
      if (p->grad.size() == p->value.size()) p->grad.fill(T(0));
  }

  long step_count() const { return t_; }
  void set_step_count(long t) { t_ = t; }
  std::vector<Tensor<T>>& moment1() { return m_; }
  std::vector<Tensor<T>>& moment2() { return v_; }
  const std::vector<Tensor<T>>& moment1() const { return m_; }
  const std::vector<Tensor<T>>& moment2() const { return v_; }
  const std::vector<Var<T>>& params() const { return params_; }

 private:
  std::vector<Var<T>> params_;
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::vector<Tensor<T>> m_, v_;
};

}  // namespace pigment::nn
