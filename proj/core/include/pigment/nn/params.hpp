// Named parameter registry. Order of registration is the canonical order for
// optimizer state and checkpoint layout.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pigment/nn/autodiff.hpp"
#include "pigment/rng.hpp"

namespace pigment::nn {

template <typename T>
class ParamStore {
 public:
  Var<T> add(const std::string& name, Tensor<T> init) {
    for (const auto& [n, v] : items_)
      if (n == name) throw ConfigError("duplicate parameter: " + name);
    items_.emplace_back(name, parameter(std::move(init)));
    return items_.back().second;
  }

  Var<T> at(const std::string& name) const {
    for (const auto& [n, v] : items_)
      if (n == name) return v;
    throw ConfigError("unknown parameter: " + name);
  }

  bool contains(const std::string& name) const {
    for (const auto& [n, v] : items_)
      if (n == name) return true;
    return false;
  }

  const std::vector<std::pair<std::string, Var<T>>>& items() const { return items_; }

  std::vector<Var<T>> with_prefix(const std::string& prefix) const {
    std::vector<Var<T>> out;
    for (const auto& [n, v] : items_)
      if (n.rfind(prefix, 0) == 0) out.push_back(v);
    return out;
  }

  std::int64_t total_size() const {
    std::int64_t n = 0;
    for (const auto& [name, v] : items_) n += v->value.size();
    return n;
  }

 private:
  std::vector<std::pair<std::string, Var<T>>> items_;
};

template <typename T>
Tensor<T> normal_init(std::vector<int> shape, double stddev, Rng& rng) {
  Tensor<T> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(rng.normal() * stddev);
  return t;
}

template <typename T>
Tensor<T> glorot_init(std::vector<int> shape, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  Tensor<T> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<T>((rng.uniform() * 2.0 - 1.0) * limit);
  return t;
}

template <typename T>
Tensor<T> he_init(std::vector<int> shape, int fan_in, Rng& rng) {
  const double stddev = std::sqrt(2.0 / fan_in);
  return normal_init<T>(std::move(shape), stddev, rng);
}

}  // namespace pigment::nn
