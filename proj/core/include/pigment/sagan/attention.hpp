// Self-attention over a set of locations: per query i, a softmax over the
// footprint of scaled query-key dot products weights the projected values,
// and the aggregate is added back to the query's features.

#pragma once

#include "pigment/nn/autodiff.hpp"
#include "pigment/sagan/config.hpp"

namespace pigment::sagan {

template <typename T>
struct AttentionParams {
  nn::Var<T> wq;  // {C, key_dim}
  nn::Var<T> wk;  // {C, key_dim}
  nn::Var<T> wv;  // {C, value_dim}
  nn::Var<T> wo;  // {value_dim, C}
};

// Additive mask excluding location pairs outside a Chebyshev window of the
// given radius on an h x w grid (row-major locations).
template <typename T>
Tensor<T> window_mask(int h, int w, int radius) {
  const int n = h * w;
  Tensor<T> mask({n, n});
  for (int i = 0; i < n; ++i) {
    const int ri = i / w, ci = i % w;
    for (int j = 0; j < n; ++j) {
      const int rj = j / w, cj = j % w;
      if (std::abs(ri - rj) > radius || std::abs(ci - cj) > radius)
        mask.at(i, j) = T(-1e30);
    }
  }
  return mask;
}

// features {N_loc, C} -> {N_loc, C}. grid_h/grid_w describe the location
// grid and are only consulted in window mode.
template <typename T>
nn::Var<T> self_attention(const nn::Var<T>& features, const AttentionParams<T>& params,
                          const AttentionConfig& config, int grid_h = 0, int grid_w = 0) {
  config.validate();
  if (features->value.rank() != 2) throw ShapeError("self_attention expects {N_loc, C}");
  const int n = features->value.dim(0);

  nn::Var<T> q = nn::matmul(features, params.wq);
  nn::Var<T> k = nn::matmul(features, params.wk);
  nn::Var<T> v = nn::matmul(features, params.wv);

  nn::Var<T> scores =
      nn::scale(nn::matmul(q, nn::transpose(k)), T(1) / std::sqrt(static_cast<T>(config.key_dim)));

  if (config.footprint == AttentionConfig::Footprint::kWindow) {
    if (grid_h < 1 || grid_w < 1 || grid_h * grid_w != n)
      throw ShapeError("window attention needs a grid matching N_loc");
    if (config.window_radius >= std::max(grid_h, grid_w))
      throw ConfigError("window radius covers the whole spatial extent");
    scores = nn::add(scores, nn::constant(window_mask<T>(grid_h, grid_w, config.window_radius)));
  }

  nn::Var<T> attn = nn::softmax_rows(scores);
  nn::Var<T> aggregated = nn::matmul(nn::matmul(attn, v), params.wo);
  return nn::add(features, aggregated);
}

// Plain-tensor wrapper for callers outside a training graph.
template <typename T>
Tensor<T> self_attention(const Tensor<T>& features, const Tensor<T>& wq, const Tensor<T>& wk,
                         const Tensor<T>& wv, const Tensor<T>& wo, const AttentionConfig& config,
                         int grid_h = 0, int grid_w = 0) {
  AttentionParams<T> params{nn::constant(wq), nn::constant(wk), nn::constant(wv),
                            nn::constant(wo)};
  return self_attention(nn::constant(features), params, config, grid_h, grid_w)->value;
}

// {C,H,W} feature-map block: locations are the H*W grid cells.
template <typename T>
nn::Var<T> self_attention_chw(const nn::Var<T>& x, const AttentionParams<T>& params,
                              const AttentionConfig& config) {
  const int c = x->value.dim(0), h = x->value.dim(1), w = x->value.dim(2);
  nn::Var<T> flat = nn::transpose(nn::reshape(x, {c, h * w}));  // {N, C}
  nn::Var<T> attended = self_attention(flat, params, config, h, w);
  return nn::reshape(nn::transpose(attended), {c, h, w});
}

}  // namespace pigment::sagan
