// Super-resolution network: a pooling-free stack of 3x3 convolutions with a
// channel-attention gate after every second layer and a terminal transposed
// convolution of stride f. The network output is added to the bicubic
// upsampling of the input (global residual) and clamped to [-1,1], so the
// all-zero parameter state reproduces plain bicubic upsampling exactly.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pigment/nn/adam.hpp"
#include "pigment/nn/conv.hpp"
#include "pigment/nn/params.hpp"
#include "pigment/nn/resample_op.hpp"
#include "pigment/rng.hpp"
#include "pigment/sasr/bicubic.hpp"
#include "pigment/sasr/config.hpp"

namespace pigment::sasr {

// Squeeze-excitation gate: per-channel global average -> C/r bottleneck ->
// sigmoid gate in (0,1)^C scaling the feature planes.
template <typename T>
nn::Var<T> channel_attention_graph(const nn::Var<T>& x, const nn::Var<T>& w1, const nn::Var<T>& b1,
                                   const nn::Var<T>& w2, const nn::Var<T>& b2) {
  const int c = x->value.dim(0);
  if (w1->value.rank() != 2 || w1->value.dim(0) != c || c % w1->value.dim(1) != 0)
    throw ConfigError("channel_attention: bottleneck width must divide channels");
  nn::Var<T> z = nn::reshape(nn::global_avg_pool(x), {1, c});
  z = nn::relu(nn::add_rowvec(nn::matmul(z, w1), b1));
  z = nn::sigmoid(nn::add_rowvec(nn::matmul(z, w2), b2));
  return nn::mul_channels(x, nn::reshape(z, {c}));
}

// Plain-tensor form over {h,w,C} features.
template <typename T>
Tensor<T> channel_attention(const Tensor<T>& features_hwc, const Tensor<T>& w1, const Tensor<T>& b1,
                            const Tensor<T>& w2, const Tensor<T>& b2) {
  if (features_hwc.rank() != 3) throw ShapeError("channel_attention expects {h,w,C}");
  nn::Var<T> x = nn::constant(hwc_to_chw(features_hwc));
  nn::Var<T> out = channel_attention_graph(x, nn::constant(w1), nn::constant(b1), nn::constant(w2),
                                           nn::constant(b2));
  return chw_to_hwc(out->value);
}

template <typename T>
struct SrModel {
  SrConfig config;
  nn::ParamStore<T> params;
  nn::Adam<T> opt;
  Rng rng;
  long step = 0;

  explicit SrModel(const SrConfig& cfg) : config(cfg), rng(derive_seed(cfg.seed, 1)) {
    config.validate();
    Rng init(derive_seed(cfg.seed, 0));
    const int c = config.channels;
    const int hidden = c / config.attention_reduction;

    params.add("sr/conv0/w", nn::he_init<T>({c, 3, 3, 3}, 3 * 9, init));
    params.add("sr/conv0/b", Tensor<T>({c}));
    for (int l = 1; l < config.conv_layers; ++l) {
      params.add("sr/conv" + std::to_string(l) + "/w", nn::he_init<T>({c, c, 3, 3}, c * 9, init));
      params.add("sr/conv" + std::to_string(l) + "/b", Tensor<T>({c}));
      if ((l + 1) % 2 == 0) {
        const std::string p = "sr/att" + std::to_string(l);
        params.add(p + "/w1", nn::glorot_init<T>({c, hidden}, c, hidden, init));
        params.add(p + "/b1", Tensor<T>({hidden}));
        params.add(p + "/w2", nn::glorot_init<T>({hidden, c}, hidden, c, init));
        params.add(p + "/b2", Tensor<T>({c}));
      }
    }
    // Zero-initialized reconstruction head: training starts from the bicubic
    // baseline.
    params.add("sr/deconv/w", Tensor<T>({c, 3, config.deconv_kernel(), config.deconv_kernel()}));
    params.add("sr/deconv/b", Tensor<T>({3}));

    opt = nn::Adam<T>(params.with_prefix("sr/"), config.learning_rate, 0.9, 0.999);
  }
};

// lr {3,h,w} -> clamped {3, f*h, f*w} graph.
template <typename T>
nn::Var<T> sasr_graph(const SrModel<T>& m, const Tensor<T>& lr_chw) {
  if (lr_chw.rank() != 3 || lr_chw.dim(0) != 3) throw ShapeError("sasr input must be {3,h,w}");
  const int f = m.config.scale;
  const int h = lr_chw.dim(1), w = lr_chw.dim(2);

  nn::Var<T> x = nn::constant(lr_chw);
  nn::Var<T> feat = nn::relu(nn::conv2d(x, m.params.at("sr/conv0/w"), m.params.at("sr/conv0/b"), 1, 1));
  for (int l = 1; l < m.config.conv_layers; ++l) {
    const std::string p = "sr/conv" + std::to_string(l);
    feat = nn::relu(nn::conv2d(feat, m.params.at(p + "/w"), m.params.at(p + "/b"), 1, 1));
    if ((l + 1) % 2 == 0) {
      const std::string a = "sr/att" + std::to_string(l);
      feat = channel_attention_graph(feat, m.params.at(a + "/w1"), m.params.at(a + "/b1"),
                                     m.params.at(a + "/w2"), m.params.at(a + "/b2"));
    }
  }
  nn::Var<T> recon = nn::conv2d_transpose(feat, m.params.at("sr/deconv/w"),
                                          m.params.at("sr/deconv/b"), f, m.config.deconv_pad());

  const auto row_plan = std::make_shared<const AxisPlan>(make_axis_plan(h, h * f, false));
  const auto col_plan = std::make_shared<const AxisPlan>(make_axis_plan(w, w * f, false));
  nn::Var<T> baseline = nn::resample(x, row_plan, col_plan);
  return nn::clamp_unit(nn::add(recon, baseline));
}

// lr {h,w,3} -> hr {f*h, f*w, 3} in [-1,1].
template <typename T>
Tensor<T> sasr_forward(const SrModel<T>& m, const Tensor<T>& lr_hwc) {
  if (lr_hwc.rank() != 3 || lr_hwc.dim(2) != 3) throw ShapeError("sasr input must be {h,w,3}");
  return chw_to_hwc(sasr_graph(m, hwc_to_chw(lr_hwc))->value);
}

// Mean squared residual between Y and the degraded reconstruction DS(Z).
template <typename T>
double degradation_loss(const Tensor<T>& hr_z, const Tensor<T>& lr_y, int f) {
  const Tensor<T> ds = bicubic_downsample(hr_z, f);
  if (!ds.same_shape(lr_y)) throw ShapeError("degradation_loss: downsample(Z) does not match Y");
  double acc = 0.0;
  for (std::int64_t i = 0; i < ds.size(); ++i) {
    const double d = static_cast<double>(lr_y[i]) - static_cast<double>(ds[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(ds.size());
}

// Peak signal-to-noise ratio in dB for [-1,1] images (peak = 2), capped at
// 100 dB; identical inputs report the cap.
template <typename T>
double psnr(const Tensor<T>& a, const Tensor<T>& b) {
  if (!a.same_shape(b)) throw ShapeError("psnr: shape mismatch");
  double mse = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse <= 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(4.0 / mse));
}

}  // namespace pigment::sasr
