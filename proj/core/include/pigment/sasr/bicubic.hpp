// Bicubic resampling with the Catmull-Rom kernel (a = -0.5). One tap-table
// implementation backs the degradation operator, the upsampling baseline and
// corpus ingest, so all of them agree bit-for-bit on the kernel, the
// reflect-101 border rule and the anti-alias policy (kernel stretched by the
// scale factor when shrinking, plain interpolation when enlarging).
//
// Both public image operators clamp their output to [-1, 1]: resampled
// images stay valid images, and the zero-parameter identity between the
// super-resolution forward pass and plain bicubic upsampling holds exactly.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pigment/errors.hpp"
#include "pigment/tensor.hpp"

namespace pigment::sasr {

// 4-tap cubic convolution kernel; weights at any integer-grid phase sum to 1.
struct BicubicKernel {
  double a = -0.5;
  static constexpr int support = 4;

  double operator()(double t) const {
    t = std::abs(t);
    if (t < 1.0) return (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0;
    if (t < 2.0) return a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a;
    return 0.0;
  }
};

inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

// Per-axis sampling plan: for each output position, `taps` source indices
// (already reflected into range) and unit-sum weights.
struct AxisPlan {
  int in = 0;
  int out = 0;
  int taps = 0;
  std::vector<int> index;
  std::vector<double> weight;
};

inline AxisPlan make_axis_plan(int in, int out, bool antialias, double a = -0.5) {
  if (in < 1 || out < 1) throw ShapeError("resample axis must be positive");
  BicubicKernel kernel{a};
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  const double stretch = (antialias && scale > 1.0) ? scale : 1.0;
  const double radius = 2.0 * stretch;

  AxisPlan plan;
  plan.in = in;
  plan.out = out;
  plan.taps = static_cast<int>(std::floor(2.0 * radius)) + 1;
  plan.index.resize(static_cast<std::size_t>(plan.out) * plan.taps);
  plan.weight.resize(static_cast<std::size_t>(plan.out) * plan.taps);

  for (int o = 0; o < out; ++o) {
    const double src = (o + 0.5) * scale - 0.5;
    const int first = static_cast<int>(std::ceil(src - radius));
    double sum = 0.0;
    for (int t = 0; t < plan.taps; ++t) {
      const int j = first + t;
      const double w = kernel((static_cast<double>(j) - src) / stretch);
      plan.index[static_cast<std::size_t>(o) * plan.taps + t] = reflect_index(j, in);
      plan.weight[static_cast<std::size_t>(o) * plan.taps + t] = w;
      sum += w;
    }
    for (int t = 0; t < plan.taps; ++t)
      plan.weight[static_cast<std::size_t>(o) * plan.taps + t] /= sum;
  }
  return plan;
}

namespace detail {

// Resample the leading axis of a {rows, cols} plane stored row-major.
template <typename T>
void resample_rows(const T* src, int rows, int cols, const AxisPlan& plan, T* dst) {
  for (int o = 0; o < plan.out; ++o) {
    T* out_row = dst + static_cast<std::int64_t>(o) * cols;
    for (int x = 0; x < cols; ++x) out_row[x] = T(0);
    for (int t = 0; t < plan.taps; ++t) {
      const T w = static_cast<T>(plan.weight[static_cast<std::size_t>(o) * plan.taps + t]);
      const T* in_row = src + static_cast<std::int64_t>(plan.index[static_cast<std::size_t>(o) * plan.taps + t]) * cols;
      for (int x = 0; x < cols; ++x) out_row[x] += w * in_row[x];
    }
  }
  (void)rows;
}

// Adjoint of resample_rows: scatter-add output gradients back to sources.
template <typename T>
void resample_rows_adjoint(const T* grad, int cols, const AxisPlan& plan, T* dst) {
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(plan.in) * cols; ++i) dst[i] = T(0);
  for (int o = 0; o < plan.out; ++o) {
    const T* g_row = grad + static_cast<std::int64_t>(o) * cols;
    for (int t = 0; t < plan.taps; ++t) {
      const T w = static_cast<T>(plan.weight[static_cast<std::size_t>(o) * plan.taps + t]);
      T* d_row = dst + static_cast<std::int64_t>(plan.index[static_cast<std::size_t>(o) * plan.taps + t]) * cols;
      for (int x = 0; x < cols; ++x) d_row[x] += w * g_row[x];
    }
  }
}

template <typename T>
void transpose_plane(const T* src, int rows, int cols, T* dst) {
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) dst[static_cast<std::int64_t>(x) * rows + y] = src[static_cast<std::int64_t>(y) * cols + x];
}

}  // namespace detail

// Separable resample of a {C, H, W} tensor. No clamping here; the image-level
// wrappers and the network graph apply it explicitly.
template <typename T>
Tensor<T> resample_chw(const Tensor<T>& x, const AxisPlan& row_plan, const AxisPlan& col_plan) {
  if (x.rank() != 3) throw ShapeError("resample_chw expects {C,H,W}");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (h != row_plan.in || w != col_plan.in) throw ShapeError("resample plan does not match input");
  const int oh = row_plan.out, ow = col_plan.out;

  Tensor<T> out({c, oh, ow});
  std::vector<T> rows_done(static_cast<std::size_t>(oh) * w);
  std::vector<T> rows_t(static_cast<std::size_t>(w) * oh);
  std::vector<T> cols_done(static_cast<std::size_t>(ow) * oh);
  for (int k = 0; k < c; ++k) {
    detail::resample_rows(x.data() + static_cast<std::int64_t>(k) * h * w, h, w, row_plan, rows_done.data());
    detail::transpose_plane(rows_done.data(), oh, w, rows_t.data());
    detail::resample_rows(rows_t.data(), w, oh, col_plan, cols_done.data());
    detail::transpose_plane(cols_done.data(), ow, oh, out.data() + static_cast<std::int64_t>(k) * oh * ow);
  }
  return out;
}

template <typename T>
Tensor<T> resample_chw_adjoint(const Tensor<T>& grad, const AxisPlan& row_plan, const AxisPlan& col_plan) {
  const int c = grad.dim(0), oh = grad.dim(1), ow = grad.dim(2);
  if (oh != row_plan.out || ow != col_plan.out) throw ShapeError("adjoint plan does not match gradient");
  const int h = row_plan.in, w = col_plan.in;

  Tensor<T> out({c, h, w});
  std::vector<T> g_t(static_cast<std::size_t>(ow) * oh);
  std::vector<T> cols_adj(static_cast<std::size_t>(w) * oh);
  std::vector<T> rows_in(static_cast<std::size_t>(oh) * w);
  for (int k = 0; k < c; ++k) {
    detail::transpose_plane(grad.data() + static_cast<std::int64_t>(k) * oh * ow, oh, ow, g_t.data());
    detail::resample_rows_adjoint(g_t.data(), oh, col_plan, cols_adj.data());
    detail::transpose_plane(cols_adj.data(), w, oh, rows_in.data());
    detail::resample_rows_adjoint(rows_in.data(), w, row_plan, out.data() + static_cast<std::int64_t>(k) * h * w);
  }
  return out;
}

template <typename T>
void clamp_unit(Tensor<T>& t) {
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = std::min(T(1), std::max(T(-1), t[i]));
}

// Anti-aliased bicubic decimation by an integer factor; {H,W,C} image in, {H/f,W/f,C} out.
template <typename T>
Tensor<T> bicubic_downsample(const Tensor<T>& image, int f) {
  if (image.rank() != 3) throw ShapeError("bicubic_downsample expects {H,W,C}");
  const int h = image.dim(0), w = image.dim(1);
  if (f < 1 || h % f != 0 || w % f != 0) throw ShapeError("scale factor must divide image dimensions");
  const auto rows = make_axis_plan(h, h / f, /*antialias=*/true);
  const auto cols = make_axis_plan(w, w / f, /*antialias=*/true);
  Tensor<T> out = chw_to_hwc(resample_chw(hwc_to_chw(image), rows, cols));
  clamp_unit(out);
  return out;
}

// Plain bicubic interpolation by an integer factor; no anti-aliasing.
template <typename T>
Tensor<T> bicubic_upsample(const Tensor<T>& image, int f) {
  if (image.rank() != 3) throw ShapeError("bicubic_upsample expects {H,W,C}");
  if (f < 1) throw ShapeError("scale factor must be positive");
  const int h = image.dim(0), w = image.dim(1);
  const auto rows = make_axis_plan(h, h * f, /*antialias=*/false);
  const auto cols = make_axis_plan(w, w * f, /*antialias=*/false);
  Tensor<T> out = chw_to_hwc(resample_chw(hwc_to_chw(image), rows, cols));
  clamp_unit(out);
  return out;
}

// General resize used by corpus ingest; anti-aliases per axis when shrinking.
template <typename T>
Tensor<T> resample_image(const Tensor<T>& image, int out_h, int out_w) {
  if (image.rank() != 3) throw ShapeError("resample_image expects {H,W,C}");
  const auto rows = make_axis_plan(image.dim(0), out_h, /*antialias=*/true);
  const auto cols = make_axis_plan(image.dim(1), out_w, /*antialias=*/true);
  Tensor<T> out = chw_to_hwc(resample_chw(hwc_to_chw(image), rows, cols));
  clamp_unit(out);
  return out;
}

}  // namespace pigment::sasr
