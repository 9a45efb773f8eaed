// Convolution and transposed convolution over {C,H,W} maps, implemented as
// im2col + GEMM. Zero padding; strides as configured. Backward passes rebuild
// their im2col buffers rather than caching them.

#pragma once

#include "pigment/nn/autodiff.hpp"

namespace pigment::nn {

struct ConvGeom {
  int in_c = 0, in_h = 0, in_w = 0;
  int kh = 0, kw = 0;
  int stride = 1, pad = 0;
  int out_h = 0, out_w = 0;

  static ConvGeom of(int c, int h, int w, int kh, int kw, int stride, int pad) {
    ConvGeom g{c, h, w, kh, kw, stride, pad, 0, 0};
    g.out_h = (h + 2 * pad - kh) / stride + 1;
    g.out_w = (w + 2 * pad - kw) / stride + 1;
    if (g.out_h < 1 || g.out_w < 1) throw ShapeError("convolution output would be empty");
    return g;
  }

  std::int64_t patch_len() const { return static_cast<std::int64_t>(in_c) * kh * kw; }
  std::int64_t positions() const { return static_cast<std::int64_t>(out_h) * out_w; }
};

// cols: {C*kh*kw, out_h*out_w}, row-major.
template <typename T>
void im2col(const T* src, const ConvGeom& g, T* cols) {
  const std::int64_t positions = g.positions();
  for (int c = 0; c < g.in_c; ++c) {
    const T* plane = src + static_cast<std::int64_t>(c) * g.in_h * g.in_w;
    for (int ky = 0; ky < g.kh; ++ky) {
      for (int kx = 0; kx < g.kw; ++kx) {
        T* row = cols + ((static_cast<std::int64_t>(c) * g.kh + ky) * g.kw + kx) * positions;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride + ky - g.pad;
          T* dst = row + static_cast<std::int64_t>(oy) * g.out_w;
          if (iy < 0 || iy >= g.in_h) {
            for (int ox = 0; ox < g.out_w; ++ox) dst[ox] = T(0);
            continue;
          }
          const T* src_row = plane + static_cast<std::int64_t>(iy) * g.in_w;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * g.stride + kx - g.pad;
            dst[ox] = (ix >= 0 && ix < g.in_w) ? src_row[ix] : T(0);
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-add columns back into the {C,H,W} image.
template <typename T>
void col2im_add(const T* cols, const ConvGeom& g, T* dst) {
  const std::int64_t positions = g.positions();
  for (int c = 0; c < g.in_c; ++c) {
    T* plane = dst + static_cast<std::int64_t>(c) * g.in_h * g.in_w;
    for (int ky = 0; ky < g.kh; ++ky) {
      for (int kx = 0; kx < g.kw; ++kx) {
        const T* row = cols + ((static_cast<std::int64_t>(c) * g.kh + ky) * g.kw + kx) * positions;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride + ky - g.pad;
          if (iy < 0 || iy >= g.in_h) continue;
          T* dst_row = plane + static_cast<std::int64_t>(iy) * g.in_w;
          const T* src_row = row + static_cast<std::int64_t>(oy) * g.out_w;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * g.stride + kx - g.pad;
            if (ix >= 0 && ix < g.in_w) dst_row[ix] += src_row[ox];
          }
        }
      }
    }
  }
}

// x {Cin,H,W}, w {Cout,Cin,kh,kw}, b {Cout} -> {Cout,H',W'}.
template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b, int stride, int pad) {
  if (x->value.rank() != 3 || w->value.rank() != 4 || x->value.dim(0) != w->value.dim(1))
    throw ShapeError("conv2d: shape mismatch");
  const int cout = w->value.dim(0);
  if (b->value.size() != cout) throw ShapeError("conv2d: bias mismatch");
  const ConvGeom g = ConvGeom::of(x->value.dim(0), x->value.dim(1), x->value.dim(2),
                                  w->value.dim(2), w->value.dim(3), stride, pad);
  const std::int64_t K = g.patch_len(), P = g.positions();

  std::vector<T> cols(static_cast<std::size_t>(K * P));
  im2col(x->value.data(), g, cols.data());

  Tensor<T> out({cout, g.out_h, g.out_w});
  MatMap<T>(out.data(), cout, static_cast<int>(P)).noalias() =
      ConstMatMap<T>(w->value.data(), cout, static_cast<int>(K)) *
      ConstMatMap<T>(cols.data(), static_cast<int>(K), static_cast<int>(P));
  for (int k = 0; k < cout; ++k) {
    T* plane = out.data() + static_cast<std::int64_t>(k) * P;
    const T bias = b->value[k];
    for (std::int64_t i = 0; i < P; ++i) plane[i] += bias;
  }

  return make_op<T>(std::move(out), {x, w, b}, [g, cout, K, P](Node<T>& self) {
    const auto& xv = self.parents[0]->value;
    const auto& wv = self.parents[1]->value;

    accumulate_grad(self.parents[2], [&](Tensor<T>& gb) {
      for (int k = 0; k < cout; ++k) {
        const T* plane = self.grad.data() + static_cast<std::int64_t>(k) * P;
        T s = T(0);
        for (std::int64_t i = 0; i < P; ++i) s += plane[i];
        gb[k] += s;
      }
    });

    if (self.parents[1]->requires_grad) {
      std::vector<T> cols(static_cast<std::size_t>(K * P));
      im2col(xv.data(), g, cols.data());
      accumulate_grad(self.parents[1], [&](Tensor<T>& gw) {
        MatMap<T>(gw.data(), cout, static_cast<int>(K)).noalias() +=
            ConstMatMap<T>(self.grad.data(), cout, static_cast<int>(P)) *
            ConstMatMap<T>(cols.data(), static_cast<int>(K), static_cast<int>(P)).transpose();
      });
    }

    if (self.parents[0]->requires_grad) {
      std::vector<T> dcols(static_cast<std::size_t>(K * P));
      MatMap<T>(dcols.data(), static_cast<int>(K), static_cast<int>(P)).noalias() =
          ConstMatMap<T>(wv.data(), cout, static_cast<int>(K)).transpose() *
          ConstMatMap<T>(self.grad.data(), cout, static_cast<int>(P));
      accumulate_grad(self.parents[0],
                      [&](Tensor<T>& gx) { col2im_add(dcols.data(), g, gx.data()); });
    }
  });
}

// x {Cin,h,w}, w {Cin,Cout,kh,kw}, b {Cout} -> {Cout, f*(h-1)+kh-2p, f*(w-1)+kw-2p}.
// The forward pass is the adjoint of a strided convolution over the output.
template <typename T>
Var<T> conv2d_transpose(const Var<T>& x, const Var<T>& w, const Var<T>& b, int stride, int pad) {
  if (x->value.rank() != 3 || w->value.rank() != 4 || x->value.dim(0) != w->value.dim(0))
    throw ShapeError("conv2d_transpose: shape mismatch");
  const int cin = w->value.dim(0), cout = w->value.dim(1);
  const int kh = w->value.dim(2), kw = w->value.dim(3);
  if (b->value.size() != cout) throw ShapeError("conv2d_transpose: bias mismatch");
  const int h = x->value.dim(1), wid = x->value.dim(2);
  const int out_h = stride * (h - 1) + kh - 2 * pad;
  const int out_w = stride * (wid - 1) + kw - 2 * pad;
  if (out_h < 1 || out_w < 1) throw ShapeError("conv2d_transpose output would be empty");

  // Geometry expressed on the output image, the input acting as conv output.
  ConvGeom g{cout, out_h, out_w, kh, kw, stride, pad, h, wid};
  const std::int64_t K = g.patch_len(), P = g.positions();

  Tensor<T> out({cout, out_h, out_w});
  {
    std::vector<T> cols(static_cast<std::size_t>(K * P));
    MatMap<T>(cols.data(), static_cast<int>(K), static_cast<int>(P)).noalias() =
        ConstMatMap<T>(w->value.data(), cin, static_cast<int>(K)).transpose() *
        ConstMatMap<T>(x->value.data(), cin, static_cast<int>(P));
    col2im_add(cols.data(), g, out.data());
    for (int k = 0; k < cout; ++k) {
      T* plane = out.data() + static_cast<std::int64_t>(k) * out_h * out_w;
      const T bias = b->value[k];
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(out_h) * out_w; ++i) plane[i] += bias;
    }
  }

  return make_op<T>(std::move(out), {x, w, b}, [g, cin, cout, K, P](Node<T>& self) {
    const auto& xv = self.parents[0]->value;
    const auto& wv = self.parents[1]->value;
    const std::int64_t out_hw = static_cast<std::int64_t>(g.in_h) * g.in_w;

    accumulate_grad(self.parents[2], [&](Tensor<T>& gb) {
      for (int k = 0; k < cout; ++k) {
        const T* plane = self.grad.data() + static_cast<std::int64_t>(k) * out_hw;
        T s = T(0);
        for (std::int64_t i = 0; i < out_hw; ++i) s += plane[i];
        gb[k] += s;
      }
    });

    // dcols is shared by both remaining gradients.
    if (self.parents[0]->requires_grad || self.parents[1]->requires_grad) {
      std::vector<T> dcols(static_cast<std::size_t>(K * P));
      im2col(self.grad.data(), g, dcols.data());
      accumulate_grad(self.parents[0], [&](Tensor<T>& gx) {
        MatMap<T>(gx.data(), cin, static_cast<int>(P)).noalias() +=
            ConstMatMap<T>(wv.data(), cin, static_cast<int>(K)) *
            ConstMatMap<T>(dcols.data(), static_cast<int>(K), static_cast<int>(P));
      });
      accumulate_grad(self.parents[1], [&](Tensor<T>& gw) {
        MatMap<T>(gw.data(), cin, static_cast<int>(K)).noalias() +=
            ConstMatMap<T>(xv.data(), cin, static_cast<int>(P)) *
            ConstMatMap<T>(dcols.data(), static_cast<int>(K), static_cast<int>(P)).transpose();
      });
    }
  });
}

}  // namespace pigment::nn
