// Bicubic resampling as a fixed linear graph op; backward applies the
// adjoint of the same tap tables.

#pragma once

#include <memory>

#include "pigment/nn/autodiff.hpp"
#include "pigment/sasr/bicubic.hpp"

namespace pigment::nn {

template <typename T>
Var<T> resample(const Var<T>& x, std::shared_ptr<const sasr::AxisPlan> rows,
                std::shared_ptr<const sasr::AxisPlan> cols) {
  Tensor<T> out = sasr::resample_chw(x->value, *rows, *cols);
  return make_op<T>(std::move(out), {x}, [rows, cols](Node<T>& self) {
    accumulate_grad(self.parents[0], [&](Tensor<T>& g) {
      g += sasr::resample_chw_adjoint(self.grad, *rows, *cols);
    });
  });
}

}  // namespace pigment::nn
