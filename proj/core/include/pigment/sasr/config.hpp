#pragma once

#include <cstdint>

#include "pigment/errors.hpp"

namespace pigment::sasr {

struct SrConfig {
  int scale = 4;  // f
  int conv_layers = 8;
  int channels = 64;
  int attention_reduction = 8;
  double learning_rate = 1e-4;
  double lambda_degradation = 0.1;
  int batch_size = 8;
  long steps = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (scale != 2 && scale != 3 && scale != 4) throw ConfigError("scale must be 2, 3 or 4");
    if (conv_layers < 2) throw ConfigError("conv_layers must be >= 2");
    if (channels < 8) throw ConfigError("channels must be >= 8");
    if (attention_reduction < 1 || channels % attention_reduction != 0)
      throw ConfigError("attention_reduction must divide channels");
    if (learning_rate <= 0) throw ConfigError("learning_rate must be > 0");
    if (lambda_degradation < 0) throw ConfigError("lambda_degradation must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (steps < 0) throw ConfigError("steps must be >= 0");
  }

  // Transposed-convolution geometry yielding exactly f*h: overlapping taps
  // for even factors, non-overlapping for f=3.
  int deconv_kernel() const { return scale % 2 == 0 ? 2 * scale : scale; }
  int deconv_pad() const { return scale % 2 == 0 ? scale / 2 : 0; }
};

}  // namespace pigment::sasr
