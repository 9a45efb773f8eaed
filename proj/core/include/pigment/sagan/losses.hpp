#pragma once

#include <algorithm>
#include <cmath>

namespace pigment::sagan {

struct GanLosses {
  double g_loss = 0.0;
  double d_loss = 0.0;
};

// Discriminator loss -log d_real - log(1 - d_fake); non-saturating generator
// loss -log d_fake. Inputs are probabilities, clamped away from {0,1}.
inline GanLosses gan_losses(double d_real, double d_fake) {
  constexpr double kEps = 1e-7;
  const auto clamp01 = [](double v) { return std::min(1.0 - kEps, std::max(kEps, v)); };
  GanLosses out;
  out.d_loss = -std::log(clamp01(d_real)) - std::log(1.0 - clamp01(d_fake));
  out.g_loss = -std::log(clamp01(d_fake));
  return out;
}

}  // namespace pigment::sagan
