#pragma once

#include <cstdint>
#include <string>

#include "pigment/errors.hpp"

namespace pigment::sagan {

// Footprint of the attention aggregation: every location, or a square
// window of the given Chebyshev radius around the query.
struct AttentionConfig {
  enum class Footprint { kGlobal, kWindow };

  Footprint footprint = Footprint::kGlobal;
  int window_radius = 0;
  int key_dim = 8;
  int value_dim = 8;

  void validate() const {
    if (key_dim < 1 || value_dim < 1) throw ConfigError("attention dims must be >= 1");
    if (footprint == Footprint::kWindow && window_radius < 0)
      throw ConfigError("window radius must be >= 0");
  }
};

struct GanConfig {
  int image_side = 64;
  int noise_channels = 8;
  int base_channels = 64;
  int depth = 4;  // down/up stages
  double learning_rate_g = 2e-4;
  double learning_rate_d = 2e-4;
  int batch_size = 16;
  long steps = 0;
  std::uint64_t seed = 0;
  bool flip_augment = false;
  AttentionConfig::Footprint attention_footprint = AttentionConfig::Footprint::kGlobal;
  int attention_radius = 0;

  int bottleneck_side() const { return image_side >> depth; }

  void validate() const {
    if (depth < 1) throw ConfigError("depth must be >= 1");
    if (image_side % (1 << depth) != 0 || bottleneck_side() < 4)
      throw ConfigError("image_side must be 2^depth * bottleneck with bottleneck >= 4");
    if (noise_channels < 1) throw ConfigError("noise_channels must be >= 1");
    if (base_channels < 4) throw ConfigError("base_channels must be >= 4");
    if (learning_rate_g <= 0 || learning_rate_d <= 0) throw ConfigError("learning rates must be > 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (steps < 0) throw ConfigError("steps must be >= 0");
  }

  // Channel width of stage i, capped at 8x base.
  int stage_channels(int i) const {
    const int mult = i >= 3 ? 8 : (1 << i);
    return base_channels * mult;
  }
};

}  // namespace pigment::sagan
