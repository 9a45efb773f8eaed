// Composition of square tiles into a mosaic and rendering of the
// gradual-change frame sequence: each tile advances along the style ordering
// with a per-tile phase offset, linearly blending between consecutive
// paintings in [-1,1] pixel space.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pigment/gradseq.hpp"
#include "pigment/tensor.hpp"

namespace pigment::atelier {

struct MosaicSpec {
  int rows = 14;
  int cols = 14;
  int tile_side = 256;
  int gutter = 0;

  int tile_count() const { return rows * cols; }
};

struct FrameSchedule {
  gradseq::Ordering ordering;
  int frames_per_transition = 1;
  long total_frames = 0;            // (N-1) * frames_per_transition
  std::vector<int> per_tile_phase;  // each in [0, N * frames_per_transition)
  bool synchronous = false;
  std::uint64_t seed = 0;
};

// Row-major placement of rows*cols tiles; gutter pixels (black) between
// tiles when requested. Lossless: crop_tile recovers inputs bit-exactly.
Tensor<float> compose_mosaic(const std::vector<Tensor<float>>& tiles, const MosaicSpec& spec);
Tensor<float> crop_tile(const Tensor<float>& mosaic, const MosaicSpec& spec, int row, int col);

// Per-pixel (1-t)*a + t*b; t outside [0,1] -> RangeError.
Tensor<float> interpolate_frames(const Tensor<float>& img_a, const Tensor<float>& img_b, double t);

FrameSchedule make_frame_schedule(const gradseq::Ordering& ordering, int frames_per_transition,
                                  bool synchronous, std::uint64_t seed);

// Blended painting shown by tile `tile_index` at frame `frame`.
Tensor<float> tile_at_frame(const std::vector<Tensor<float>>& paintings,
                            const FrameSchedule& schedule, int tile_index, long frame);

struct RenderResult {
  long frames_written = 0;
  std::string manifest_path;
};

// Writes frame_000000.png ... plus frames.json into out_dir.
RenderResult render_frames(const std::vector<Tensor<float>>& paintings,
                           const FrameSchedule& schedule, const MosaicSpec& spec,
                           const std::string& out_dir, int fps);

}  // namespace pigment::atelier
