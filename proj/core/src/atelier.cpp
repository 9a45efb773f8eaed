#include "pigment/atelier.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pigment/errors.hpp"
#include "pigment/image_io.hpp"
#include "pigment/rng.hpp"

namespace pigment::atelier {

namespace fs = std::filesystem;
using json = nlohmann::json;

Tensor<float> compose_mosaic(const std::vector<Tensor<float>>& tiles, const MosaicSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.tile_side < 1 || spec.gutter < 0)
    throw ShapeError("invalid mosaic spec");
  if (static_cast<int>(tiles.size()) != spec.tile_count())
    throw ShapeError("tile count does not match rows*cols");
  for (const auto& t : tiles)
    if (t.rank() != 3 || t.dim(0) != spec.tile_side || t.dim(1) != spec.tile_side || t.dim(2) != 3)
      throw ShapeError("every tile must be {tile_side, tile_side, 3}");

  const int out_h = spec.rows * spec.tile_side + (spec.rows - 1) * spec.gutter;
  const int out_w = spec.cols * spec.tile_side + (spec.cols - 1) * spec.gutter;
  Tensor<float> out = Tensor<float>::full({out_h, out_w, 3}, -1.0f);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const auto& tile = tiles[static_cast<std::size_t>(r * spec.cols + c)];
      const int y0 = r * (spec.tile_side + spec.gutter);
      const int x0 = c * (spec.tile_side + spec.gutter);
      for (int y = 0; y < spec.tile_side; ++y)
        for (int x = 0; x < spec.tile_side; ++x)
          for (int k = 0; k < 3; ++k) out.at(y0 + y, x0 + x, k) = tile.at(y, x, k);
    }
  }
  return out;
}

Tensor<float> crop_tile(const Tensor<float>& mosaic, const MosaicSpec& spec, int row, int col) {
  if (row < 0 || row >= spec.rows || col < 0 || col >= spec.cols)
    throw ShapeError("crop_tile: tile index out of range");
  Tensor<float> tile({spec.tile_side, spec.tile_side, 3});
  const int y0 = row * (spec.tile_side + spec.gutter);
  const int x0 = col * (spec.tile_side + spec.gutter);
  for (int y = 0; y < spec.tile_side; ++y)
    for (int x = 0; x < spec.tile_side; ++x)
      for (int k = 0; k < 3; ++k) tile.at(y, x, k) = mosaic.at(y0 + y, x0 + x, k);
  return tile;
}

Tensor<float> interpolate_frames(const Tensor<float>& img_a, const Tensor<float>& img_b, double t) {
  if (!img_a.same_shape(img_b)) throw ShapeError("interpolate_frames: shape mismatch");
  if (!(t >= 0.0 && t <= 1.0)) throw RangeError("interpolation parameter must lie in [0,1]");
  if (t == 0.0) return img_a;
  if (t == 1.0) return img_b;
  Tensor<float> out(img_a.shape());
  const float ft = static_cast<float>(t);
  for (std::int64_t i = 0; i < out.size(); ++i)
    out[i] = (1.0f - ft) * img_a[i] + ft * img_b[i];
  return out;
}

FrameSchedule make_frame_schedule(const gradseq::Ordering& ordering, int frames_per_transition,
                                  bool synchronous, std::uint64_t seed) {
  if (frames_per_transition < 1) throw ConfigError("frames_per_transition must be >= 1");
  const int n = static_cast<int>(ordering.sequence.size());
  if (n < 1) throw ConfigError("ordering is empty");

  FrameSchedule schedule;
  schedule.ordering = ordering;
  schedule.frames_per_transition = frames_per_transition;
  schedule.total_frames = static_cast<long>(n - 1) * frames_per_transition;
  schedule.synchronous = synchronous;
  schedule.seed = seed;
  schedule.per_tile_phase.assign(static_cast<std::size_t>(n), 0);
  if (!synchronous) {
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
      schedule.per_tile_phase[static_cast<std::size_t>(i)] =
          rng.uniform_int(n * frames_per_transition);
  }
  return schedule;
}

Tensor<float> tile_at_frame(const std::vector<Tensor<float>>& paintings,
                            const FrameSchedule& schedule, int tile_index, long frame) {
  const int n = static_cast<int>(schedule.ordering.sequence.size());
  const int k = schedule.frames_per_transition;
  // Tile m starts m transitions into the ordering so a zero-phase schedule
  // shows the whole ordering at once, shifted one painting per tile.
  const long u = static_cast<long>(tile_index) * k +
                 schedule.per_tile_phase[static_cast<std::size_t>(tile_index)] + frame;
  const int idx = static_cast<int>((u / k) % n);
  const int next = (idx + 1) % n;
  const double t = static_cast<double>(u % k) / k;
  return interpolate_frames(paintings[static_cast<std::size_t>(schedule.ordering.sequence[static_cast<std::size_t>(idx)])],
                            paintings[static_cast<std::size_t>(schedule.ordering.sequence[static_cast<std::size_t>(next)])],
                            t);
}

RenderResult render_frames(const std::vector<Tensor<float>>& paintings,
                           const FrameSchedule& schedule, const MosaicSpec& spec,
                           const std::string& out_dir, int fps) {
  if (static_cast<int>(paintings.size()) != spec.tile_count() ||
      paintings.size() != schedule.ordering.sequence.size())
    throw ShapeError("painting count must match the mosaic and the ordering");
  fs::create_directories(out_dir);

  std::vector<Tensor<float>> tiles(static_cast<std::size_t>(spec.tile_count()));
  for (long frame = 0; frame < schedule.total_frames; ++frame) {
    for (int m = 0; m < spec.tile_count(); ++m)
      tiles[static_cast<std::size_t>(m)] = tile_at_frame(paintings, schedule, m, frame);
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06ld.png", frame);
    try {
      encode_png((fs::path(out_dir) / name).string(), compose_mosaic(tiles, spec));
    } catch (const Error& e) {
      throw Error("frame " + std::to_string(frame) + ": " + e.what());
    }
  }

  json manifest = {{"fps", fps},
                   {"frames_per_transition", schedule.frames_per_transition},
                   {"total_frames", schedule.total_frames},
                   {"rows", spec.rows},
                   {"cols", spec.cols},
                   {"tile_side", spec.tile_side},
                   {"gutter", spec.gutter},
                   {"seed", schedule.seed},
                   {"synchronous", schedule.synchronous},
                   {"order", schedule.ordering.sequence},
                   {"phases", schedule.per_tile_phase}};
  const std::string manifest_path = (fs::path(out_dir) / "frames.json").string();
  std::ofstream out(manifest_path);
  if (!out) throw Error("cannot write " + manifest_path);
  out << manifest.dump(2) << '\n';

  return {schedule.total_frames, manifest_path};
}

}  // namespace pigment::atelier
