// End-to-end orchestration: ingest -> features -> train GAN -> sample ->
// train SR -> super-resolve -> graph -> sequence -> compose -> render,
// with content-hash stage caching inside a run directory and a report.json
// capturing configs, seeds, timings and headline numbers.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pigment/atelier.hpp"
#include "pigment/palette.hpp"
#include "pigment/sagan/config.hpp"
#include "pigment/sasr/config.hpp"

namespace pigment::pipeline {

struct GraphParams {
  int k = 8;
  int hidden_dim = 64;
  int embedding_dim = 16;
  long steps = 500;
};

struct ScheduleParams {
  int frames_per_transition = 12;
  int fps = 24;
  bool synchronous = false;
};

struct PipelineConfig {
  std::string manifest_path;
  std::uint64_t seed = 0;
  int sample_count = 196;
  int features_k = 4;  // dominant-color clusters in style vectors
  sagan::GanConfig gan;
  sasr::SrConfig sr;
  GraphParams graph;
  atelier::MosaicSpec mosaic;  // tile_side is derived: gan side * sr scale
  ScheduleParams schedule;

  void validate() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);

  // Paper-scale shape: 196 samples, 14x14 mosaic, 256 -> 1024 via f=4.
  static PipelineConfig full_profile();
  // Small everything; minutes on a desktop CPU.
  static PipelineConfig toy_profile();
};

struct StageReport {
  std::string name;
  double seconds = 0.0;
  bool cached = false;
};

struct RunReport {
  std::vector<StageReport> stages;
  double total_seconds = 0.0;
  nlohmann::json details;
};

// Executes all stages in order inside run_dir. Completed stages whose inputs
// and config subsection are unchanged are skipped unless force is set. Any
// stage failure aborts with a stage-tagged Error; partial outputs remain.
RunReport run_pipeline(const PipelineConfig& config, const std::string& run_dir,
                       bool force = false);

// {"path": ..., "style_vector": [...], "layout": {...}} for one image.
nlohmann::json feature_record_json(const std::string& path, const palette::StyleVector& sv);

}  // namespace pigment::pipeline
