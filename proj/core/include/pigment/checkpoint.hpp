// Checkpoint directories: header.json describing names, shapes, config,
// vocabularies and RNG state, plus one little-endian float32 blob per
// parameter (and per optimizer moment tensor). Round-trips are bit-exact.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pigment/tensor.hpp"

namespace pigment {

struct CheckpointData {
  std::string kind;  // "gan" or "sr"
  nlohmann::json config;
  std::vector<std::pair<std::string, Tensor<float>>> params;
  std::vector<std::pair<std::string, Tensor<float>>> extras;  // optimizer moments
  std::vector<std::string> country_vocab;
  std::vector<std::string> style_vocab;
  std::string rng_state;
  long step = 0;
  nlohmann::json meta;
};

void save_checkpoint(const std::string& dir, const CheckpointData& data);
CheckpointData load_checkpoint(const std::string& dir);

}  // namespace pigment
