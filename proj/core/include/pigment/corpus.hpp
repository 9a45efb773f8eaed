// Dataset ingestion: square [-1,1] pixel tensors with country/style labels,
// loaded from a JSON Lines manifest ({"path","country","style"} per line).

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pigment/tensor.hpp"

namespace pigment::corpus {

struct CanvasRecord {
  Tensor<float> pixels;  // {side, side, 3}, every component in [-1,1]
  std::string country_label;
  std::string style_label;
  std::string source_path;

  int side() const { return pixels.dim(0); }
};

struct ConditionVector {
  std::vector<float> country_onehot;
  std::vector<float> style_onehot;
};

struct Corpus {
  std::vector<CanvasRecord> records;
  std::vector<std::string> country_vocab;  // sorted, deduplicated
  std::vector<std::string> style_vocab;    // sorted, deduplicated

  int size() const { return static_cast<int>(records.size()); }
};

// Decodes, resizes to side x side (bicubic, anti-aliased) and normalizes.
// side < 8 -> ConfigError; undecodable file -> IngestError.
CanvasRecord ingest_image(const std::string& path, int side,
                          const std::string& country = "", const std::string& style = "");

// Reads a JSON Lines manifest and ingests every referenced image at the
// given side. Missing fields or files raise ManifestError with the line.
Corpus load_manifest(const std::string& path, int side);

// One-hot encodings at the sorted-vocabulary index of each label.
ConditionVector encode_condition(const CanvasRecord& record, const Corpus& corpus);
ConditionVector make_condition(const std::string& country, const std::string& style,
                               const Corpus& corpus);

// Argmax back to labels; inverse of encode_condition on vocabulary labels.
std::pair<std::string, std::string> decode_condition(const ConditionVector& cond,
                                                     const Corpus& corpus);

// Seed-determined disjoint partition (train, holdout); holdout size is
// floor(N * holdout_fraction). Both halves share the parent vocabularies.
std::pair<Corpus, Corpus> split(const Corpus& corpus, double holdout_fraction,
                                std::uint64_t seed);

int vocab_index(const std::string& label, const std::vector<std::string>& vocab);

}  // namespace pigment::corpus
