#include "pigment/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "pigment/errors.hpp"
#include "pigment/image_io.hpp"
#include "pigment/rng.hpp"
#include "pigment/sasr/bicubic.hpp"

namespace pigment::corpus {

using json = nlohmann::json;

CanvasRecord ingest_image(const std::string& path, int side, const std::string& country,
                          const std::string& style) {
  if (side < 8) throw ConfigError("ingest side must be >= 8, got " + std::to_string(side));
  Tensor<float> decoded = decode_image(path);
  CanvasRecord record;
  record.pixels = sasr::resample_image(decoded, side, side);
  record.country_label = country;
  record.style_label = style;
  record.source_path = path;
  return record;
}

namespace {

std::vector<std::string> sorted_unique(std::set<std::string> labels) {
  return {labels.begin(), labels.end()};
}

}  // namespace

Corpus load_manifest(const std::string& path, int side) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest: " + path, 0);

  Corpus corpus;
  std::set<std::string> countries, styles;
  std::string line;
  int line_no = 0;
  const auto base_dir = std::filesystem::path(path).parent_path();

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::exception& e) {
      throw ManifestError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    for (const char* field : {"path", "country", "style"}) {
      if (!entry.contains(field) || !entry[field].is_string())
        throw ManifestError(std::string("missing field \"") + field + "\"", line_no);
    }

    std::filesystem::path img_path = entry["path"].get<std::string>();
    if (img_path.is_relative()) img_path = base_dir / img_path;
    if (!std::filesystem::exists(img_path))
      throw ManifestError("missing file: " + img_path.string(), line_no);

    try {
      corpus.records.push_back(ingest_image(img_path.string(), side,
                                            entry["country"].get<std::string>(),
                                            entry["style"].get<std::string>()));
    } catch (const IngestError& e) {
      throw ManifestError(e.what(), line_no);
    }
    countries.insert(corpus.records.back().country_label);
    styles.insert(corpus.records.back().style_label);
  }

  corpus.country_vocab = sorted_unique(std::move(countries));
  corpus.style_vocab = sorted_unique(std::move(styles));
  return corpus;
}

int vocab_index(const std::string& label, const std::vector<std::string>& vocab) {
  const auto it = std::lower_bound(vocab.begin(), vocab.end(), label);
  if (it == vocab.end() || *it != label) throw VocabError("unknown label: " + label);
  return static_cast<int>(it - vocab.begin());
}

ConditionVector make_condition(const std::string& country, const std::string& style,
                               const Corpus& corpus) {
  ConditionVector cond;
  cond.country_onehot.assign(corpus.country_vocab.size(), 0.0f);
  cond.style_onehot.assign(corpus.style_vocab.size(), 0.0f);
  cond.country_onehot[static_cast<std::size_t>(vocab_index(country, corpus.country_vocab))] = 1.0f;
  cond.style_onehot[static_cast<std::size_t>(vocab_index(style, corpus.style_vocab))] = 1.0f;
  return cond;
}

ConditionVector encode_condition(const CanvasRecord& record, const Corpus& corpus) {
  return make_condition(record.country_label, record.style_label, corpus);
}

std::pair<std::string, std::string> decode_condition(const ConditionVector& cond,
                                                     const Corpus& corpus) {
  const auto argmax = [](const std::vector<float>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  };
  return {corpus.country_vocab[argmax(cond.country_onehot)],
          corpus.style_vocab[argmax(cond.style_onehot)]};
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, double holdout_fraction,
                                std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw ConfigError("holdout fraction must lie in (0,1)");

  const int n = corpus.size();
  const int holdout_size = static_cast<int>(std::floor(n * holdout_fraction));

  Rng rng(seed);
  const std::vector<int> order = rng.permutation(n);
  std::vector<bool> in_holdout(static_cast<std::size_t>(n), false);
  for (int i = 0; i < holdout_size; ++i) in_holdout[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

  Corpus train, holdout;
  train.country_vocab = holdout.country_vocab = corpus.country_vocab;
  train.style_vocab = holdout.style_vocab = corpus.style_vocab;
  for (int i = 0; i < n; ++i) {
    (in_holdout[static_cast<std::size_t>(i)] ? holdout : train)
        .records.push_back(corpus.records[static_cast<std::size_t>(i)]);
  }
  return {train, holdout};
}

}  // namespace pigment::corpus
