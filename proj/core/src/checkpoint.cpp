#include "pigment/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pigment/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian float32");

namespace pigment {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void write_blob(const fs::path& path, const Tensor<float>& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write blob: " + path.string());
  out.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(float)));
  if (!out) throw Error("short write: " + path.string());
}

Tensor<float> read_blob(const fs::path& path, const std::vector<int>& shape) {
  Tensor<float> t(shape);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read blob: " + path.string());
  in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(t.size() * sizeof(float)))
    throw Error("truncated blob: " + path.string());
  return t;
}

json describe(const std::vector<std::pair<std::string, Tensor<float>>>& tensors,
              const char* stem) {
  json arr = json::array();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    char file[32];
    std::snprintf(file, sizeof(file), "%s%04zu.bin", stem, i);
    arr.push_back({{"name", tensors[i].first},
                   {"shape", tensors[i].second.shape()},
                   {"dtype", "float32"},
                   {"file", file}});
  }
  return arr;
}

std::vector<std::pair<std::string, Tensor<float>>> read_described(const fs::path& dir,
                                                                  const json& arr) {
  std::vector<std::pair<std::string, Tensor<float>>> out;
  for (const auto& entry : arr) {
    if (entry.at("dtype").get<std::string>() != "float32")
      throw Error("unsupported checkpoint dtype");
    out.emplace_back(entry.at("name").get<std::string>(),
                     read_blob(dir / entry.at("file").get<std::string>(),
                               entry.at("shape").get<std::vector<int>>()));
  }
  return out;
}

}  // namespace

void save_checkpoint(const std::string& dir, const CheckpointData& data) {
  fs::create_directories(dir);
  const fs::path root(dir);

  json header;
  header["format"] = "pigment-checkpoint";
  header["version"] = 1;
  header["kind"] = data.kind;
  header["config"] = data.config;
  header["vocabularies"] = {{"country", data.country_vocab}, {"style", data.style_vocab}};
  header["rng_state"] = data.rng_state;
  header["step"] = data.step;
  header["meta"] = data.meta;
  header["params"] = describe(data.params, "p");
  header["extras"] = describe(data.extras, "x");

  for (std::size_t i = 0; i < data.params.size(); ++i) {
    char file[32];
    std::snprintf(file, sizeof(file), "p%04zu.bin", i);
    write_blob(root / file, data.params[i].second);
  }
  for (std::size_t i = 0; i < data.extras.size(); ++i) {
    char file[32];
    std::snprintf(file, sizeof(file), "x%04zu.bin", i);
    write_blob(root / file, data.extras[i].second);
  }

  std::ofstream out(root / "header.json");
  if (!out) throw Error("cannot write header.json in " + dir);
  out << header.dump(2) << '\n';
}

CheckpointData load_checkpoint(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream in(root / "header.json");
  if (!in) throw Error("missing header.json in " + dir);
  json header;
  try {
    in >> header;
  } catch (const json::exception& e) {
    throw Error(std::string("invalid header.json: ") + e.what());
  }
  if (header.value("format", "") != "pigment-checkpoint")
    throw Error("not a pigment checkpoint: " + dir);

  CheckpointData data;
  data.kind = header.at("kind").get<std::string>();
  data.config = header.at("config");
  data.country_vocab = header.at("vocabularies").at("country").get<std::vector<std::string>>();
  data.style_vocab = header.at("vocabularies").at("style").get<std::vector<std::string>>();
  data.rng_state = header.at("rng_state").get<std::string>();
  data.step = header.at("step").get<long>();
  data.meta = header.at("meta");
  data.params = read_described(root, header.at("params"));
  data.extras = read_described(root, header.at("extras"));
  return data;
}

}  // namespace pigment
