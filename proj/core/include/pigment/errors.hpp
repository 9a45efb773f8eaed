// Error taxonomy shared by every module. All failures surface as typed
// exceptions derived from pigment::Error so the CLI can tag diagnostics.

#pragma once

#include <stdexcept>
#include <string>

namespace pigment {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IngestError : Error {
  using Error::Error;
};

struct ManifestError : Error {
  ManifestError(const std::string& msg, int line)
      : Error("manifest line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

struct VocabError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct DescriptorError : Error {
  using Error::Error;
};

struct RangeError : Error {
  using Error::Error;
};

struct DivergenceError : Error {
  DivergenceError(const std::string& msg, long step)
      : Error(msg + " (step " + std::to_string(step) + ")"), step(step) {}
  long step;
};

}  // namespace pigment
