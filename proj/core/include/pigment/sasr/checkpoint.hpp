#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "pigment/sasr/model.hpp"

namespace pigment::sasr {

nlohmann::json sr_config_to_json(const SrConfig& config);
SrConfig sr_config_from_json(const nlohmann::json& j);

void save_sr(const SrModel<float>& model, const std::string& dir);
SrModel<float> load_sr(const std::string& dir);

}  // namespace pigment::sasr
