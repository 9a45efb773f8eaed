#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "pigment/sagan/model.hpp"

namespace pigment::sagan {

nlohmann::json gan_config_to_json(const GanConfig& config);
GanConfig gan_config_from_json(const nlohmann::json& j);

void save_gan(const GanModel<float>& model, const std::string& dir);
GanModel<float> load_gan(const std::string& dir);

}  // namespace pigment::sagan
