#include "pigment/sasr/checkpoint.hpp"

#include <map>

#include "pigment/checkpoint.hpp"

namespace pigment::sasr {

using json = nlohmann::json;

json sr_config_to_json(const SrConfig& c) {
  return {{"scale", c.scale},
          {"conv_layers", c.conv_layers},
          {"channels", c.channels},
          {"attention_reduction", c.attention_reduction},
          {"learning_rate", c.learning_rate},
          {"lambda_degradation", c.lambda_degradation},
          {"batch_size", c.batch_size},
          {"steps", c.steps},
          {"seed", c.seed}};
}

SrConfig sr_config_from_json(const json& j) {
  SrConfig c;
  c.scale = j.value("scale", c.scale);
  c.conv_layers = j.value("conv_layers", c.conv_layers);
  c.channels = j.value("channels", c.channels);
  c.attention_reduction = j.value("attention_reduction", c.attention_reduction);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.lambda_degradation = j.value("lambda_degradation", c.lambda_degradation);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.steps = j.value("steps", c.steps);
  c.seed = j.value("seed", c.seed);
  return c;
}

void save_sr(const SrModel<float>& model, const std::string& dir) {
  CheckpointData data;
  data.kind = "sr";
  data.config = sr_config_to_json(model.config);
  data.rng_state = model.rng.serialize();
  data.step = model.step;
  for (const auto& [name, var] : model.params.items()) data.params.emplace_back(name, var->value);
  for (std::size_t i = 0; i < model.params.items().size(); ++i) {
    const auto& name = model.params.items()[i].first;
    data.extras.emplace_back("m/" + name, model.opt.moment1()[i]);
    data.extras.emplace_back("v/" + name, model.opt.moment2()[i]);
  }
  data.meta = {{"opt_steps", model.opt.step_count()}};
  save_checkpoint(dir, data);
}

SrModel<float> load_sr(const std::string& dir) {
  const CheckpointData data = load_checkpoint(dir);
  if (data.kind != "sr") throw Error("checkpoint kind is not sr: " + dir);

  SrModel<float> model(sr_config_from_json(data.config));
  if (data.params.size() != model.params.items().size())
    throw Error("checkpoint parameter count mismatch");
  for (std::size_t i = 0; i < data.params.size(); ++i) {
    const auto& [name, tensor] = data.params[i];
    const auto& [expect_name, var] = model.params.items()[i];
    if (name != expect_name || !tensor.same_shape(var->value))
      throw Error("checkpoint parameter mismatch at " + name);
    var->value = tensor;
  }

  std::map<std::string, const Tensor<float>*> extras;
  for (const auto& [name, tensor] : data.extras) extras[name] = &tensor;
  for (std::size_t i = 0; i < model.params.items().size(); ++i) {
    const auto& name = model.params.items()[i].first;
    const auto m = extras.find("m/" + name);
    const auto v = extras.find("v/" + name);
    if (m == extras.end() || v == extras.end()) throw Error("checkpoint missing moments for " + name);
    model.opt.moment1()[i] = *m->second;
    model.opt.moment2()[i] = *v->second;
  }
  model.opt.set_step_count(data.meta.value("opt_steps", 0L));
  model.rng.deserialize(data.rng_state);
  model.step = data.step;
  return model;
}

}  // namespace pigment::sasr
