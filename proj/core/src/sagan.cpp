#include "pigment/sagan/checkpoint.hpp"

#include <map>

#include "pigment/checkpoint.hpp"

namespace pigment::sagan {

using json = nlohmann::json;

json gan_config_to_json(const GanConfig& c) {
  return {{"image_side", c.image_side},
          {"noise_channels", c.noise_channels},
          {"base_channels", c.base_channels},
          {"depth", c.depth},
          {"learning_rate_g", c.learning_rate_g},
          {"learning_rate_d", c.learning_rate_d},
          {"batch_size", c.batch_size},
          {"steps", c.steps},
          {"seed", c.seed},
          {"flip_augment", c.flip_augment},
          {"attention_footprint",
           c.attention_footprint == AttentionConfig::Footprint::kGlobal ? "global" : "window"},
          {"attention_radius", c.attention_radius}};
}

GanConfig gan_config_from_json(const json& j) {
  GanConfig c;
  c.image_side = j.value("image_side", c.image_side);
  c.noise_channels = j.value("noise_channels", c.noise_channels);
  c.base_channels = j.value("base_channels", c.base_channels);
  c.depth = j.value("depth", c.depth);
  c.learning_rate_g = j.value("learning_rate_g", c.learning_rate_g);
  c.learning_rate_d = j.value("learning_rate_d", c.learning_rate_d);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.steps = j.value("steps", c.steps);
  c.seed = j.value("seed", c.seed);
  c.flip_augment = j.value("flip_augment", c.flip_augment);
  c.attention_footprint = j.value("attention_footprint", std::string("global")) == "window"
                              ? AttentionConfig::Footprint::kWindow
                              : AttentionConfig::Footprint::kGlobal;
  c.attention_radius = j.value("attention_radius", c.attention_radius);
  return c;
}

namespace {

void collect_moments(const nn::ParamStore<float>& store, const std::string& prefix,
                     const nn::Adam<float>& opt, CheckpointData& data) {
  std::size_t slot = 0;
  for (const auto& [name, var] : store.items()) {
    if (name.rfind(prefix, 0) != 0) continue;
    data.extras.emplace_back("m/" + name, opt.moment1()[slot]);
    data.extras.emplace_back("v/" + name, opt.moment2()[slot]);
    ++slot;
  }
}

void restore_moments(const nn::ParamStore<float>& store, const std::string& prefix,
                     nn::Adam<float>& opt,
                     const std::map<std::string, const Tensor<float>*>& extras) {
  std::size_t slot = 0;
  for (const auto& [name, var] : store.items()) {
    if (name.rfind(prefix, 0) != 0) continue;
    const auto m = extras.find("m/" + name);
    const auto v = extras.find("v/" + name);
    if (m == extras.end() || v == extras.end()) throw Error("checkpoint missing moments for " + name);
    opt.moment1()[slot] = *m->second;
    opt.moment2()[slot] = *v->second;
    ++slot;
  }
}

}  // namespace

void save_gan(const GanModel<float>& model, const std::string& dir) {
  CheckpointData data;
  data.kind = "gan";
  data.config = gan_config_to_json(model.config);
  data.country_vocab = model.country_vocab;
  data.style_vocab = model.style_vocab;
  data.rng_state = model.rng.serialize();
  data.step = model.step;
  for (const auto& [name, var] : model.params.items()) data.params.emplace_back(name, var->value);

  collect_moments(model.params, "g/", model.opt_g, data);
  collect_moments(model.params, "d/", model.opt_d, data);
  data.meta = {{"opt_g_steps", model.opt_g.step_count()}, {"opt_d_steps", model.opt_d.step_count()}};

  save_checkpoint(dir, data);
}

GanModel<float> load_gan(const std::string& dir) {
  const CheckpointData data = load_checkpoint(dir);
  if (data.kind != "gan") throw Error("checkpoint kind is not gan: " + dir);

  GanModel<float> model(gan_config_from_json(data.config), data.country_vocab, data.style_vocab);
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
  restore_moments(model.params, "g/", model.opt_g, extras);
  restore_moments(model.params, "d/", model.opt_d, extras);
  model.opt_g.set_step_count(data.meta.value("opt_g_steps", 0L));
  model.opt_d.set_step_count(data.meta.value("opt_d_steps", 0L));
  model.rng.deserialize(data.rng_state);
  model.step = data.step;
  return model;
}

}  // namespace pigment::sagan
