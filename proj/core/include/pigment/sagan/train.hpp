// Alternating GAN training: one discriminator step and one generator step
// per batch, Adam(0.5, 0.999) on both nets. Losses are evaluated in logit
// space (softplus forms of the clamped-log objective) for stability; the
// logged values equal gan_losses() on the corresponding probabilities.

#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "pigment/corpus.hpp"
#include "pigment/errors.hpp"
#include "pigment/sagan/model.hpp"

namespace pigment::sagan {

struct TrainLogRow {
  long step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
};

template <typename T>
Tensor<T> flip_horizontal_hwc(const Tensor<T>& img) {
  const int h = img.dim(0), w = img.dim(1), c = img.dim(2);
  Tensor<T> out({h, w, c});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k) out.at(y, x, k) = img.at(y, w - 1 - x, k);
  return out;
}

template <typename T>
std::vector<TrainLogRow> train_gan(GanModel<T>& model, const corpus::Corpus& data,
                                   std::ostream* csv = nullptr) {
  if (data.records.empty()) throw ConfigError("training corpus is empty");
  if (data.country_vocab.size() != model.country_vocab.size() ||
      data.style_vocab.size() != model.style_vocab.size())
    throw ShapeError("corpus vocabularies do not match model");
  for (const auto& rec : data.records)
    if (rec.side() != model.config.image_side)
      throw ShapeError("corpus image side does not match config");

  const int batch = model.config.batch_size;
  const int n = data.size();
  std::vector<TrainLogRow> rows;
  if (csv) *csv << "step,d_loss,g_loss\n";

  for (long step = 0; step < model.config.steps; ++step) {
    std::vector<int> idx(static_cast<std::size_t>(batch));
    std::vector<bool> flip(static_cast<std::size_t>(batch), false);
    for (int b = 0; b < batch; ++b) {
      idx[static_cast<std::size_t>(b)] = model.rng.uniform_int(n);
      if (model.config.flip_augment) flip[static_cast<std::size_t>(b)] = model.rng.uniform() < 0.5;
    }

    // Discriminator step; fakes are detached values.
    nn::Var<T> d_sum;
    std::vector<corpus::ConditionVector> conds(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      const auto& rec = data.records[static_cast<std::size_t>(idx[static_cast<std::size_t>(b)])];
      conds[static_cast<std::size_t>(b)] = corpus::encode_condition(rec, data);
      const auto& cond = conds[static_cast<std::size_t>(b)];

      Tensor<float> real_hwc = flip[static_cast<std::size_t>(b)] ? flip_horizontal_hwc(rec.pixels) : rec.pixels;
      const Tensor<T> real = hwc_to_chw(tensor_cast<float, T>(real_hwc));

      const Tensor<T> fake =
          generator_graph(model, generator_input(model, draw_noise<T>(model.rng, model.config), cond))
              ->value;

      nn::Var<T> l_real = discriminator_logit_graph(model, nn::constant(real), cond);
      nn::Var<T> l_fake = discriminator_logit_graph(model, nn::constant(fake), cond);
      nn::Var<T> term = nn::add(nn::softplus(nn::neg(l_real)), nn::softplus(l_fake));
      d_sum = d_sum ? nn::add(d_sum, term) : term;
    }
    nn::Var<T> d_loss = nn::scale(d_sum, T(1) / static_cast<T>(batch));
    nn::backward(d_loss);
    model.opt_d.step();
    model.opt_d.zero_grads();
    model.opt_g.zero_grads();

    // Generator step with fresh noise, same conditions.
    nn::Var<T> g_sum;
    for (int b = 0; b < batch; ++b) {
      const auto& cond = conds[static_cast<std::size_t>(b)];
      nn::Var<T> fake =
          generator_graph(model, generator_input(model, draw_noise<T>(model.rng, model.config), cond));
      nn::Var<T> l_fake = discriminator_logit_graph(model, fake, cond);
      nn::Var<T> term = nn::softplus(nn::neg(l_fake));
      g_sum = g_sum ? nn::add(g_sum, term) : term;
    }
    nn::Var<T> g_loss = nn::scale(g_sum, T(1) / static_cast<T>(batch));
    nn::backward(g_loss);
    model.opt_g.step();
    model.opt_g.zero_grads();
    model.opt_d.zero_grads();

    TrainLogRow row{model.step, static_cast<double>(d_loss->value[0]),
                    static_cast<double>(g_loss->value[0])};
    if (!std::isfinite(row.d_loss) || !std::isfinite(row.g_loss))
      throw DivergenceError("non-finite loss", model.step);
    rows.push_back(row);
    if (csv) *csv << row.step << ',' << row.d_loss << ',' << row.g_loss << '\n';
    ++model.step;
  }
  return rows;
}

}  // namespace pigment::sagan
