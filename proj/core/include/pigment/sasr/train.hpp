// Supervised super-resolution training on pairs built by the degradation
// model itself: Y = DS(X). Loss is mean||Z - X||^2 plus lambda times the
// degradation residual mean||Y - DS(Z)||^2.

#pragma once

#include <cmath>
#include <memory>
#include <ostream>
#include <vector>

#include "pigment/corpus.hpp"
#include "pigment/sasr/model.hpp"

namespace pigment::sasr {

struct SrLogRow {
  long step = 0;
  double loss = 0.0;
  double recon = 0.0;
  double degradation = 0.0;
};

template <typename T>
std::vector<SrLogRow> train_sr(SrModel<T>& model, const corpus::Corpus& data,
                               std::ostream* csv = nullptr) {
  if (data.records.empty()) throw ConfigError("training corpus is empty");
  const int f = model.config.scale;
  for (const auto& rec : data.records) {
    if (rec.side() % f != 0) throw ShapeError("corpus image side must be divisible by the scale");
    if (rec.side() != data.records.front().side())
      throw ShapeError("corpus images must share one side length");
  }

  // Precompute (X, Y = DS(X)) pairs in CHW.
  std::vector<Tensor<T>> hr, lr;
  for (const auto& rec : data.records) {
    const Tensor<T> x_hwc = tensor_cast<float, T>(rec.pixels);
    hr.push_back(hwc_to_chw(x_hwc));
    lr.push_back(hwc_to_chw(bicubic_downsample(x_hwc, f)));
  }
  const int side = data.records.front().side();
  const auto row_plan = std::make_shared<const AxisPlan>(make_axis_plan(side, side / f, true));
  const auto col_plan = row_plan;

  const int batch = model.config.batch_size;
  const int n = data.size();
  std::vector<SrLogRow> rows;
  if (csv) *csv << "step,loss,recon_loss,degradation_loss\n";

  for (long step = 0; step < model.config.steps; ++step) {
    nn::Var<T> recon_sum, deg_sum;
    for (int b = 0; b < batch; ++b) {
      const int i = model.rng.uniform_int(n);
      nn::Var<T> z = sasr_graph(model, lr[static_cast<std::size_t>(i)]);

      nn::Var<T> diff = nn::sub(z, nn::constant(hr[static_cast<std::size_t>(i)]));
      nn::Var<T> recon = nn::mean_all(nn::mul(diff, diff));

      nn::Var<T> ds = nn::clamp_unit(nn::resample(z, row_plan, col_plan));
      nn::Var<T> dres = nn::sub(nn::constant(lr[static_cast<std::size_t>(i)]), ds);
      nn::Var<T> deg = nn::mean_all(nn::mul(dres, dres));

      recon_sum = recon_sum ? nn::add(recon_sum, recon) : recon;
      deg_sum = deg_sum ? nn::add(deg_sum, deg) : deg;
    }
    const T inv_b = T(1) / static_cast<T>(batch);
    nn::Var<T> recon_mean = nn::scale(recon_sum, inv_b);
    nn::Var<T> deg_mean = nn::scale(deg_sum, inv_b);
    nn::Var<T> loss =
        nn::add(recon_mean, nn::scale(deg_mean, static_cast<T>(model.config.lambda_degradation)));

    nn::backward(loss);
    model.opt.step();
    model.opt.zero_grads();

    SrLogRow row{model.step, static_cast<double>(loss->value[0]),
                 static_cast<double>(recon_mean->value[0]),
                 static_cast<double>(deg_mean->value[0])};
    if (!std::isfinite(row.loss)) throw DivergenceError("non-finite loss", model.step);
    rows.push_back(row);
    if (csv) *csv << row.step << ',' << row.loss << ',' << row.recon << ',' << row.degradation << '\n';
    ++model.step;
  }
  return rows;
}

}  // namespace pigment::sasr
