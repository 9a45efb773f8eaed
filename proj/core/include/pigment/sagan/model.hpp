// Conditional self-attention GAN. The generator is an encoder-decoder with
// skip connections: condition one-hots enter as constant spatial planes
// concatenated to a spatial noise field, stride-2 convolutions halve the map
// `depth` times, one self-attention block sits at the bottleneck, and
// transposed convolutions double the map back up to a tanh image head. The
// discriminator is a stride-2 stack with a self-attention block at its first
// stage of side <= 32 and a sigmoid probability head.

#pragma once

#include <string>
#include <vector>

#include "pigment/corpus.hpp"
#include "pigment/nn/adam.hpp"
#include "pigment/nn/conv.hpp"
#include "pigment/nn/params.hpp"
#include "pigment/rng.hpp"
#include "pigment/sagan/attention.hpp"
#include "pigment/sagan/config.hpp"

namespace pigment::sagan {

template <typename T>
struct GanModel {
  GanConfig config;
  std::vector<std::string> country_vocab;
  std::vector<std::string> style_vocab;
  nn::ParamStore<T> params;
  nn::Adam<T> opt_g, opt_d;
  Rng rng;  // training stream
  long step = 0;

  GanModel(const GanConfig& cfg, std::vector<std::string> countries, std::vector<std::string> styles)
      : config(cfg),
        country_vocab(std::move(countries)),
        style_vocab(std::move(styles)),
        rng(derive_seed(cfg.seed, 1)) {
    config.validate();
    Rng init(derive_seed(cfg.seed, 0));
    build_generator(init);
    build_discriminator(init);
    opt_g = nn::Adam<T>(params.with_prefix("g/"), config.learning_rate_g, 0.5, 0.999);
    opt_d = nn::Adam<T>(params.with_prefix("d/"), config.learning_rate_d, 0.5, 0.999);
  }

  int condition_channels() const {
    return static_cast<int>(country_vocab.size() + style_vocab.size());
  }

  // Discriminator attention sits at the first stage whose output side is <= 32.
  int attention_stage() const {
    for (int i = 0; i < config.depth; ++i)
      if ((config.image_side >> (i + 1)) <= 32) return i;
    return config.depth - 1;
  }

  AttentionConfig block_attention(int channels) const {
    AttentionConfig a;
    a.footprint = config.attention_footprint;
    a.window_radius = config.attention_radius;
    a.key_dim = std::max(1, channels / 8);
    a.value_dim = std::max(1, channels / 2);
    return a;
  }

  AttentionParams<T> attention_params(const std::string& prefix) const {
    return {params.at(prefix + "/wq"), params.at(prefix + "/wk"), params.at(prefix + "/wv"),
            params.at(prefix + "/wo")};
  }

 private:
  void add_attention(const std::string& prefix, int channels, Rng& init) {
    const AttentionConfig a = block_attention(channels);
    params.add(prefix + "/wq", nn::normal_init<T>({channels, a.key_dim}, 0.02, init));
    params.add(prefix + "/wk", nn::normal_init<T>({channels, a.key_dim}, 0.02, init));
    params.add(prefix + "/wv", nn::normal_init<T>({channels, a.value_dim}, 0.02, init));
    // Zero output projection: the block starts as an identity residual.
    params.add(prefix + "/wo", Tensor<T>({a.value_dim, channels}));
  }

  void add_norm(const std::string& prefix, int channels) {
    params.add(prefix + "/gamma", Tensor<T>::full({channels}, T(1)));
    params.add(prefix + "/beta", Tensor<T>({channels}));
  }

  void build_generator(Rng& init) {
    const int d = config.depth;
    int in_ch = config.noise_channels + condition_channels();
    for (int i = 0; i < d; ++i) {
      const int out_ch = config.stage_channels(i);
      params.add("g/enc" + std::to_string(i) + "/w",
                 nn::normal_init<T>({out_ch, in_ch, 4, 4}, 0.02, init));
      params.add("g/enc" + std::to_string(i) + "/b", Tensor<T>({out_ch}));
      if (i > 0) add_norm("g/enc" + std::to_string(i) + "/norm", out_ch);
      in_ch = out_ch;
    }

    add_attention("g/attn", config.stage_channels(d - 1), init);

    int cur = config.stage_channels(d - 1);
    for (int i = d - 1; i >= 1; --i) {
      const std::string p = "g/dec" + std::to_string(i);
      const int out_ch = config.stage_channels(i - 1);
      params.add(p + "/deconv/w", nn::normal_init<T>({cur, out_ch, 4, 4}, 0.02, init));
      params.add(p + "/deconv/b", Tensor<T>({out_ch}));
      add_norm(p + "/norm", out_ch);
      params.add(p + "/fuse/w", nn::normal_init<T>({out_ch, 2 * out_ch, 3, 3}, 0.02, init));
      params.add(p + "/fuse/b", Tensor<T>({out_ch}));
      add_norm(p + "/fuse_norm", out_ch);
      cur = out_ch;
    }
    params.add("g/dec0/deconv/w",
               nn::normal_init<T>({cur, config.base_channels, 4, 4}, 0.02, init));
    params.add("g/dec0/deconv/b", Tensor<T>({config.base_channels}));
    add_norm("g/dec0/norm", config.base_channels);
    params.add("g/out/w", nn::normal_init<T>({3, config.base_channels, 3, 3}, 0.02, init));
    params.add("g/out/b", Tensor<T>({3}));
  }

  void build_discriminator(Rng& init) {
    const int d = config.depth;
    int in_ch = 3 + condition_channels();
    for (int i = 0; i < d; ++i) {
      const int out_ch = config.stage_channels(i);
      params.add("d/stage" + std::to_string(i) + "/w",
                 nn::normal_init<T>({out_ch, in_ch, 4, 4}, 0.02, init));
      params.add("d/stage" + std::to_string(i) + "/b", Tensor<T>({out_ch}));
      in_ch = out_ch;
    }
    add_attention("d/attn", config.stage_channels(attention_stage()), init);
    // Zero-initialized head: an untrained discriminator answers exactly 0.5.
    params.add("d/head/w", Tensor<T>({config.stage_channels(d - 1), 1}));
    params.add("d/head/b", Tensor<T>({1}));
  }
};

// Constant condition planes: one spatial plane per vocabulary entry, set to
// the one-hot value everywhere.
template <typename T>
Tensor<T> condition_planes(const corpus::ConditionVector& cond, int side) {
  const int nc = static_cast<int>(cond.country_onehot.size());
  const int ns = static_cast<int>(cond.style_onehot.size());
  Tensor<T> planes({nc + ns, side, side});
  const std::int64_t hw = static_cast<std::int64_t>(side) * side;
  for (int c = 0; c < nc; ++c) {
    T* plane = planes.data() + static_cast<std::int64_t>(c) * hw;
    std::fill(plane, plane + hw, static_cast<T>(cond.country_onehot[static_cast<std::size_t>(c)]));
  }
  for (int c = 0; c < ns; ++c) {
    T* plane = planes.data() + static_cast<std::int64_t>(nc + c) * hw;
    std::fill(plane, plane + hw, static_cast<T>(cond.style_onehot[static_cast<std::size_t>(c)]));
  }
  return planes;
}

template <typename T>
void check_condition(const GanModel<T>& m, const corpus::ConditionVector& cond) {
  if (cond.country_onehot.size() != m.country_vocab.size() ||
      cond.style_onehot.size() != m.style_vocab.size())
    throw ShapeError("condition vector does not match model vocabularies");
}

// Network input assembled from a {noise_channels, side, side} field and the
// condition planes. Exposed so tests can check the conditioning wiring.
template <typename T>
Tensor<T> generator_input(const GanModel<T>& m, const Tensor<T>& noise_chw,
                          const corpus::ConditionVector& cond) {
  check_condition(m, cond);
  const int s = m.config.image_side;
  if (noise_chw.rank() != 3 || noise_chw.dim(0) != m.config.noise_channels ||
      noise_chw.dim(1) != s || noise_chw.dim(2) != s)
    throw ShapeError("noise field shape does not match config");
  const Tensor<T> planes = condition_planes<T>(cond, s);
  Tensor<T> input({noise_chw.dim(0) + planes.dim(0), s, s});
  std::copy(noise_chw.data(), noise_chw.data() + noise_chw.size(), input.data());
  std::copy(planes.data(), planes.data() + planes.size(), input.data() + noise_chw.size());
  return input;
}

template <typename T>
nn::Var<T> generator_graph(const GanModel<T>& m, const Tensor<T>& input) {
  const int d = m.config.depth;
  nn::Var<T> x = nn::constant(input);
  std::vector<nn::Var<T>> skips;
  for (int i = 0; i < d; ++i) {
    const std::string p = "g/enc" + std::to_string(i);
    x = nn::conv2d(x, m.params.at(p + "/w"), m.params.at(p + "/b"), 2, 1);
    if (i > 0)
      x = nn::instance_norm(x, m.params.at(p + "/norm/gamma"), m.params.at(p + "/norm/beta"));
    x = nn::leaky_relu(x, T(0.2));
    skips.push_back(x);
  }

  x = self_attention_chw(x, m.attention_params("g/attn"),
                         m.block_attention(m.config.stage_channels(d - 1)));

  for (int i = d - 1; i >= 1; --i) {
    const std::string p = "g/dec" + std::to_string(i);
    x = nn::conv2d_transpose(x, m.params.at(p + "/deconv/w"), m.params.at(p + "/deconv/b"), 2, 1);
    x = nn::instance_norm(x, m.params.at(p + "/norm/gamma"), m.params.at(p + "/norm/beta"));
    x = nn::relu(x);
    x = nn::concat_channels(x, skips[static_cast<std::size_t>(i - 1)]);
    x = nn::conv2d(x, m.params.at(p + "/fuse/w"), m.params.at(p + "/fuse/b"), 1, 1);
    x = nn::instance_norm(x, m.params.at(p + "/fuse_norm/gamma"),
                          m.params.at(p + "/fuse_norm/beta"));
    x = nn::relu(x);
  }
  x = nn::conv2d_transpose(x, m.params.at("g/dec0/deconv/w"), m.params.at("g/dec0/deconv/b"), 2, 1);
  x = nn::instance_norm(x, m.params.at("g/dec0/norm/gamma"), m.params.at("g/dec0/norm/beta"));
  x = nn::relu(x);
  x = nn::conv2d(x, m.params.at("g/out/w"), m.params.at("g/out/b"), 1, 1);
  return nn::tanh_op(x);
}

template <typename T>
nn::Var<T> discriminator_logit_graph(const GanModel<T>& m, const nn::Var<T>& image,
                                     const corpus::ConditionVector& cond) {
  check_condition(m, cond);
  const int s = m.config.image_side;
  if (image->value.rank() != 3 || image->value.dim(0) != 3 || image->value.dim(1) != s ||
      image->value.dim(2) != s)
    throw ShapeError("discriminator input must be {3, side, side}");

  nn::Var<T> x = nn::concat_channels(image, nn::constant(condition_planes<T>(cond, s)));
  const int attn_at = m.attention_stage();
  for (int i = 0; i < m.config.depth; ++i) {
    const std::string p = "d/stage" + std::to_string(i);
    x = nn::conv2d(x, m.params.at(p + "/w"), m.params.at(p + "/b"), 2, 1);
    x = nn::leaky_relu(x, T(0.2));
    if (i == attn_at)
      x = self_attention_chw(x, m.attention_params("d/attn"),
                             m.block_attention(m.config.stage_channels(i)));
  }
  nn::Var<T> pooled = nn::global_avg_pool(x);
  nn::Var<T> logit = nn::matmul(nn::reshape(pooled, {1, pooled->value.dim(0)}),
                                m.params.at("d/head/w"));
  return nn::add(logit, nn::reshape(m.params.at("d/head/b"), {1, 1}));
}

// noise {side, side, noise_channels} -> image {side, side, 3} in [-1,1].
template <typename T>
Tensor<T> generator_forward(const GanModel<T>& m, const Tensor<T>& noise_hwc,
                            const corpus::ConditionVector& cond) {
  if (noise_hwc.rank() != 3) throw ShapeError("noise must be {side, side, noise_channels}");
  const Tensor<T> input = generator_input(m, hwc_to_chw(noise_hwc), cond);
  return chw_to_hwc(generator_graph(m, input)->value);
}

// image {side, side, 3} in [-1,1] -> probability the image is real.
template <typename T>
T discriminator_forward(const GanModel<T>& m, const Tensor<T>& image_hwc,
                        const corpus::ConditionVector& cond) {
  if (image_hwc.rank() != 3 || image_hwc.dim(2) != 3)
    throw ShapeError("discriminator input must be {side, side, 3}");
  const nn::Var<T> logit =
      discriminator_logit_graph(m, nn::constant(hwc_to_chw(image_hwc)), cond);
  const T l = logit->value[0];
  return l >= T(0) ? T(1) / (T(1) + std::exp(-l)) : std::exp(l) / (T(1) + std::exp(l));
}

template <typename T>
Tensor<T> draw_noise(Rng& rng, const GanConfig& config) {
  Tensor<T> noise({config.noise_channels, config.image_side, config.image_side});
  for (std::int64_t i = 0; i < noise.size(); ++i) noise[i] = static_cast<T>(rng.normal());
  return noise;
}

// n seeded draws through the generator; deterministic in (model, seed).
template <typename T>
std::vector<Tensor<T>> sample(const GanModel<T>& m, int n, const corpus::ConditionVector& cond,
                              std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample count must be >= 1");
  check_condition(m, cond);
  Rng rng(seed);
  std::vector<Tensor<T>> images;
  images.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Tensor<T> input = generator_input(m, draw_noise<T>(rng, m.config), cond);
    images.push_back(chw_to_hwc(generator_graph(m, input)->value));
  }
  return images;
}

}  // namespace pigment::sagan
