#include "pigment/gradseq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pigment/errors.hpp"
#include "pigment/nn/adam.hpp"
#include "pigment/nn/autodiff.hpp"
#include "pigment/nn/params.hpp"
#include "pigment/rng.hpp"

namespace pigment::gradseq {

namespace {

double row_dist2(const Tensor<double>& m, int i, int j) {
  const int d = m.dim(1);
  double acc = 0.0;
  for (int c = 0; c < d; ++c) {
    const double diff = m.at(i, c) - m.at(j, c);
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

StyleGraph build_graph(const std::vector<std::vector<double>>& style_vectors, int k) {
  const int n = static_cast<int>(style_vectors.size());
  if (n < 2) throw ConfigError("build_graph needs at least 2 nodes");
  if (k < 1 || k >= n) throw ConfigError("build_graph needs 1 <= k < N");
  const int d = static_cast<int>(style_vectors.front().size());
  for (const auto& v : style_vectors)
    if (static_cast<int>(v.size()) != d) throw ShapeError("style vectors must share one dimension");

  StyleGraph graph;
  graph.features = Tensor<double>({n, d});
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) graph.features.at(i, c) = style_vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];

  graph.adjacency = Tensor<double>({n, n});
  std::vector<std::pair<double, int>> cand;
  for (int i = 0; i < n; ++i) {
    cand.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) cand.push_back({row_dist2(graph.features, i, j), j});
    std::sort(cand.begin(), cand.end());
    for (int t = 0; t < k; ++t) {
      const int j = cand[static_cast<std::size_t>(t)].second;
      graph.adjacency.at(i, j) = 1.0;
      graph.adjacency.at(j, i) = 1.0;
    }
  }

  graph.degrees.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int deg = 1;  // self-loop
    for (int j = 0; j < n; ++j) deg += graph.adjacency.at(i, j) > 0.0 ? 1 : 0;
    graph.degrees[static_cast<std::size_t>(i)] = deg;
  }
  graph.norm_adjacency = normalize_adjacency(graph);
  return graph;
}

StyleGraph build_graph(const std::vector<palette::StyleVector>& style_vectors, int k) {
  std::vector<std::vector<double>> rows;
  rows.reserve(style_vectors.size());
  for (const auto& sv : style_vectors) rows.push_back(sv.values);
  return build_graph(rows, k);
}

StyleGraph graph_from_parts(Tensor<double> features,
                            const std::vector<std::pair<int, int>>& edges) {
  if (features.rank() != 2 || features.dim(0) < 1) throw ShapeError("features must be {N,D}");
  const int n = features.dim(0);

  StyleGraph graph;
  graph.features = std::move(features);
  graph.adjacency = Tensor<double>({n, n});
  for (const auto& [i, j] : edges) {
    if (i < 0 || i >= n || j < 0 || j >= n || i == j) throw ShapeError("invalid edge");
    graph.adjacency.at(i, j) = 1.0;
    graph.adjacency.at(j, i) = 1.0;
  }
  graph.degrees.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int deg = 1;
    for (int j = 0; j < n; ++j) deg += graph.adjacency.at(i, j) > 0.0 ? 1 : 0;
    graph.degrees[static_cast<std::size_t>(i)] = deg;
  }
  graph.norm_adjacency = normalize_adjacency(graph);
  return graph;
}

Tensor<double> normalize_adjacency(const StyleGraph& graph) {
  const int n = graph.adjacency.dim(0);
  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double deg = 1.0;
    for (int j = 0; j < n; ++j) deg += graph.adjacency.at(i, j);
    inv_sqrt[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(deg);
  }
  Tensor<double> norm({n, n});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = graph.adjacency.at(i, j) + (i == j ? 1.0 : 0.0);
      norm.at(i, j) = a * inv_sqrt[static_cast<std::size_t>(i)] * inv_sqrt[static_cast<std::size_t>(j)];
    }
  return norm;
}

Tensor<double> gcn_layer(const Tensor<double>& h, const Tensor<double>& a_norm,
                         const Tensor<double>& w) {
  if (h.rank() != 2 || a_norm.rank() != 2 || w.rank() != 2 || a_norm.dim(0) != a_norm.dim(1) ||
      a_norm.dim(1) != h.dim(0) || h.dim(1) != w.dim(0))
    throw ShapeError("gcn_layer: inconsistent shapes");
  nn::Var<double> out = nn::relu(
      nn::matmul(nn::matmul(nn::constant(a_norm), nn::constant(h)), nn::constant(w)));
  return out->value;
}

NodeEmbedding embed(const StyleGraph& graph, std::pair<int, int> dims, long steps,
                    std::uint64_t seed) {
  const auto [d_hidden, f] = dims;
  if (d_hidden < 1 || f < 2) throw ConfigError("embed needs d_hidden >= 1 and F >= 2");
  if (steps < 0) throw ConfigError("embed needs steps >= 0");
  const int n = graph.node_count();
  const int d = graph.features.dim(1);

  Rng init(derive_seed(seed, 0));
  nn::ParamStore<double> params;
  nn::Var<double> w1 = params.add("w1", nn::glorot_init<double>({d, d_hidden}, d, d_hidden, init));
  nn::Var<double> w2 = params.add("w2", nn::glorot_init<double>({d_hidden, f}, d_hidden, f, init));

  const nn::Var<double> feats = nn::constant(graph.features);
  const nn::Var<double> a_norm = nn::constant(graph.norm_adjacency);
  const auto encode = [&] {
    nn::Var<double> h1 = nn::relu(nn::matmul(nn::matmul(a_norm, feats), w1));
    return nn::matmul(nn::matmul(a_norm, h1), w2);  // final layer linear
  };

  // Reconstruction target: adjacency with self-loops; positives reweighted by
  // the negative/positive count ratio.
  Tensor<double> target({n, n});
  double positives = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      target.at(i, j) = graph.adjacency.at(i, j) + (i == j ? 1.0 : 0.0);
      positives += target.at(i, j);
    }
  const double negatives = static_cast<double>(n) * n - positives;
  const double pos_weight = positives > 0.0 ? negatives / positives : 0.0;

  Tensor<double> pos_mask({n, n}), neg_mask({n, n});
  for (std::int64_t i = 0; i < target.size(); ++i) {
    pos_mask[i] = target[i] * pos_weight;
    neg_mask[i] = 1.0 - target[i];
  }
  const nn::Var<double> pos_c = nn::constant(pos_mask);
  const nn::Var<double> neg_c = nn::constant(neg_mask);

  nn::Adam<double> opt(params.with_prefix(""), 1e-2);
  for (long step = 0; step < steps; ++step) {
    nn::Var<double> z = encode();
    nn::Var<double> logits = nn::matmul(z, nn::transpose(z));
    // BCE(sigmoid(logits), target): softplus(-l) on positives, softplus(l) on negatives.
    nn::Var<double> loss = nn::mean_all(nn::add(nn::mul(pos_c, nn::softplus(nn::neg(logits))),
                                                nn::mul(neg_c, nn::softplus(logits))));
    if (!std::isfinite(loss->value[0])) throw DivergenceError("non-finite auto-encoder loss", step);
    nn::backward(loss);
    opt.step();
    opt.zero_grads();
  }

  return NodeEmbedding{encode()->value};
}

Ordering sequence(const NodeEmbedding& embedding, int start) {
  const int n = embedding.z.dim(0);
  if (start < 0 || start >= n) throw ConfigError("sequence start out of range");

  Ordering order;
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  int current = start;
  visited[static_cast<std::size_t>(current)] = true;
  order.sequence.push_back(current);
  for (int step = 1; step < n; ++step) {
    int best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (int j = 0; j < n; ++j) {
      if (visited[static_cast<std::size_t>(j)]) continue;
      const double d = row_dist2(embedding.z, current, j);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    visited[static_cast<std::size_t>(best)] = true;
    order.sequence.push_back(best);
    current = best;
  }
  return order;
}

int centroid_start(const NodeEmbedding& embedding) {
  const int n = embedding.z.dim(0), f = embedding.z.dim(1);
  std::vector<double> centroid(static_cast<std::size_t>(f), 0.0);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < f; ++c) centroid[static_cast<std::size_t>(c)] += embedding.z.at(i, c);
  for (auto& v : centroid) v /= n;

  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (int c = 0; c < f; ++c) {
      const double diff = embedding.z.at(i, c) - centroid[static_cast<std::size_t>(c)];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace pigment::gradseq
