// Style-similarity graph over paintings: symmetrized kNN adjacency on style
// vectors, symmetric degree normalization with self-loops, two GCN layers
// trained as a graph auto-encoder (inner-product decoder, class-balanced
// binary cross-entropy), and a greedy nearest-unvisited ordering over the
// node embeddings. Everything runs in double precision.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pigment/palette.hpp"
#include "pigment/tensor.hpp"

namespace pigment::gradseq {

struct StyleGraph {
  Tensor<double> features;        // {N, D}
  Tensor<double> adjacency;       // {N, N}, binary, symmetric, zero diagonal
  std::vector<int> degrees;       // row sums of adjacency + I
  Tensor<double> norm_adjacency;  // D^-1/2 (A + I) D^-1/2

  int node_count() const { return features.dim(0); }
};

struct NodeEmbedding {
  Tensor<double> z;  // {N, F}
};

struct Ordering {
  std::vector<int> sequence;  // permutation of 0..N-1
};

// Symmetrized kNN graph: edge (i,j) iff j is among i's k nearest neighbors
// by Euclidean distance or vice versa; distance ties break on lower index.
StyleGraph build_graph(const std::vector<std::vector<double>>& style_vectors, int k);
StyleGraph build_graph(const std::vector<palette::StyleVector>& style_vectors, int k);

// Graph from an explicit undirected edge list (degrees and normalization
// recomputed); features rows are the node feature matrix.
StyleGraph graph_from_parts(Tensor<double> features,
                            const std::vector<std::pair<int, int>>& edges);

// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
Tensor<double> normalize_adjacency(const StyleGraph& graph);

// ReLU(A_norm * H * W).
Tensor<double> gcn_layer(const Tensor<double>& h, const Tensor<double>& a_norm,
                         const Tensor<double>& w);

// Two-layer GCN encoder (D -> d_hidden -> F, final layer linear) trained to
// reconstruct A + I from sigmoid(Z Z^T). Deterministic under seed.
NodeEmbedding embed(const StyleGraph& graph, std::pair<int, int> dims, long steps,
                    std::uint64_t seed);

// Greedy nearest-unvisited walk from `start`; ties break on lowest index.
Ordering sequence(const NodeEmbedding& embedding, int start);

// Default start: node nearest the embedding centroid.
int centroid_start(const NodeEmbedding& embedding);

}  // namespace pigment::gradseq
