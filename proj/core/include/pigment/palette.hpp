// Hand-crafted color statistics fused into one style vector per image:
// dominant-color clusters, a 64-bin color-structure histogram, DCT color
// layout coefficients and an adjacent-color-pair histogram.
//
// The shared 64-bin quantizer lives in HSV space: 16 hue x 2 saturation x
// 2 value cells. Pixel values arrive in [-1,1] and are mapped to [0,1] RGB
// before quantization.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pigment/corpus.hpp"
#include "pigment/tensor.hpp"

namespace pigment::palette {

struct DominantColorSet {
  std::vector<std::array<double, 3>> colors;  // RGB in [0,1], descending weight
  std::vector<double> weights;                // nonnegative, sum to 1

  int k() const { return static_cast<int>(colors.size()); }
};

struct CSDHistogram {
  std::array<double, 64> bins{};  // presence frequency per bin, each in [0,1]
};

struct CLDCoefficients {
  std::array<double, 6> y_coeffs{};
  std::array<double, 3> cb_coeffs{};
  std::array<double, 3> cr_coeffs{};
};

struct AdjacencyHistogram {
  Tensor<double> pairs;  // {64,64}, upper triangle (incl. diagonal) sums to 1

  AdjacencyHistogram() : pairs({64, 64}) {}
};

struct StyleVector {
  struct Segment {
    std::string name;
    int offset = 0;
    int size = 0;
  };
  std::vector<double> values;  // unit Euclidean norm (zero maps to zero)
  std::vector<Segment> layout;
};

// --- 64-bin quantizer -----------------------------------------------------

// r,g,b in [0,1]; returns bin in [0,64).
int quantize_rgb(double r, double g, double b);

// h in [0,1), s,v in [0,1].
void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v);

// Normalized per-pixel histogram over the 64-bin quantizer.
std::array<double, 64> color_histogram64(const Tensor<float>& image);

// --- descriptor families ----------------------------------------------------

// Seeded k-means over the image's distinct colors (greedy farthest-point
// init). Result is order-free in the pixels; k is reduced to the number of
// distinct colors when the request exceeds it.
DominantColorSet dominant_colors(const Tensor<float>& image, int k, std::uint64_t seed);

// 8x8 structuring element slid with stride 1; bin b records the fraction of
// window positions containing bin b at least once. Images larger than 256
// are resized to 256 first. side < 8 -> DescriptorError.
CSDHistogram color_structure_descriptor(const Tensor<float>& image);

// 8x8 grid of mean colors -> YCbCr (BT.601 full range) -> orthonormal 8x8
// DCT-II -> zigzag scan, keeping (6,3,3) leading coefficients.
CLDCoefficients color_layout_descriptor(const Tensor<float>& image);

// Unordered 4-neighbor pixel pairs binned under the 64-bin quantizer,
// normalized by the pair count.
AdjacencyHistogram adjacent_color_pairs(const Tensor<float>& image);

// Concatenates the four families (each L2-normalized first, so no family
// dominates by dimensionality) and L2-normalizes the fusion. The dominant
// segment is zero-padded to the requested k so the layout is image-independent.
StyleVector style_vector(const Tensor<float>& image, int k, std::uint64_t seed);

inline DominantColorSet dominant_colors(const corpus::CanvasRecord& r, int k, std::uint64_t seed) {
  return dominant_colors(r.pixels, k, seed);
}
inline CSDHistogram color_structure_descriptor(const corpus::CanvasRecord& r) {
  return color_structure_descriptor(r.pixels);
}
inline CLDCoefficients color_layout_descriptor(const corpus::CanvasRecord& r) {
  return color_layout_descriptor(r.pixels);
}
inline AdjacencyHistogram adjacent_color_pairs(const corpus::CanvasRecord& r) {
  return adjacent_color_pairs(r.pixels);
}
inline StyleVector style_vector(const corpus::CanvasRecord& r, int k, std::uint64_t seed) {
  return style_vector(r.pixels, k, seed);
}

}  // namespace pigment::palette
