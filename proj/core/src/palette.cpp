#include "pigment/palette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pigment/errors.hpp"
#include "pigment/rng.hpp"
#include "pigment/sasr/bicubic.hpp"

namespace pigment::palette {

namespace {

constexpr int kHueCells = 16;
constexpr int kSatCells = 2;
constexpr int kValCells = 2;

inline double to_unit(float v) { return (static_cast<double>(v) + 1.0) * 0.5; }

struct WeightedColor {
  std::array<double, 3> rgb;
  std::int64_t count;
};

// Distinct colors with multiplicities, sorted RGB-lexicographically.
// Operating on this histogram makes every downstream statistic independent
// of pixel order.
std::vector<WeightedColor> distinct_colors(const Tensor<float>& image) {
  const int h = image.dim(0), w = image.dim(1);
  std::vector<std::array<double, 3>> pixels;
  pixels.reserve(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      pixels.push_back({to_unit(image.at(y, x, 0)), to_unit(image.at(y, x, 1)),
                        to_unit(image.at(y, x, 2))});
  std::sort(pixels.begin(), pixels.end());

  std::vector<WeightedColor> out;
  for (std::size_t i = 0; i < pixels.size();) {
    std::size_t j = i;
    while (j < pixels.size() && pixels[j] == pixels[i]) ++j;
    out.push_back({pixels[i], static_cast<std::int64_t>(j - i)});
    i = j;
  }
  return out;
}

inline double dist2(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dr = a[0] - b[0], dg = a[1] - b[1], db = a[2] - b[2];
  return dr * dr + dg * dg + db * db;
}

Tensor<float> bounded_to_256(const Tensor<float>& image) {
  if (image.dim(0) <= 256 && image.dim(1) <= 256) return image;
  return sasr::resample_image(image, std::min(image.dim(0), 256), std::min(image.dim(1), 256));
}

// Orthonormal 8x8 DCT-II.
void dct8x8(const double in[8][8], double out[8][8]) {
  static double basis[8][8];
  static bool init = false;
  if (!init) {
    for (int u = 0; u < 8; ++u) {
      const double alpha = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x)
        basis[u][x] = alpha * std::cos((2.0 * x + 1.0) * u * M_PI / 16.0);
    }
    init = true;
  }
  double tmp[8][8];
  for (int u = 0; u < 8; ++u)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += basis[u][y] * in[x][y];
      tmp[x][u] = s;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += basis[u][x] * tmp[x][v];
      out[u][v] = s;
    }
}

// JPEG zigzag scan order over an 8x8 block.
constexpr int kZigzag[64] = {0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
                             12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
                             35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
                             58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

void l2_normalize(std::vector<double>& v, std::size_t begin, std::size_t end) {
  double norm2 = 0.0;
  for (std::size_t i = begin; i < end; ++i) norm2 += v[i] * v[i];
  if (norm2 <= 0.0) return;
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = begin; i < end; ++i) v[i] *= inv;
}

}  // namespace

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  v = mx;
  s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) {
    h = 0.0;
    return;
  }
  if (mx == r)
    h = (g - b) / delta;
  else if (mx == g)
    h = 2.0 + (b - r) / delta;
  else
    h = 4.0 + (r - g) / delta;
  h /= 6.0;
  if (h < 0.0) h += 1.0;
}

int quantize_rgb(double r, double g, double b) {
  double h, s, v;
  rgb_to_hsv(r, g, b, h, s, v);
  const int hi = std::min(kHueCells - 1, static_cast<int>(h * kHueCells));
  const int si = s < 0.5 ? 0 : 1;
  const int vi = v < 0.5 ? 0 : 1;
  return (hi * kSatCells + si) * kValCells + vi;
}

std::array<double, 64> color_histogram64(const Tensor<float>& image) {
  std::array<double, 64> hist{};
  const int h = image.dim(0), w = image.dim(1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      hist[static_cast<std::size_t>(quantize_rgb(to_unit(image.at(y, x, 0)), to_unit(image.at(y, x, 1)),
                                                 to_unit(image.at(y, x, 2))))] += 1.0;
  const double total = static_cast<double>(h) * w;
  for (auto& v : hist) v /= total;
  return hist;
}

DominantColorSet dominant_colors(const Tensor<float>& image, int k, std::uint64_t seed) {
  if (k < 1) throw ConfigError("dominant_colors needs k >= 1");
  if (image.empty()) throw ConfigError("dominant_colors needs a nonempty image");

  const std::vector<WeightedColor> colors = distinct_colors(image);
  const int n = static_cast<int>(colors.size());
  k = std::min(k, n);

  // Greedy farthest-point init; the first centroid is a seeded draw over the
  // distinct-color list, so the whole statistic stays pixel-order-free.
  Rng rng(seed);
  std::vector<std::array<double, 3>> centroids;
  centroids.push_back(colors[static_cast<std::size_t>(rng.uniform_int(n))].rgb);
  std::vector<double> min_d(static_cast<std::size_t>(n), std::numeric_limits<double>::max());
  while (static_cast<int>(centroids.size()) < k) {
    int best = 0;
    double best_d = -1.0;
    for (int i = 0; i < n; ++i) {
      min_d[static_cast<std::size_t>(i)] =
          std::min(min_d[static_cast<std::size_t>(i)], dist2(colors[static_cast<std::size_t>(i)].rgb, centroids.back()));
      if (min_d[static_cast<std::size_t>(i)] > best_d) {
        best_d = min_d[static_cast<std::size_t>(i)];
        best = i;
      }
    }
    centroids.push_back(colors[static_cast<std::size_t>(best)].rgb);
  }

  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> cluster_count(static_cast<std::size_t>(k), 0);
  for (int iter = 0; iter < 50; ++iter) {
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = dist2(colors[static_cast<std::size_t>(i)].rgb, centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = dist2(colors[static_cast<std::size_t>(i)].rgb, centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[static_cast<std::size_t>(i)] = best;
    }

    double movement = 0.0;
    std::fill(cluster_count.begin(), cluster_count.end(), 0);
    for (int c = 0; c < k; ++c) {
      std::array<double, 3> sum{0.0, 0.0, 0.0};
      std::int64_t count = 0;
      for (int i = 0; i < n; ++i) {
        if (assign[static_cast<std::size_t>(i)] != c) continue;
        const auto& wc = colors[static_cast<std::size_t>(i)];
        for (int d = 0; d < 3; ++d) sum[static_cast<std::size_t>(d)] += wc.rgb[static_cast<std::size_t>(d)] * static_cast<double>(wc.count);
        count += wc.count;
      }
      cluster_count[static_cast<std::size_t>(c)] = count;
      if (count == 0) continue;  // empty cluster keeps its centroid
      std::array<double, 3> next{sum[0] / static_cast<double>(count), sum[1] / static_cast<double>(count),
                                 sum[2] / static_cast<double>(count)};
      movement = std::max(movement, std::sqrt(dist2(next, centroids[static_cast<std::size_t>(c)])));
      centroids[static_cast<std::size_t>(c)] = next;
    }
    if (movement < 1e-6) break;
  }

  std::int64_t total = 0;
  for (const auto& wc : colors) total += wc.count;

  std::vector<std::pair<double, std::array<double, 3>>> clusters;
  for (int c = 0; c < k; ++c)
    clusters.push_back({static_cast<double>(cluster_count[static_cast<std::size_t>(c)]) / static_cast<double>(total),
                        centroids[static_cast<std::size_t>(c)]});
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  DominantColorSet out;
  for (const auto& [weight, rgb] : clusters) {
    out.weights.push_back(weight);
    out.colors.push_back(rgb);
  }
  return out;
}

CSDHistogram color_structure_descriptor(const Tensor<float>& image) {
  if (image.dim(0) < 8 || image.dim(1) < 8)
    throw DescriptorError("color structure descriptor needs side >= 8");
  const Tensor<float> img = bounded_to_256(image);
  const int h = img.dim(0), w = img.dim(1);

  std::vector<int> bins(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      bins[static_cast<std::size_t>(y) * w + x] =
          quantize_rgb(to_unit(img.at(y, x, 0)), to_unit(img.at(y, x, 1)), to_unit(img.at(y, x, 2)));

  CSDHistogram hist;
  std::array<int, 64> stamp{};
  stamp.fill(-1);
  int window_id = 0;
  for (int y = 0; y + 8 <= h; ++y) {
    for (int x = 0; x + 8 <= w; ++x, ++window_id) {
      for (int dy = 0; dy < 8; ++dy)
        for (int dx = 0; dx < 8; ++dx) {
          const int b = bins[static_cast<std::size_t>(y + dy) * w + (x + dx)];
          if (stamp[static_cast<std::size_t>(b)] != window_id) {
            stamp[static_cast<std::size_t>(b)] = window_id;
            hist.bins[static_cast<std::size_t>(b)] += 1.0;
          }
        }
    }
  }
  const double windows = static_cast<double>(h - 7) * (w - 7);
  for (auto& v : hist.bins) v /= windows;
  return hist;
}

CLDCoefficients color_layout_descriptor(const Tensor<float>& image) {
  const int h = image.dim(0), w = image.dim(1);

  double ych[8][8], cbch[8][8], crch[8][8];
  for (int gy = 0; gy < 8; ++gy) {
    const int y0 = gy * h / 8, y1 = (gy + 1) * h / 8;
    for (int gx = 0; gx < 8; ++gx) {
      const int x0 = gx * w / 8, x1 = (gx + 1) * w / 8;
      double r = 0.0, g = 0.0, b = 0.0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
          r += to_unit(image.at(y, x, 0));
          g += to_unit(image.at(y, x, 1));
          b += to_unit(image.at(y, x, 2));
        }
      const double cnt = static_cast<double>(y1 - y0) * (x1 - x0);
      r /= cnt;
      g /= cnt;
      b /= cnt;
      // BT.601 full-range, [0,255] scale as in JPEG.
      ych[gy][gx] = 255.0 * (0.299 * r + 0.587 * g + 0.114 * b);
      cbch[gy][gx] = 255.0 * (-0.168736 * r - 0.331264 * g + 0.5 * b) + 128.0;
      crch[gy][gx] = 255.0 * (0.5 * r - 0.418688 * g - 0.081312 * b) + 128.0;
    }
  }

  double yd[8][8], cbd[8][8], crd[8][8];
  dct8x8(ych, yd);
  dct8x8(cbch, cbd);
  dct8x8(crch, crd);

  CLDCoefficients out;
  for (int i = 0; i < 6; ++i) out.y_coeffs[static_cast<std::size_t>(i)] = yd[kZigzag[i] / 8][kZigzag[i] % 8];
  for (int i = 0; i < 3; ++i) out.cb_coeffs[static_cast<std::size_t>(i)] = cbd[kZigzag[i] / 8][kZigzag[i] % 8];
  for (int i = 0; i < 3; ++i) out.cr_coeffs[static_cast<std::size_t>(i)] = crd[kZigzag[i] / 8][kZigzag[i] % 8];
  return out;
}

AdjacencyHistogram adjacent_color_pairs(const Tensor<float>& image) {
  const int h = image.dim(0), w = image.dim(1);
  std::vector<int> bins(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      bins[static_cast<std::size_t>(y) * w + x] =
          quantize_rgb(to_unit(image.at(y, x, 0)), to_unit(image.at(y, x, 1)), to_unit(image.at(y, x, 2)));

  AdjacencyHistogram hist;
  std::int64_t pairs = 0;
  const auto bump = [&](int a, int b) {
    hist.pairs.at(std::min(a, b), std::max(a, b)) += 1.0;
    ++pairs;
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) bump(bins[static_cast<std::size_t>(y) * w + x], bins[static_cast<std::size_t>(y) * w + x + 1]);
      if (y + 1 < h) bump(bins[static_cast<std::size_t>(y) * w + x], bins[static_cast<std::size_t>(y + 1) * w + x]);
    }
  if (pairs > 0) hist.pairs *= 1.0 / static_cast<double>(pairs);
  return hist;
}

StyleVector style_vector(const Tensor<float>& image, int k, std::uint64_t seed) {
  const DominantColorSet dom = dominant_colors(image, k, seed);
  const CSDHistogram csd = color_structure_descriptor(image);
  const CLDCoefficients cld = color_layout_descriptor(image);
  const AdjacencyHistogram adj = adjacent_color_pairs(image);

  StyleVector sv;
  const auto begin_segment = [&](const std::string& name) {
    sv.layout.push_back({name, static_cast<int>(sv.values.size()), 0});
  };
  const auto end_segment = [&] {
    auto& seg = sv.layout.back();
    seg.size = static_cast<int>(sv.values.size()) - seg.offset;
    l2_normalize(sv.values, static_cast<std::size_t>(seg.offset), sv.values.size());
  };

  begin_segment("dominant");
  for (int i = 0; i < k; ++i) {
    if (i < dom.k()) {
      for (double c : dom.colors[static_cast<std::size_t>(i)]) sv.values.push_back(c);
    } else {
      sv.values.insert(sv.values.end(), 3, 0.0);  // pad reduced-k images
    }
  }
  for (int i = 0; i < k; ++i) sv.values.push_back(i < dom.k() ? dom.weights[static_cast<std::size_t>(i)] : 0.0);
  end_segment();

  begin_segment("csd");
  sv.values.insert(sv.values.end(), csd.bins.begin(), csd.bins.end());
  end_segment();

  begin_segment("cld");
  sv.values.insert(sv.values.end(), cld.y_coeffs.begin(), cld.y_coeffs.end());
  sv.values.insert(sv.values.end(), cld.cb_coeffs.begin(), cld.cb_coeffs.end());
  sv.values.insert(sv.values.end(), cld.cr_coeffs.begin(), cld.cr_coeffs.end());
  end_segment();

  begin_segment("adjacency");
  for (int i = 0; i < 64; ++i)
    for (int j = i; j < 64; ++j) sv.values.push_back(adj.pairs.at(i, j));
  end_segment();

  l2_normalize(sv.values, 0, sv.values.size());
  return sv;
}

}  // namespace pigment::palette
