#include "ivss/descriptors.hpp"

#include <cmath>
#include <numeric>

#include "ivss/error.hpp"

namespace ivss {

void DescriptorConfig::validate() const {
  if (bits < 1 || bits > 8) throw ConfigError("bits per channel must be in [1,8]");
  if (grid_rows < 1 || grid_cols < 1) throw ConfigError("LCH grid must be at least 1x1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("coherence threshold tau must be in (0,1]");
}

AvgRGB compute_avg_rgb(const FrameRGB& frame) {
  if (frame.empty()) throw EmptyFrameError("average of an empty frame");
  std::uint64_t sr = 0, sg = 0, sb = 0;
  for (const Rgb& p : frame.pixels()) {
    sr += p.r;
    sg += p.g;
    sb += p.b;
  }
  const double n = static_cast<double>(frame.pixel_count());
  return {static_cast<double>(sr) / n, static_cast<double>(sg) / n, static_cast<double>(sb) / n};
}

double dist_avg_rgb(const AvgRGB& a, const AvgRGB& b) {
  const double dr = a.r - b.r, dg = a.g - b.g, db = a.b - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

GCH compute_gch(const FrameRGB& frame, const ColorQuantizer& q) { return {build_histogram(frame, q)}; }

double dist_gch(const Histogram& a, const Histogram& b) {
  if (a.size() != b.size())
    throw ConfigMismatchError("histogram bin counts differ: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.bins[i] - b.bins[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double dist_gch(const GCH& a, const GCH& b) { return dist_gch(a.histogram, b.histogram); }

std::vector<std::uint32_t> block_edges(std::uint32_t extent, std::uint32_t parts) {
  if (parts == 0 || parts > extent) throw ConfigMismatchError("grid larger than frame");
  std::vector<std::uint32_t> edges(parts + 1);
  const std::uint32_t step = extent / parts;
  for (std::uint32_t k = 0; k < parts; ++k) edges[k] = k * step;
  edges[parts] = extent;
  return edges;
}

LCH compute_lch(const FrameRGB& frame, const ColorQuantizer& q, std::uint32_t grid_rows, std::uint32_t grid_cols) {
  if (frame.empty()) throw EmptyFrameError("LCH of an empty frame");
  if (grid_rows == 0 || grid_cols == 0 || grid_rows > frame.height() || grid_cols > frame.width())
    throw ConfigMismatchError("LCH grid " + std::to_string(grid_rows) + "x" + std::to_string(grid_cols) +
                              " does not fit a " + std::to_string(frame.width()) + "x" +
                              std::to_string(frame.height()) + " frame");
  const auto ys = block_edges(frame.height(), grid_rows);
  const auto xs = block_edges(frame.width(), grid_cols);
  LCH out{grid_rows, grid_cols, {}};
  out.blocks.reserve(std::size_t(grid_rows) * grid_cols);
  for (std::uint32_t r = 0; r < grid_rows; ++r)
    for (std::uint32_t c = 0; c < grid_cols; ++c)
      out.blocks.push_back(build_histogram(frame, q, xs[c], ys[r], xs[c + 1] - xs[c], ys[r + 1] - ys[r]));
  return out;
}

double dist_lch(const LCH& a, const LCH& b) {
  if (a.grid_rows != b.grid_rows || a.grid_cols != b.grid_cols || a.blocks.size() != b.blocks.size())
    throw ConfigMismatchError("LCH grids differ");
  double sum = 0;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) sum += dist_gch(a.blocks[k], b.blocks[k]);
  return sum;
}

// Central moments are accumulated exactly in integers as sums of
// (N*P - S)^k, so a symmetric channel yields a third moment of exactly zero.
Moments compute_moments(const FrameRGB& frame) {
  if (frame.empty()) throw EmptyFrameError("moments of an empty frame");
  const auto px = frame.pixels();
  const std::int64_t n = static_cast<std::int64_t>(px.size());
  Moments out;
  for (int c = 0; c < 3; ++c) {
    auto value = [c](const Rgb& p) -> std::int64_t { return c == 0 ? p.r : c == 1 ? p.g : p.b; };
    std::int64_t s = 0;
    for (const Rgb& p : px) s += value(p);
    __int128 m2 = 0, m3 = 0;
    for (const Rgb& p : px) {
      const __int128 d = static_cast<__int128>(n) * value(p) - s;
      m2 += d * d;
      m3 += d * d * d;
    }
    const long double nl = static_cast<long double>(n);
    const long double var = static_cast<long double>(m2) / (nl * nl * nl);
    const long double third = static_cast<long double>(m3) / (nl * nl * nl * nl);
    out.channel[c].mean = static_cast<double>(static_cast<long double>(s) / nl);
    out.channel[c].stddev = static_cast<double>(std::sqrt(var));
    out.channel[c].skewness = static_cast<double>(std::cbrt(third));
  }
  return out;
}

double dist_moments(const Moments& a, const Moments& b, const MomentWeights& weights) {
  for (const auto& row : weights)
    for (double w : row)
      if (!(w >= 0.0)) throw ConfigError("moment weights must be non-negative");
  double sum = 0;
  for (int i = 0; i < 3; ++i) {
    const ChannelMoments& x = a.channel[i];
    const ChannelMoments& y = b.channel[i];
    sum += weights[i][0] * std::abs(x.mean - y.mean) + weights[i][1] * std::abs(x.stddev - y.stddev) +
           weights[i][2] * std::abs(x.skewness - y.skewness);
  }
  return sum;
}

std::uint64_t coherence_min_size(double tau, std::uint64_t pixel_count) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("coherence threshold tau must be in (0,1]");
  // ceil(tau * n), with products that land within rounding noise of an
  // integer (0.05 * 100) treated as that integer.
  const double t = tau * static_cast<double>(pixel_count);
  const double nearest = std::round(t);
  const double size = std::abs(t - nearest) <= 1e-9 * std::max(1.0, t) ? nearest : std::ceil(t);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(size));
}

namespace {

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> size;

  explicit DisjointSets(std::size_t n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0u); }

  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

}  // namespace

CCV compute_ccv(const FrameRGB& frame, const ColorQuantizer& q, double tau) {
  if (frame.empty()) throw EmptyFrameError("CCV of an empty frame");
  const std::uint64_t min_size = coherence_min_size(tau, frame.pixel_count());
  const auto labels = quantize_frame(frame, q);
  const std::uint32_t w = frame.width(), h = frame.height();

  // 8-connectivity: join each pixel with its W, NW, N, NE neighbours.
  DisjointSets sets(labels.size());
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::uint32_t i = y * w + x;
      if (x > 0 && labels[i - 1] == labels[i]) sets.unite(i, i - 1);
      if (y > 0) {
        const std::uint32_t up = i - w;
        if (labels[up] == labels[i]) sets.unite(i, up);
        if (x > 0 && labels[up - 1] == labels[i]) sets.unite(i, up - 1);
        if (x + 1 < w && labels[up + 1] == labels[i]) sets.unite(i, up + 1);
      }
    }
  }

  std::vector<std::uint64_t> coherent(q.bin_count(), 0), incoherent(q.bin_count(), 0);
  for (std::uint32_t i = 0; i < labels.size(); ++i) {
    if (sets.size[sets.find(i)] >= min_size)
      ++coherent[labels[i]];
    else
      ++incoherent[labels[i]];
  }

  CCV out;
  out.tau = tau;
  out.pixel_count = labels.size();
  out.coherent.resize(q.bin_count());
  out.incoherent.resize(q.bin_count());
  const double n = static_cast<double>(labels.size());
  for (std::size_t b = 0; b < coherent.size(); ++b) {
    out.coherent[b] = static_cast<double>(coherent[b]) / n;
    out.incoherent[b] = static_cast<double>(incoherent[b]) / n;
  }
  return out;
}

double dist_ccv(const CCV& a, const CCV& b) {
  if (a.size() != b.size()) throw ConfigMismatchError("CCV bin counts differ");
  if (a.tau != b.tau) throw ConfigMismatchError("CCV coherence thresholds differ");
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += std::abs(a.coherent[i] - b.coherent[i]) + std::abs(a.incoherent[i] - b.incoherent[i]);
  return sum;
}

DescriptorSet extract_all(const FrameRGB& frame, const DescriptorConfig& config) {
  config.validate();
  const ColorQuantizer q = config.quantizer();
  DescriptorSet set;
  set.config = config;
  set.avg_rgb = compute_avg_rgb(frame);
  set.gch = compute_gch(frame, q);
  set.lch = compute_lch(frame, q, config.grid_rows, config.grid_cols);
  set.moments = compute_moments(frame);
  set.ccv = compute_ccv(frame, q, config.tau);
  return set;
}

}  // namespace ivss
