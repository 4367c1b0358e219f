#pragma once

// The five color descriptors of a frame and their distances.

#include <array>
#include <cstdint>
#include <vector>

#include "ivss/color_core.hpp"
#include "ivss/frame_io.hpp"

namespace ivss {

// Parameters shared by every descriptor in one index.
struct DescriptorConfig {
  int bits = ColorQuantizer::kDefaultBits;
  std::uint32_t grid_rows = 2;
  std::uint32_t grid_cols = 2;
  double tau = 0.01;

  ColorQuantizer quantizer() const { return ColorQuantizer(bits); }
  // Throws ConfigError when out of range.
  void validate() const;

  friend bool operator==(const DescriptorConfig&, const DescriptorConfig&) = default;
};

struct AvgRGB {
  double r = 0, g = 0, b = 0;
  friend bool operator==(const AvgRGB&, const AvgRGB&) = default;
};

struct GCH {
  Histogram histogram;
  friend bool operator==(const GCH&, const GCH&) = default;
};

struct LCH {
  std::uint32_t grid_rows = 0;
  std::uint32_t grid_cols = 0;
  std::vector<Histogram> blocks;  // row-major, grid_rows * grid_cols entries
  friend bool operator==(const LCH&, const LCH&) = default;
};

// Per channel (R, G, B): mean, standard deviation, signed cube root of the
// third central moment. Population statistics.
struct ChannelMoments {
  double mean = 0, stddev = 0, skewness = 0;
  friend bool operator==(const ChannelMoments&, const ChannelMoments&) = default;
};

struct Moments {
  std::array<ChannelMoments, 3> channel;
  friend bool operator==(const Moments&, const Moments&) = default;
};

// Weights w[channel][moment], moment order (mean, stddev, skewness).
using MomentWeights = std::array<std::array<double, 3>, 3>;
inline constexpr MomentWeights kUnitMomentWeights{{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}};

struct CCV {
  std::vector<double> coherent;
  std::vector<double> incoherent;
  double tau = 0;
  std::uint64_t pixel_count = 0;

  std::size_t size() const { return coherent.size(); }
  friend bool operator==(const CCV&, const CCV&) = default;
};

struct DescriptorSet {
  DescriptorConfig config;
  AvgRGB avg_rgb;
  GCH gch;
  LCH lch;
  Moments moments;
  CCV ccv;
  friend bool operator==(const DescriptorSet&, const DescriptorSet&) = default;
};

AvgRGB compute_avg_rgb(const FrameRGB& frame);
double dist_avg_rgb(const AvgRGB& a, const AvgRGB& b);

GCH compute_gch(const FrameRGB& frame, const ColorQuantizer& q);
double dist_gch(const GCH& a, const GCH& b);
double dist_gch(const Histogram& a, const Histogram& b);

// Block boundaries along one axis: `parts` spans of extent / parts, the
// remainder added to the last span. Returns parts + 1 offsets.
std::vector<std::uint32_t> block_edges(std::uint32_t extent, std::uint32_t parts);

LCH compute_lch(const FrameRGB& frame, const ColorQuantizer& q, std::uint32_t grid_rows, std::uint32_t grid_cols);
double dist_lch(const LCH& a, const LCH& b);

Moments compute_moments(const FrameRGB& frame);
double dist_moments(const Moments& a, const Moments& b, const MomentWeights& weights = kUnitMomentWeights);

// Smallest component size, in pixels, that counts as coherent.
std::uint64_t coherence_min_size(double tau, std::uint64_t pixel_count);
CCV compute_ccv(const FrameRGB& frame, const ColorQuantizer& q, double tau);
double dist_ccv(const CCV& a, const CCV& b);

DescriptorSet extract_all(const FrameRGB& frame, const DescriptorConfig& config);

}  // namespace ivss
