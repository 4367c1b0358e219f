#pragma once

// RGB cube quantization and normalized color histograms.

#include <cstdint>
#include <span>
#include <vector>

#include "ivss/frame_io.hpp"

namespace ivss {

// Uniform quantization of each channel to 2^bits levels. Bin layout is
// R-major: index = r_q * L^2 + g_q * L + b_q.
class ColorQuantizer {
 public:
  static constexpr int kDefaultBits = 2;

  explicit ColorQuantizer(int bits_per_channel = kDefaultBits);

  int bits() const { return bits_; }
  std::uint32_t levels() const { return 1u << bits_; }
  std::uint32_t bin_count() const { return levels() * levels() * levels(); }

  // floor(c * L / 256) per channel; total over [0,255]^3.
  std::uint32_t quantize(Rgb p) const {
    const int shift = 8 - bits_;
    return (std::uint32_t(p.r >> shift) << (2 * bits_)) | (std::uint32_t(p.g >> shift) << bits_) |
           std::uint32_t(p.b >> shift);
  }

  friend bool operator==(const ColorQuantizer&, const ColorQuantizer&) = default;

 private:
  int bits_;
};

inline std::uint32_t quantize(Rgb p, const ColorQuantizer& q) { return q.quantize(p); }

// Bin probabilities; sums to 1 whenever pixel_count > 0.
struct Histogram {
  std::vector<double> bins;
  std::uint64_t pixel_count = 0;

  std::size_t size() const { return bins.size(); }
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

Histogram build_histogram(const FrameRGB& frame, const ColorQuantizer& q);

// Histogram of the rectangle [x0, x0+w) x [y0, y0+h).
Histogram build_histogram(const FrameRGB& frame, const ColorQuantizer& q, std::uint32_t x0, std::uint32_t y0,
                          std::uint32_t w, std::uint32_t h);

// Per-pixel bin labels, row-major.
std::vector<std::uint32_t> quantize_frame(const FrameRGB& frame, const ColorQuantizer& q);

// Merge bins of a histogram built at q.bits() into the (bits-1) layout.
Histogram coarsen(const Histogram& h, const ColorQuantizer& q);

}  // namespace ivss
