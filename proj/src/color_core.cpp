#include "ivss/color_core.hpp"

#include "ivss/error.hpp"

namespace ivss {

ColorQuantizer::ColorQuantizer(int bits_per_channel) : bits_(bits_per_channel) {
  if (bits_per_channel < 1 || bits_per_channel > 8)
    throw ConfigError("bits per channel must be in [1,8], got " + std::to_string(bits_per_channel));
}

Histogram build_histogram(const FrameRGB& frame, const ColorQuantizer& q, std::uint32_t x0, std::uint32_t y0,
                          std::uint32_t w, std::uint32_t h) {
  if (w == 0 || h == 0) throw EmptyFrameError("histogram over an empty region");
  if (x0 + w > frame.width() || y0 + h > frame.height()) throw ConfigMismatchError("histogram region outside frame");
  std::vector<std::uint64_t> counts(q.bin_count(), 0);
  for (std::uint32_t y = y0; y < y0 + h; ++y)
    for (std::uint32_t x = x0; x < x0 + w; ++x) ++counts[q.quantize(frame.at(x, y))];

  Histogram out;
  out.pixel_count = std::uint64_t(w) * h;
  out.bins.resize(counts.size());
  const double n = static_cast<double>(out.pixel_count);
  for (std::size_t i = 0; i < counts.size(); ++i) out.bins[i] = static_cast<double>(counts[i]) / n;
  return out;
}

Histogram build_histogram(const FrameRGB& frame, const ColorQuantizer& q) {
  if (frame.empty()) throw EmptyFrameError("cannot build a histogram of an empty frame");
  return build_histogram(frame, q, 0, 0, frame.width(), frame.height());
}

std::vector<std::uint32_t> quantize_frame(const FrameRGB& frame, const ColorQuantizer& q) {
  std::vector<std::uint32_t> labels;
  labels.reserve(frame.pixel_count());
  for (const Rgb& p : frame.pixels()) labels.push_back(q.quantize(p));
  return labels;
}

Histogram coarsen(const Histogram& h, const ColorQuantizer& q) {
  if (q.bits() < 2) throw ConfigError("cannot coarsen a 1-bit histogram");
  if (h.size() != q.bin_count()) throw ConfigMismatchError("histogram does not match quantizer");
  const int b = q.bits();
  const std::uint32_t mask = q.levels() - 1;
  ColorQuantizer coarse(b - 1);
  Histogram out;
  out.pixel_count = h.pixel_count;
  out.bins.assign(coarse.bin_count(), 0.0);
  for (std::uint32_t i = 0; i < h.size(); ++i) {
    std::uint32_t r = (i >> (2 * b)) & mask, g = (i >> b) & mask, bl = i & mask;
    std::uint32_t j = ((r >> 1) << (2 * (b - 1))) | ((g >> 1) << (b - 1)) | (bl >> 1);
    out.bins[j] += h.bins[i];
  }
  return out;
}

}  // namespace ivss
