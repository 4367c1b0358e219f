#include "ivss/synth.hpp"

#include <algorithm>
#include <numeric>

#include "ivss/error.hpp"

namespace ivss::synth {

namespace {

std::uint8_t clamp8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

// Fisher-Yates with our own index draw, so output does not depend on the
// standard library's distribution implementations.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

int uniform(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::vector<FrameRGB> solid(Rgb color, std::size_t frames, std::uint32_t w, std::uint32_t h) {
  return std::vector<FrameRGB>(frames, FrameRGB(w, h, color));
}

std::vector<FrameRGB> cut(Rgb a, Rgb b, std::size_t first_len, std::size_t second_len, std::uint32_t w,
                          std::uint32_t h) {
  auto out = solid(a, first_len, w, h);
  auto tail = solid(b, second_len, w, h);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

std::vector<FrameRGB> dissolve(Rgb a, Rgb b, std::size_t frames, std::uint32_t w, std::uint32_t h,
                               std::uint64_t seed) {
  if (frames < 2) throw ConfigError("a dissolve needs at least two frames");
  const std::size_t n = std::size_t(w) * h;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);

  std::vector<FrameRGB> out;
  out.reserve(frames);
  std::vector<Rgb> px(n, a);
  std::size_t switched = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t target = n * t / (frames - 1);
    for (; switched < target; ++switched) px[order[switched]] = b;
    out.emplace_back(w, h, px);
  }
  return out;
}

FrameRGB split_frame(Rgb a, Rgb b, std::uint32_t split, std::uint32_t w, std::uint32_t h) {
  std::vector<Rgb> px;
  px.reserve(std::size_t(w) * h);
  for (std::uint32_t y = 0; y < h; ++y)
    for (std::uint32_t x = 0; x < w; ++x) px.push_back(x < split ? a : b);
  return FrameRGB(w, h, std::move(px));
}

FrameRGB textured_frame(Rgb base, int amplitude, std::uint32_t w, std::uint32_t h, Rng& rng) {
  std::vector<Rgb> px;
  px.reserve(std::size_t(w) * h);
  for (std::size_t i = 0; i < std::size_t(w) * h; ++i)
    px.push_back({clamp8(base.r + uniform(rng, -amplitude, amplitude)),
                  clamp8(base.g + uniform(rng, -amplitude, amplitude)),
                  clamp8(base.b + uniform(rng, -amplitude, amplitude))});
  return FrameRGB(w, h, std::move(px));
}

FrameRGB mixed_frame(Rgb a, Rgb b, std::uint32_t w, std::uint32_t h, Rng& rng) {
  const std::size_t n = std::size_t(w) * h;
  if (n % 2 != 0) throw ConfigError("mixed frames need an even pixel count");
  std::vector<Rgb> px(n);
  const auto layout = rng() % 3;
  switch (layout) {
    case 0: {  // scattered
      std::fill(px.begin(), px.begin() + n / 2, a);
      std::fill(px.begin() + n / 2, px.end(), b);
      shuffle(px, rng);
      break;
    }
    case 1: {  // checkerboard; w and h must be multiples of 2*cell
      std::uint32_t cell = 1u << (rng() % 3);
      while (cell > 1 && (w % (2 * cell) != 0 || h % (2 * cell) != 0)) cell /= 2;
      const bool swap = rng() % 2;
      for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x) px[std::size_t(y) * w + x] = (((x / cell) + (y / cell)) % 2 == swap) ? a : b;
      break;
    }
    default: {  // halves
      const bool vertical = (rng() % 2) && w % 2 == 0;
      const bool swap = rng() % 2;
      for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x) {
          const bool first = vertical ? x < w / 2 : (h % 2 == 0 ? y < h / 2 : std::size_t(y) * w + x < n / 2);
          px[std::size_t(y) * w + x] = (first != swap) ? a : b;
        }
      break;
    }
  }
  if (layout != 0) {
    // Wrap-around shift: keeps the pixel counts, varies the placement.
    const std::uint32_t dx = std::uint32_t(rng() % w), dy = std::uint32_t(rng() % h);
    std::vector<Rgb> shifted(n);
    for (std::uint32_t y = 0; y < h; ++y)
      for (std::uint32_t x = 0; x < w; ++x)
        shifted[std::size_t((y + dy) % h) * w + (x + dx) % w] = px[std::size_t(y) * w + x];
    px.swap(shifted);
  }
  return FrameRGB(w, h, std::move(px));
}

Rgb jitter(Rgb c, int amount, Rng& rng) {
  return {clamp8(c.r + uniform(rng, -amount, amount)), clamp8(c.g + uniform(rng, -amount, amount)),
          clamp8(c.b + uniform(rng, -amount, amount))};
}

FrameRGB rotate90(const FrameRGB& frame) {
  // Clockwise: output (x, y) takes input (y, H-1-x); output is H wide, W tall.
  const std::uint32_t w = frame.height(), h = frame.width();
  std::vector<Rgb> px;
  px.reserve(frame.pixel_count());
  for (std::uint32_t y = 0; y < h; ++y)
    for (std::uint32_t x = 0; x < w; ++x) px.push_back(frame.at(y, frame.height() - 1 - x));
  return FrameRGB(w, h, std::move(px));
}

}  // namespace ivss::synth
