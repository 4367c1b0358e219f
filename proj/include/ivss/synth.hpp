#pragma once

// Seeded synthetic video generators for tests, demos and the benchmark.

#include <cstdint>
#include <random>
#include <vector>

#include "ivss/frame_io.hpp"

namespace ivss::synth {

using Rng = std::mt19937_64;

// Uniform integer in [lo, hi].
int uniform(Rng& rng, int lo, int hi);

std::vector<FrameRGB> solid(Rgb color, std::size_t frames, std::uint32_t w, std::uint32_t h);

// `first_len` frames of a, then `second_len` frames of b.
std::vector<FrameRGB> cut(Rgb a, Rgb b, std::size_t first_len, std::size_t second_len, std::uint32_t w,
                          std::uint32_t h);

// Pixel dissolve from a to b: every pixel switches color once, at a frame
// given by a seeded random ordering, so each step changes only about
// w*h/(frames-1) pixels. Frame 0 is all a, the last frame all b.
std::vector<FrameRGB> dissolve(Rgb a, Rgb b, std::size_t frames, std::uint32_t w, std::uint32_t h,
                               std::uint64_t seed);

// Left part a, right part b, split at column `split`.
FrameRGB split_frame(Rgb a, Rgb b, std::uint32_t split, std::uint32_t w, std::uint32_t h);

// Base color plus independent uniform noise in [-amplitude, amplitude] per channel.
FrameRGB textured_frame(Rgb base, int amplitude, std::uint32_t w, std::uint32_t h, Rng& rng);

// Exactly half the pixels a and half b (w*h even), in a random spatial
// layout: scattered noise, or a checkerboard or halves pattern at a random
// wrap-around offset.
FrameRGB mixed_frame(Rgb a, Rgb b, std::uint32_t w, std::uint32_t h, Rng& rng);

Rgb jitter(Rgb c, int amount, Rng& rng);

FrameRGB rotate90(const FrameRGB& frame);

}  // namespace ivss::synth
