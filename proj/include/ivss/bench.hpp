#pragma once

// Per-descriptor retrieval benchmark over a seeded, labeled synthetic corpus.
//
// Manifest format, one directive per line, '#' starts a comment:
//
//   seed 42                  RNG seed
//   videos_per_class 6       indexed videos generated per class
//   queries_per_class 2      query clips generated per class (never indexed)
//   frames 12                frames per indexed video (queries get half)
//   size 32 24               frame width and height
//   k 5                      precision cut-off
//   bits 2 | grid 2x2 | tau 0.01 | shot_threshold 0.35 | cluster_delta 25
//   class <label> <kind> <params...>
//
// Class kinds:
//   solid R G B              jittered solid color
//   texture R G B A          noisy color, per-channel amplitude A
//   split R G B R G B        two colors side by side, random split column
//   cut R G B R G B          two shots, random cut position
//   dissolve R G B R G B     pixel dissolve from the first color to the second
//   mix R G B R G B          exact 50/50 mix of two colors, random layout

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ivss/keyframes.hpp"
#include "ivss/similarity.hpp"
#include "ivss/synth.hpp"

namespace ivss {

enum class ClassKind { solid, texture, split, cut, dissolve, mix };

struct BenchClass {
  std::string label;
  ClassKind kind = ClassKind::solid;
  std::vector<int> params;
};

struct BenchManifest {
  std::uint64_t seed = 42;
  std::size_t videos_per_class = 6;
  std::size_t queries_per_class = 2;
  std::size_t frames = 12;
  std::uint32_t width = 32;
  std::uint32_t height = 24;
  std::size_t k = 5;
  PipelineConfig config;
  std::vector<BenchClass> classes;
};

BenchManifest parse_manifest(std::string_view text);

// Generates one video of the class; `frames` controls its length.
std::vector<FrameRGB> generate_class_video(const BenchClass& cls, std::size_t frames, std::uint32_t w,
                                           std::uint32_t h, synth::Rng& rng);

inline constexpr std::size_t kBenchMethods = kDescriptorCount + 1;  // five singles + all

struct BenchRow {
  std::string label;
  std::array<double, kBenchMethods> precision{};
};

struct BenchReport {
  std::size_t k = 5;
  std::size_t indexed_videos = 0;
  std::vector<BenchRow> classes;
  BenchRow mean;
};

std::string_view bench_method_name(std::size_t method);
FeatureSelection bench_method_selection(std::size_t method);

BenchReport run_bench(const BenchManifest& manifest);
std::string format_bench_table(const BenchReport& report);

}  // namespace ivss
