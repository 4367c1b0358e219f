#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ivss/bench.hpp"
#include "ivss/error.hpp"

using namespace ivss;

namespace {

std::string read_text(const std::string& rel) {
  std::ifstream in(std::string(IVSS_SOURCE_DIR) + "/" + rel);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr std::size_t kAll = kDescriptorCount;
constexpr std::size_t col(Descriptor d) { return static_cast<std::size_t>(d); }

}  // namespace

TEST_CASE("manifest parsing") {
  auto m = parse_manifest("# c\nseed 9\nsize 8 6\nk 3\ngrid 1x2\nclass a solid 1 2 3\nclass b mix 0 0 0 255 255 255 # x\n");
  CHECK(m.seed == 9);
  CHECK(m.width == 8);
  CHECK(m.height == 6);
  CHECK(m.k == 3);
  CHECK(m.config.descriptors.grid_cols == 2);
  REQUIRE(m.classes.size() == 2);
  CHECK(m.classes[1].kind == ClassKind::mix);
  CHECK(m.classes[1].params == std::vector<int>{0, 0, 0, 255, 255, 255});

  CHECK_THROWS_AS(parse_manifest(""), EmptySourceError);
  CHECK_THROWS_AS(parse_manifest("seed 1\n# nothing else\n"), EmptySourceError);
  CHECK_THROWS_AS(parse_manifest("class a wobble 1 2 3\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("class a solid 1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("class a solid 1 2 300\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("class a solid 1 2 3\nclass a solid 1 2 3\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("speed 3\nclass a solid 1 2 3\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("size 7 6\nclass a solid 1 2 3\n"), ConfigError);
}

TEST_CASE("bench output is deterministic") {
  auto m = parse_manifest(read_text("bench/default.manifest"));
  const auto a = format_bench_table(run_bench(m));
  const auto b = format_bench_table(run_bench(m));
  CHECK(a == b);
  CHECK(a.rfind("precision@5 over ", 0) == 0);
  CHECK(a.find("avg_rgb") != std::string::npos);
}

TEST_CASE("integration is never below the worst single descriptor") {
  for (const char* file : {"bench/default.manifest", "bench/gch_only.manifest"}) {
    auto report = run_bench(parse_manifest(read_text(file)));
    for (const auto& row : report.classes) {
      const double worst = *std::min_element(row.precision.begin(), row.precision.begin() + kDescriptorCount);
      CHECK_MESSAGE(row.precision[kAll] >= worst, file << " " << row.label);
    }
  }
}

TEST_CASE("GCH wins on a corpus only histograms can separate") {
  auto report = run_bench(parse_manifest(read_text("bench/gch_only.manifest")));
  const auto& p = report.mean.precision;
  for (std::size_t m = 0; m < kDescriptorCount; ++m) CHECK(p[col(Descriptor::gch)] >= p[m]);
  CHECK(p[col(Descriptor::gch)] > p[col(Descriptor::avg_rgb)]);
  CHECK(p[col(Descriptor::gch)] > p[col(Descriptor::moments)]);
}

TEST_CASE("class generators honor their kind") {
  synth::Rng rng(1);
  BenchClass mix{"m", ClassKind::mix, {0, 0, 0, 255, 255, 255}};
  auto v = generate_class_video(mix, 3, 8, 6, rng);
  REQUIRE(v.size() == 3);
  std::size_t black = 0;
  for (Rgb p : v[0].pixels()) black += p == Rgb{0, 0, 0};
  CHECK(black == 24);

  BenchClass cut{"c", ClassKind::cut, {255, 0, 0, 0, 0, 255}};
  auto c = generate_class_video(cut, 10, 4, 4, rng);
  CHECK(c.size() == 10);
  CHECK(c.front() != c.back());
}
