#include <doctest.h>

#include <fstream>

#include "ivss/error.hpp"
#include "ivss/index_store.hpp"
#include "ivss/synth.hpp"
#include "test_util.hpp"

using namespace ivss;

namespace {

constexpr Rgb kRed{255, 0, 0};
constexpr Rgb kBlue{0, 0, 255};

FeatureIndex sample_index(PipelineConfig config = {}) {
  FeatureIndex idx;
  idx.config = config;
  auto a = frames_source(synth::cut(kRed, kBlue, 10, 10, 8, 6));
  idx = register_video(idx, a, "two shots").index;
  auto b = frames_source(synth::dissolve({0, 255, 0}, {255, 255, 0}, 30, 8, 6, 3));
  idx = register_video(idx, b, "dissolve").index;
  return idx;
}

void put_u32(std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = std::uint8_t(v >> (8 * i));
}

}  // namespace

TEST_CASE("registering a two-shot video") {
  FeatureIndex idx;
  auto src = frames_source(synth::cut(kRed, kBlue, 10, 10, 8, 6));
  auto out = register_video(idx, src, "cut");
  CHECK_FALSE(out.duplicate);
  REQUIRE(out.index.records.size() == 1);
  const auto& r = out.index.records[0];
  CHECK(r.shots.size() == 2);
  CHECK(r.keyframes.size() >= 2);
  CHECK(r.frame_count == 20);
  CHECK(r.display_name == "cut");
  CHECK(r.video_id.size() == 32);
  CHECK(idx.records.empty());
}

TEST_CASE("registering the same content twice keeps one record") {
  FeatureIndex idx;
  auto s1 = frames_source(synth::cut(kRed, kBlue, 10, 10, 8, 6));
  auto first = register_video(idx, s1, "a");
  auto s2 = frames_source(synth::cut(kRed, kBlue, 10, 10, 8, 6));
  auto second = register_video(first.index, s2, "b");
  CHECK(second.duplicate);
  CHECK(second.index.records.size() == 1);
  CHECK(second.record.video_id == first.record.video_id);
  CHECK(second.record.display_name == "a");
}

TEST_CASE("registering an empty source leaves the index unchanged") {
  FeatureIndex idx = sample_index();
  const FeatureIndex before = idx;
  CHECK_THROWS_AS(frames_source({}), EmptySourceError);
  auto header_only = encode_raw_stream(synth::solid(kRed, 1, 2, 2));
  header_only.resize(kRawHeaderSize);
  auto empty = open_raw_bytes(header_only);
  CHECK_THROWS_AS(register_video(idx, empty, "nothing"), EmptySourceError);
  CHECK(idx == before);
}

TEST_CASE("records from another config are rejected") {
  FeatureIndex idx;
  PipelineConfig other;
  other.descriptors.bits = 3;
  auto analysis = analyze_frames(synth::solid(kRed, 3, 4, 4), other);
  auto rec = make_record(analysis, "x", "mem");
  CHECK_THROWS_AS(add_record(idx, rec), ConfigMismatchError);
}

TEST_CASE("content ids depend only on content") {
  auto a = analyze_frames(synth::solid(kRed, 3, 4, 4), PipelineConfig{});
  auto b = analyze_frames(synth::solid(kRed, 3, 4, 4), PipelineConfig{});
  auto c = analyze_frames(synth::solid(kBlue, 3, 4, 4), PipelineConfig{});
  CHECK(content_id(a) == content_id(b));
  CHECK(content_id(a) != content_id(c));
}

TEST_CASE("save then load reproduces the index exactly") {
  testutil::TempDir dir;
  PipelineConfig odd;
  odd.descriptors.tau = 0.1 + 0.2;  // no short decimal form
  odd.cluster_delta = 1.0 / 3.0;
  FeatureIndex idx = sample_index(odd);
  save(idx, dir / "v.idx");
  CHECK(load(dir / "v.idx") == idx);
  CHECK(serialize_index(deserialize_index(serialize_index(idx))) == serialize_index(idx));

  FeatureIndex empty;
  CHECK(deserialize_index(serialize_index(empty)) == empty);
}

TEST_CASE("load rejects a future format version") {
  auto bytes = serialize_index(sample_index());
  put_u32(bytes, 8, kIndexFormatVersion + 1);
  CHECK_THROWS_AS(deserialize_index(bytes), VersionError);
}

TEST_CASE("load rejects truncated and corrupt files with an offset") {
  auto bytes = serialize_index(sample_index());
  for (std::size_t cut : {std::size_t(0), std::size_t(5), std::size_t(12), bytes.size() / 2, bytes.size() - 1}) {
    std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + std::ptrdiff_t(cut));
    try {
      deserialize_index(part);
      FAIL("expected ParseError at " << cut);
    } catch (const ParseError& e) {
      REQUIRE(e.offset().has_value());
      CHECK(*e.offset() <= cut);
    }
  }
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_index(bad), ParseError);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(deserialize_index(trailing), ParseError);
}

TEST_CASE("load of a missing file fails cleanly") {
  testutil::TempDir dir;
  CHECK_THROWS_AS(load(dir / "absent.idx"), Error);
}

TEST_CASE("save replaces an existing file") {
  testutil::TempDir dir;
  FeatureIndex idx;
  save(idx, dir / "v.idx");
  idx = sample_index();
  save(idx, dir / "v.idx");
  CHECK(load(dir / "v.idx").records.size() == 2);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  CHECK(files == 1);
}

TEST_CASE("config text round trip") {
  PipelineConfig c;
  c.descriptors.bits = 3;
  c.descriptors.grid_rows = 3;
  c.descriptors.grid_cols = 2;
  c.descriptors.tau = 0.015;
  c.shot_threshold = 0.4;
  c.cluster_delta = 12.5;
  const auto text = config_to_text(c);
  CHECK(text == "bits=3\ngrid=3x2\ntau=0.015\nshot_threshold=0.4\ncluster_delta=12.5\n");
  CHECK(config_from_text(text) == c);
  CHECK_THROWS_AS(config_from_text("bits=two\n"), ParseError);
}

TEST_CASE("find looks up by id") {
  auto idx = sample_index();
  CHECK(idx.find(idx.records[1].video_id) == &idx.records[1]);
  CHECK(idx.find("nope") == nullptr);
}
