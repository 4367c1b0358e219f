#pragma once

// The feature index: registered videos with their shots and key-frame
// descriptors, persisted as a single IVSSIDX1 file.
//
// File layout (all integers and reals little-endian):
//
//   "IVSSIDX1"                       8 bytes
//   format_version                   u32
//   config_length                    u32
//   config text                      config_length bytes, "key=value\n" lines
//   record_count                     u64
//   record_count x {
//     block_length                   u64
//     record block                   block_length bytes
//   }
//
// A record block holds strings as u32 length + bytes, counts as u32/u64,
// and every descriptor value as an IEEE-754 binary64, so a load/save cycle
// reproduces all numbers exactly. See docs/index_format.md for the block
// field order.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ivss/frame_io.hpp"
#include "ivss/keyframes.hpp"

namespace ivss {

inline constexpr std::string_view kIndexMagic = "IVSSIDX1";
inline constexpr std::uint32_t kIndexFormatVersion = 1;

struct VideoRecord {
  std::string video_id;
  std::string display_name;
  std::string source_locator;
  std::uint64_t frame_count = 0;
  std::vector<Shot> shots;
  std::vector<KeyFrame> keyframes;
  std::int64_t indexed_at = 0;  // seconds since the Unix epoch

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct FeatureIndex {
  PipelineConfig config;
  std::vector<VideoRecord> records;
  std::uint32_t format_version = kIndexFormatVersion;

  const VideoRecord* find(std::string_view video_id) const;
  bool empty() const { return records.empty(); }

  friend bool operator==(const FeatureIndex&, const FeatureIndex&) = default;
};

// Hex id derived from the shots and descriptor payload of an analysis.
std::string content_id(const VideoAnalysis& analysis);

VideoRecord make_record(const VideoAnalysis& analysis, std::string display_name, std::string source_locator);

struct RegisterOutcome {
  FeatureIndex index;   // the index after registration
  VideoRecord record;   // the new record, or the existing one on a duplicate
  bool duplicate = false;
};

// Runs the pipeline with the index config and appends the record. Identical
// content maps to the same id; registering it again leaves the index as is.
RegisterOutcome register_video(const FeatureIndex& index, FrameSource& source, std::string display_name);
RegisterOutcome register_analysis(const FeatureIndex& index, const VideoAnalysis& analysis, std::string display_name,
                                  std::string source_locator);

// Appends a prepared record. Rejects descriptors computed under another config.
RegisterOutcome add_record(const FeatureIndex& index, VideoRecord record);

std::vector<std::uint8_t> serialize_index(const FeatureIndex& index);
FeatureIndex deserialize_index(std::span<const std::uint8_t> bytes);

// Writes to a sibling temp file and renames it over `path`.
void save(const FeatureIndex& index, const std::filesystem::path& path);
FeatureIndex load(const std::filesystem::path& path);

// Structured-text form of a pipeline config, as stored in the file header.
std::string config_to_text(const PipelineConfig& config);
PipelineConfig config_from_text(std::string_view text);

}  // namespace ivss
