#pragma once

// Shot segmentation by consecutive-frame histogram change, and key-frame
// selection by sequential clustering of average colors within each shot.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ivss/descriptors.hpp"
#include "ivss/frame_io.hpp"

namespace ivss {

inline constexpr double kDefaultShotThreshold = 0.35;
inline constexpr double kDefaultClusterDelta = 25.0;
inline constexpr std::uint32_t kThumbnailMaxDim = 256;

// Everything that decides how a video becomes key-frame descriptors.
struct PipelineConfig {
  DescriptorConfig descriptors;
  double shot_threshold = kDefaultShotThreshold;
  double cluster_delta = kDefaultClusterDelta;

  void validate() const;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Inclusive frame range.
struct Shot {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;

  std::size_t length() const { return end_frame - start_frame + 1; }
  friend bool operator==(const Shot&, const Shot&) = default;
};

struct KeyFrame {
  std::size_t frame_index = 0;
  std::size_t shot_id = 0;
  DescriptorSet descriptors;
  FrameRGB thumbnail;  // downscaled to kThumbnailMaxDim for display
  friend bool operator==(const KeyFrame&, const KeyFrame&) = default;
};

// Placeholder grouping level above shots; currently one scene per shot.
struct Scene {
  std::size_t first_shot = 0;
  std::size_t last_shot = 0;
};

std::vector<Shot> detect_shots(FrameSource& source, const ColorQuantizer& q, double shot_threshold);
std::vector<Shot> detect_shots(std::span<const FrameRGB> frames, const ColorQuantizer& q, double shot_threshold);

// Shots from a precomputed sequence of consecutive-frame GCH distances.
std::vector<Shot> shots_from_steps(std::span<const double> step_distances, double shot_threshold);

// Indices (into `frames`, relative to the shot) of the cluster representatives.
std::vector<std::size_t> cluster_representatives(std::span<const AvgRGB> colors, double cluster_delta);

std::vector<KeyFrame> extract_keyframes(std::span<const FrameRGB> frames, std::span<const Shot> shots,
                                        double cluster_delta, const DescriptorConfig& config);
std::vector<KeyFrame> extract_keyframes(FrameSource& source, std::span<const Shot> shots, double cluster_delta,
                                        const DescriptorConfig& config);

std::vector<Scene> group_scenes(std::span<const Shot> shots);

struct VideoAnalysis {
  std::size_t frame_count = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<Shot> shots;
  std::vector<KeyFrame> keyframes;
};

// Full pipeline: shots, then key frames with descriptors.
VideoAnalysis analyze_video(FrameSource& source, const PipelineConfig& config);
VideoAnalysis analyze_frames(std::span<const FrameRGB> frames, const PipelineConfig& config);

// Writes key_<video>_<shot>_<frame>.ppm per key frame; returns the paths.
std::vector<std::filesystem::path> export_contact_sheet(const std::filesystem::path& out_dir,
                                                        const std::string& video_name,
                                                        std::span<const KeyFrame> keyframes);

// One line per shot: "shot <id> frames <start>-<end> keyframes <i,j,...>".
std::string shot_report(const VideoAnalysis& analysis);

}  // namespace ivss
