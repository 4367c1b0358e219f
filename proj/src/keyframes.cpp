#include "ivss/keyframes.hpp"

#include <sstream>

#include "ivss/error.hpp"

namespace ivss {

void PipelineConfig::validate() const {
  descriptors.validate();
  if (!(shot_threshold > 0.0)) throw ConfigError("shot threshold must be positive");
  if (!(cluster_delta >= 0.0)) throw ConfigError("cluster delta must be non-negative");
}

std::vector<Shot> shots_from_steps(std::span<const double> step_distances, double shot_threshold) {
  if (!(shot_threshold > 0.0)) throw ConfigError("shot threshold must be positive");
  std::vector<Shot> shots;
  std::size_t start = 0;
  for (std::size_t t = 0; t < step_distances.size(); ++t) {
    if (step_distances[t] > shot_threshold) {
      shots.push_back({start, t});
      start = t + 1;
    }
  }
  shots.push_back({start, step_distances.size()});
  return shots;
}

std::vector<Shot> detect_shots(FrameSource& source, const ColorQuantizer& q, double shot_threshold) {
  if (!(shot_threshold > 0.0)) throw ConfigError("shot threshold must be positive");
  std::vector<double> steps;
  std::optional<Histogram> prev;
  std::size_t count = 0;
  while (auto frame = source.next()) {
    Histogram h = build_histogram(*frame, q);
    if (prev) steps.push_back(dist_gch(*prev, h));
    prev = std::move(h);
    ++count;
  }
  if (count == 0) throw EmptySourceError("no frames in " + source.locator());
  return shots_from_steps(steps, shot_threshold);
}

std::vector<Shot> detect_shots(std::span<const FrameRGB> frames, const ColorQuantizer& q, double shot_threshold) {
  if (frames.empty()) throw EmptySourceError("no frames");
  if (!(shot_threshold > 0.0)) throw ConfigError("shot threshold must be positive");
  std::vector<double> steps;
  steps.reserve(frames.size() - 1);
  Histogram prev = build_histogram(frames[0], q);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    Histogram h = build_histogram(frames[t], q);
    steps.push_back(dist_gch(prev, h));
    prev = std::move(h);
  }
  return shots_from_steps(steps, shot_threshold);
}

std::vector<std::size_t> cluster_representatives(std::span<const AvgRGB> colors, double cluster_delta) {
  struct Cluster {
    AvgRGB centroid;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    if (!clusters.empty() && dist_avg_rgb(clusters.back().centroid, colors[i]) <= cluster_delta) {
      Cluster& c = clusters.back();
      c.members.push_back(i);
      const double n = static_cast<double>(c.members.size());
      c.centroid.r += (colors[i].r - c.centroid.r) / n;
      c.centroid.g += (colors[i].g - c.centroid.g) / n;
      c.centroid.b += (colors[i].b - c.centroid.b) / n;
    } else {
      clusters.push_back({colors[i], {i}});
    }
  }

  std::vector<std::size_t> reps;
  reps.reserve(clusters.size());
  for (const Cluster& c : clusters) {
    std::size_t best = c.members.front();
    double best_d = dist_avg_rgb(colors[best], c.centroid);
    for (std::size_t m : c.members) {
      const double d = dist_avg_rgb(colors[m], c.centroid);
      if (d < best_d) {
        best = m;
        best_d = d;
      }
    }
    reps.push_back(best);
  }
  return reps;
}

std::vector<KeyFrame> extract_keyframes(std::span<const FrameRGB> frames, std::span<const Shot> shots,
                                        double cluster_delta, const DescriptorConfig& config) {
  config.validate();
  if (!(cluster_delta >= 0.0)) throw ConfigError("cluster delta must be non-negative");
  std::vector<KeyFrame> out;
  for (std::size_t s = 0; s < shots.size(); ++s) {
    const Shot& shot = shots[s];
    if (shot.start_frame > shot.end_frame || shot.end_frame >= frames.size())
      throw ConfigMismatchError("shot " + std::to_string(s) + " lies outside the frame range");
    std::vector<AvgRGB> colors;
    colors.reserve(shot.length());
    for (std::size_t t = shot.start_frame; t <= shot.end_frame; ++t) colors.push_back(compute_avg_rgb(frames[t]));
    // Clusters are formed in temporal order, so representatives come out ascending.
    for (std::size_t rel : cluster_representatives(colors, cluster_delta)) {
      const std::size_t idx = shot.start_frame + rel;
      out.push_back({idx, s, extract_all(frames[idx], config), downscale(frames[idx], kThumbnailMaxDim)});
    }
  }
  return out;
}

std::vector<KeyFrame> extract_keyframes(FrameSource& source, std::span<const Shot> shots, double cluster_delta,
                                        const DescriptorConfig& config) {
  auto frames = read_all(source);
  return extract_keyframes(frames, shots, cluster_delta, config);
}

std::vector<Scene> group_scenes(std::span<const Shot> shots) {
  std::vector<Scene> scenes;
  scenes.reserve(shots.size());
  for (std::size_t s = 0; s < shots.size(); ++s) scenes.push_back({s, s});
  return scenes;
}

VideoAnalysis analyze_frames(std::span<const FrameRGB> frames, const PipelineConfig& config) {
  config.validate();
  if (frames.empty()) throw EmptySourceError("no frames");
  VideoAnalysis a;
  a.frame_count = frames.size();
  a.width = frames[0].width();
  a.height = frames[0].height();
  a.shots = detect_shots(frames, config.descriptors.quantizer(), config.shot_threshold);
  a.keyframes = extract_keyframes(frames, a.shots, config.cluster_delta, config.descriptors);
  return a;
}

VideoAnalysis analyze_video(FrameSource& source, const PipelineConfig& config) {
  config.validate();
  auto frames = read_all(source);
  if (frames.empty()) throw EmptySourceError("no frames in " + source.locator());
  return analyze_frames(frames, config);
}

std::vector<std::filesystem::path> export_contact_sheet(const std::filesystem::path& out_dir,
                                                        const std::string& video_name,
                                                        std::span<const KeyFrame> keyframes) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> paths;
  for (const KeyFrame& k : keyframes) {
    auto path = out_dir / ("key_" + video_name + "_" + std::to_string(k.shot_id) + "_" +
                           std::to_string(k.frame_index) + ".ppm");
    write_ppm_file(k.thumbnail, path);
    paths.push_back(std::move(path));
  }
  return paths;
}

std::string shot_report(const VideoAnalysis& analysis) {
  std::ostringstream os;
  os << "frames " << analysis.frame_count << " shots " << analysis.shots.size() << " keyframes "
     << analysis.keyframes.size() << "\n";
  for (std::size_t s = 0; s < analysis.shots.size(); ++s) {
    os << "shot " << s << " frames " << analysis.shots[s].start_frame << "-" << analysis.shots[s].end_frame
       << " keyframes ";
    bool first = true;
    for (const KeyFrame& k : analysis.keyframes) {
      if (k.shot_id != s) continue;
      os << (first ? "" : ",") << k.frame_index;
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace ivss
