#pragma once

// Query-by-clip: the query's key frames are matched against every indexed
// video and the per-key-frame best matches are aggregated to one score.

#include <span>
#include <string>
#include <vector>

#include "ivss/index_store.hpp"
#include "ivss/similarity.hpp"

namespace ivss {

enum class Aggregation {
  mean_of_minima,      // mean over query key frames of the best candidate match
  min_of_minima,       // single best key-frame pair
  symmetric_hausdorff  // max of both directed worst best-matches
};

// Key frames are identified by frame index within their video.
struct KeyFrameMatch {
  std::size_t query_frame = 0;
  std::size_t db_frame = 0;
  double distance = 0;
  friend bool operator==(const KeyFrameMatch&, const KeyFrameMatch&) = default;
};

struct RankedVideo {
  std::string video_id;
  double distance = 0;
  std::vector<KeyFrameMatch> best_matches;  // one per query key frame
  friend bool operator==(const RankedVideo&, const RankedVideo&) = default;
};

// Sorted by distance ascending, ties by video_id.
struct QueryResult {
  std::vector<RankedVideo> ranked;
  FeatureSelection selection_used;
  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

RankedVideo score_candidate(std::span<const KeyFrame> query, const VideoRecord& candidate,
                            const FeatureSelection& sel, const NormalizerProfile& norm,
                            Aggregation agg = Aggregation::mean_of_minima);

QueryResult query_keyframes(const FeatureIndex& index, std::span<const KeyFrame> query, const FeatureSelection& sel,
                            std::size_t top_k, Aggregation agg = Aggregation::mean_of_minima);

// Runs the index's pipeline on the query, then ranks.
QueryResult query_by_clip(const FeatureIndex& index, FrameSource& query, const FeatureSelection& sel,
                          std::size_t top_k, Aggregation agg = Aggregation::mean_of_minima);

// Distance from `query` to `candidate` under the same aggregation as
// query_by_clip. Directional: compare_pair(a, b) need not equal compare_pair(b, a).
double compare_pair(FrameSource& query, FrameSource& candidate, const FeatureSelection& sel,
                    const PipelineConfig& config = {}, Aggregation agg = Aggregation::mean_of_minima);

// Line-oriented, tab-separated result document:
//
//   ivss-result<TAB>1
//   selection<TAB>gch:1,ccv:1
//   <rank><TAB><video_id><TAB><distance %.6f><TAB><q>:<d>:<dist %.6f>;...
std::string format_structured(const QueryResult& result);
QueryResult parse_structured(std::string_view text);

// Human-readable listing; names resolved through the index.
std::string format_text(const QueryResult& result, const FeatureIndex& index);

}  // namespace ivss
