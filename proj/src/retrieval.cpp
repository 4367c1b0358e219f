#include "ivss/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ivss/error.hpp"

namespace ivss {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    auto p = s.find(sep);
    out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view s, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError("bad number '" + std::string(s) + "' on result line " + std::to_string(line));
  return v;
}

}  // namespace

RankedVideo score_candidate(std::span<const KeyFrame> query, const VideoRecord& candidate,
                            const FeatureSelection& sel, const NormalizerProfile& norm, Aggregation agg) {
  if (query.empty()) throw EmptySourceError("query has no key frames");
  if (candidate.keyframes.empty()) throw EmptySourceError("candidate " + candidate.video_id + " has no key frames");

  const std::size_t nq = query.size(), nc = candidate.keyframes.size();
  std::vector<double> pair(nq * nc);
  for (std::size_t i = 0; i < nq; ++i)
    for (std::size_t j = 0; j < nc; ++j)
      pair[i * nc + j] = integrated_distance(query[i].descriptors, candidate.keyframes[j].descriptors, sel, norm);

  RankedVideo out;
  out.video_id = candidate.video_id;
  double sum = 0, best = std::numeric_limits<double>::infinity(), worst_q = 0;
  for (std::size_t i = 0; i < nq; ++i) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < nc; ++j)
      if (pair[i * nc + j] < pair[i * nc + arg]) arg = j;
    const double d = pair[i * nc + arg];
    out.best_matches.push_back({query[i].frame_index, candidate.keyframes[arg].frame_index, d});
    sum += d;
    best = std::min(best, d);
    worst_q = std::max(worst_q, d);
  }

  switch (agg) {
    case Aggregation::mean_of_minima: out.distance = sum / static_cast<double>(nq); break;
    case Aggregation::min_of_minima: out.distance = best; break;
    case Aggregation::symmetric_hausdorff: {
      double worst_c = 0;
      for (std::size_t j = 0; j < nc; ++j) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nq; ++i) m = std::min(m, pair[i * nc + j]);
        worst_c = std::max(worst_c, m);
      }
      out.distance = std::max(worst_q, worst_c);
      break;
    }
  }
  return out;
}

QueryResult query_keyframes(const FeatureIndex& index, std::span<const KeyFrame> query, const FeatureSelection& sel,
                            std::size_t top_k, Aggregation agg) {
  if (index.empty()) throw EmptyIndexError("the index contains no videos");
  if (top_k == 0) throw ConfigError("top_k must be at least 1");
  sel.validate();
  const NormalizerProfile norm = default_normalizer(index.config.descriptors);

  QueryResult result;
  result.selection_used = sel;
  result.ranked.reserve(index.records.size());
  for (const VideoRecord& rec : index.records) result.ranked.push_back(score_candidate(query, rec, sel, norm, agg));
  std::sort(result.ranked.begin(), result.ranked.end(), [](const RankedVideo& a, const RankedVideo& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.video_id < b.video_id;
  });
  if (result.ranked.size() > top_k) result.ranked.resize(top_k);
  return result;
}

QueryResult query_by_clip(const FeatureIndex& index, FrameSource& query, const FeatureSelection& sel,
                          std::size_t top_k, Aggregation agg) {
  if (index.empty()) throw EmptyIndexError("the index contains no videos");
  VideoAnalysis a = analyze_video(query, index.config);
  return query_keyframes(index, a.keyframes, sel, top_k, agg);
}

double compare_pair(FrameSource& query, FrameSource& candidate, const FeatureSelection& sel,
                    const PipelineConfig& config, Aggregation agg) {
  sel.validate();
  VideoAnalysis q = analyze_video(query, config);
  VideoAnalysis c = analyze_video(candidate, config);
  VideoRecord rec;
  rec.video_id = "candidate";
  rec.keyframes = std::move(c.keyframes);
  return score_candidate(q.keyframes, rec, sel, default_normalizer(config.descriptors), agg).distance;
}

std::string format_structured(const QueryResult& result) {
  std::string out = "ivss-result\t1\nselection\t" + result.selection_used.to_string() + "\n";
  for (std::size_t r = 0; r < result.ranked.size(); ++r) {
    const RankedVideo& v = result.ranked[r];
    out += std::to_string(r + 1) + "\t" + v.video_id + "\t" + fixed6(v.distance) + "\t";
    for (std::size_t m = 0; m < v.best_matches.size(); ++m) {
      const KeyFrameMatch& k = v.best_matches[m];
      if (m) out += ';';
      out += std::to_string(k.query_frame) + ":" + std::to_string(k.db_frame) + ":" + fixed6(k.distance);
    }
    out += "\n";
  }
  return out;
}

QueryResult parse_structured(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || !lines[0].starts_with("ivss-result\t")) throw ParseError("not an ivss-result document");
  if (lines[0] != "ivss-result\t1") throw VersionError("unsupported result version: " + std::string(lines[0].substr(12)));
  if (lines.size() < 2) throw ParseError("missing selection line");
  auto sel = split(lines[1], '\t');
  if (sel.size() != 2 || sel[0] != "selection") throw ParseError("missing selection line");

  QueryResult result;
  try {
    result.selection_used = FeatureSelection::parse(sel[1]);
  } catch (const SelectionError& e) {
    throw ParseError(std::string("bad selection in result: ") + e.what());
  }
  for (std::size_t i = 2; i < lines.size(); ++i) {
    auto fields = split(lines[i], '\t');
    if (fields.size() != 4) throw ParseError("result line " + std::to_string(i + 1) + " needs 4 fields");
    if (parse_number<std::size_t>(fields[0], i + 1) != i - 1)
      throw ParseError("rank out of sequence on line " + std::to_string(i + 1));
    RankedVideo v;
    v.video_id = std::string(fields[1]);
    v.distance = parse_number<double>(fields[2], i + 1);
    if (!fields[3].empty()) {
      for (std::string_view pair : split(fields[3], ';')) {
        auto parts = split(pair, ':');
        if (parts.size() != 3) throw ParseError("bad key-frame match '" + std::string(pair) + "'");
        v.best_matches.push_back({parse_number<std::size_t>(parts[0], i + 1),
                                  parse_number<std::size_t>(parts[1], i + 1), parse_number<double>(parts[2], i + 1)});
      }
    }
    result.ranked.push_back(std::move(v));
  }
  return result;
}

std::string format_text(const QueryResult& result, const FeatureIndex& index) {
  std::ostringstream os;
  os << "selection: " << result.selection_used.to_string() << "\n";
  for (std::size_t r = 0; r < result.ranked.size(); ++r) {
    const RankedVideo& v = result.ranked[r];
    const VideoRecord* rec = index.find(v.video_id);
    os << r + 1 << ". " << (rec ? rec->display_name : std::string("?")) << " [" << v.video_id << "]  distance "
       << fixed6(v.distance) << "\n";
    for (const KeyFrameMatch& m : v.best_matches)
      os << "     query frame " << m.query_frame << " ~ frame " << m.db_frame << "  (" << fixed6(m.distance) << ")\n";
  }
  return os.str();
}

}  // namespace ivss
