#include "ivss/bench.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "ivss/error.hpp"
#include "ivss/index_store.hpp"
#include "ivss/retrieval.hpp"

namespace ivss {

namespace {

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
T number(std::string_view s, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("manifest line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

Rgb color_at(const std::vector<int>& p, std::size_t i) {
  return {static_cast<std::uint8_t>(p[i]), static_cast<std::uint8_t>(p[i + 1]), static_cast<std::uint8_t>(p[i + 2])};
}

}  // namespace

BenchManifest parse_manifest(std::string_view text) {
  static const std::map<std::string_view, std::pair<ClassKind, std::size_t>> kKinds{
      {"solid", {ClassKind::solid, 3}},   {"texture", {ClassKind::texture, 4}},
      {"split", {ClassKind::split, 6}},   {"cut", {ClassKind::cut, 6}},
      {"dissolve", {ClassKind::dissolve, 6}}, {"mix", {ClassKind::mix, 6}}};

  BenchManifest m;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto w = words(line);
    if (w.empty()) continue;

    auto need = [&](std::size_t n) {
      if (w.size() != n)
        throw ParseError("manifest line " + std::to_string(line_no) + ": '" + std::string(w[0]) + "' takes " +
                         std::to_string(n - 1) + " argument(s)");
    };
    const std::string_view key = w[0];
    if (key == "seed") {
      need(2);
      m.seed = number<std::uint64_t>(w[1], line_no);
    } else if (key == "videos_per_class") {
      need(2);
      m.videos_per_class = number<std::size_t>(w[1], line_no);
    } else if (key == "queries_per_class") {
      need(2);
      m.queries_per_class = number<std::size_t>(w[1], line_no);
    } else if (key == "frames") {
      need(2);
      m.frames = number<std::size_t>(w[1], line_no);
    } else if (key == "size") {
      need(3);
      m.width = number<std::uint32_t>(w[1], line_no);
      m.height = number<std::uint32_t>(w[2], line_no);
    } else if (key == "k") {
      need(2);
      m.k = number<std::size_t>(w[1], line_no);
    } else if (key == "bits") {
      need(2);
      m.config.descriptors.bits = number<int>(w[1], line_no);
    } else if (key == "grid") {
      need(2);
      auto x = w[1].find('x');
      if (x == std::string_view::npos) throw ParseError("manifest line " + std::to_string(line_no) + ": grid is RxC");
      m.config.descriptors.grid_rows = number<std::uint32_t>(w[1].substr(0, x), line_no);
      m.config.descriptors.grid_cols = number<std::uint32_t>(w[1].substr(x + 1), line_no);
    } else if (key == "tau") {
      need(2);
      m.config.descriptors.tau = number<double>(w[1], line_no);
    } else if (key == "shot_threshold") {
      need(2);
      m.config.shot_threshold = number<double>(w[1], line_no);
    } else if (key == "cluster_delta") {
      need(2);
      m.config.cluster_delta = number<double>(w[1], line_no);
    } else if (key == "class") {
      if (w.size() < 3) throw ParseError("manifest line " + std::to_string(line_no) + ": class <label> <kind> ...");
      auto kind = kKinds.find(w[2]);
      if (kind == kKinds.end())
        throw ParseError("manifest line " + std::to_string(line_no) + ": unknown class kind '" + std::string(w[2]) + "'");
      need(3 + kind->second.second);
      BenchClass c{std::string(w[1]), kind->second.first, {}};
      for (std::size_t i = 3; i < w.size(); ++i) {
        int v = number<int>(w[i], line_no);
        if (v < 0 || v > 255) throw ParseError("manifest line " + std::to_string(line_no) + ": value out of [0,255]");
        c.params.push_back(v);
      }
      for (const BenchClass& other : m.classes)
        if (other.label == c.label) throw ParseError("manifest line " + std::to_string(line_no) + ": duplicate label");
      m.classes.push_back(std::move(c));
    } else {
      throw ParseError("manifest line " + std::to_string(line_no) + ": unknown directive '" + std::string(key) + "'");
    }
  }

  if (m.classes.empty()) throw EmptySourceError("manifest defines no classes");
  if (m.videos_per_class == 0 || m.queries_per_class == 0 || m.k == 0)
    throw ConfigError("videos_per_class, queries_per_class and k must be positive");
  if (m.frames < 2) throw ConfigError("bench videos need at least 2 frames");
  if (m.width < 2 || m.height < 2 || m.width % 2 || m.height % 2) throw ConfigError("bench frame size must be even");
  m.config.validate();
  return m;
}

std::vector<FrameRGB> generate_class_video(const BenchClass& cls, std::size_t frames, std::uint32_t w,
                                           std::uint32_t h, synth::Rng& rng) {
  const auto& p = cls.params;
  switch (cls.kind) {
    case ClassKind::solid: return synth::solid(synth::jitter(color_at(p, 0), 12, rng), frames, w, h);
    case ClassKind::texture: {
      const Rgb base = synth::jitter(color_at(p, 0), 8, rng);
      std::vector<FrameRGB> out;
      for (std::size_t t = 0; t < frames; ++t) out.push_back(synth::textured_frame(base, p[3], w, h, rng));
      return out;
    }
    case ClassKind::split: {
      const Rgb a = synth::jitter(color_at(p, 0), 8, rng), b = synth::jitter(color_at(p, 3), 8, rng);
      const auto col = static_cast<std::uint32_t>(synth::uniform(rng, int(w / 4), int(3 * w / 4)));
      return std::vector<FrameRGB>(frames, synth::split_frame(a, b, col, w, h));
    }
    case ClassKind::cut: {
      const Rgb a = synth::jitter(color_at(p, 0), 8, rng), b = synth::jitter(color_at(p, 3), 8, rng);
      const int lo = std::max(1, int(frames * 3 / 10)), hi = std::max(lo, int(frames * 7 / 10));
      const auto first = static_cast<std::size_t>(synth::uniform(rng, lo, hi));
      return synth::cut(a, b, first, frames - first, w, h);
    }
    case ClassKind::dissolve: {
      const Rgb a = synth::jitter(color_at(p, 0), 8, rng), b = synth::jitter(color_at(p, 3), 8, rng);
      return synth::dissolve(a, b, frames, w, h, rng());
    }
    case ClassKind::mix:
      return std::vector<FrameRGB>(frames, synth::mixed_frame(color_at(p, 0), color_at(p, 3), w, h, rng));
  }
  throw ConfigError("unknown class kind");
}

std::string_view bench_method_name(std::size_t method) {
  return method < kDescriptorCount ? descriptor_name(kAllDescriptors[method]) : std::string_view("all");
}

FeatureSelection bench_method_selection(std::size_t method) {
  return method < kDescriptorCount ? FeatureSelection::only(kAllDescriptors[method]) : FeatureSelection::all();
}

BenchReport run_bench(const BenchManifest& manifest) {
  FeatureIndex index;
  index.config = manifest.config;
  std::map<std::string, std::size_t> label_of;  // video id -> class position
  std::vector<std::vector<std::vector<KeyFrame>>> queries(manifest.classes.size());

  for (std::size_t c = 0; c < manifest.classes.size(); ++c) {
    const BenchClass& cls = manifest.classes[c];
    synth::Rng rng(manifest.seed ^ (0x9E3779B97F4A7C15ull * (c + 1)));
    for (std::size_t v = 0; v < manifest.videos_per_class; ++v) {
      auto frames = generate_class_video(cls, manifest.frames, manifest.width, manifest.height, rng);
      auto out = register_analysis(index, analyze_frames(frames, index.config), cls.label + "_" + std::to_string(v),
                                   "synthetic:" + cls.label);
      if (!out.duplicate) label_of[out.record.video_id] = c;
      index = std::move(out.index);
    }
    const std::size_t qlen = std::max<std::size_t>(2, manifest.frames / 2);
    for (std::size_t q = 0; q < manifest.queries_per_class; ++q) {
      auto frames = generate_class_video(cls, qlen, manifest.width, manifest.height, rng);
      queries[c].push_back(analyze_frames(frames, index.config).keyframes);
    }
  }

  BenchReport report;
  report.k = manifest.k;
  report.indexed_videos = index.records.size();
  report.mean.label = "mean";
  for (std::size_t c = 0; c < manifest.classes.size(); ++c) {
    BenchRow row;
    row.label = manifest.classes[c].label;
    for (std::size_t m = 0; m < kBenchMethods; ++m) {
      const FeatureSelection sel = bench_method_selection(m);
      double total = 0;
      for (const auto& q : queries[c]) {
        QueryResult r = query_keyframes(index, q, sel, manifest.k);
        std::size_t hits = 0;
        for (const RankedVideo& v : r.ranked) hits += label_of.at(v.video_id) == c;
        total += static_cast<double>(hits) / static_cast<double>(manifest.k);
      }
      row.precision[m] = total / static_cast<double>(queries[c].size());
      report.mean.precision[m] += row.precision[m] / static_cast<double>(manifest.classes.size());
    }
    report.classes.push_back(std::move(row));
  }
  return report;
}

std::string format_bench_table(const BenchReport& report) {
  std::size_t label_w = 5;
  for (const BenchRow& r : report.classes) label_w = std::max(label_w, r.label.size());
  std::ostringstream os;
  char buf[64];
  os << "precision@" << report.k << " over " << report.indexed_videos << " indexed videos\n";
  os << std::string(label_w, ' ');
  for (std::size_t m = 0; m < kBenchMethods; ++m) {
    std::snprintf(buf, sizeof buf, "  %8s", std::string(bench_method_name(m)).c_str());
    os << buf;
  }
  os << "\n";
  auto row = [&](const BenchRow& r) {
    os << r.label << std::string(label_w - r.label.size(), ' ');
    for (double p : r.precision) {
      std::snprintf(buf, sizeof buf, "  %8.3f", p);
      os << buf;
    }
    os << "\n";
  };
  for (const BenchRow& r : report.classes) row(r);
  row(report.mean);
  return os.str();
}

}  // namespace ivss
