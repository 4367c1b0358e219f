// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "api_fixture.hpp"
#include "figures.hpp"
#include "ivss/bench.hpp"
#include "ivss/cli.hpp"
#include "ivss/descriptors.hpp"
#include "ivss/index_store.hpp"
#include "ivss/retrieval.hpp"
#include "ivss/synth.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace ivss;
using Clock = std::chrono::steady_clock;

namespace {

// Collects the first few failure notes for a criterion.
struct Check {
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (failures++ == 0) first = what;
  }
  void close(double got, double want, double tol, const std::string& what) {
    expect(std::abs(got - want) <= tol, what + ": got " + std::to_string(got) + " want " + std::to_string(want));
  }
};

int failed = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failed;
}

void report(const char* name, const Check& c, const std::string& detail) {
  if (c.failures == 0)
    report(name, true, detail + " (" + std::to_string(c.checks) + " checks)");
  else
    report(name, false, std::to_string(c.failures) + "/" + std::to_string(c.checks) + " checks failed; first: " + c.first);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> flat(const std::array<ChannelMoments, 3>& m) {
  return {m[0].mean, m[0].stddev, m[0].skewness, m[1].mean, m[1].stddev, m[1].skewness,
          m[2].mean, m[2].stddev, m[2].skewness};
}

std::array<std::array<double, 3>, 3> grid(const Moments& m) {
  std::array<std::array<double, 3>, 3> out{};
  for (int c = 0; c < 3; ++c) out[c] = {m.channel[c].mean, m.channel[c].stddev, m.channel[c].skewness};
  return out;
}

void golden_gch() {
  const Histogram a{{0.25, 0.25, 0.50}, 16}, b{{0.1875, 0.375, 0.4375}, 16};
  double d = 0;
  double best_us = 1e9;
  for (int i = 0; i < 5; ++i) {
    const auto t0 = Clock::now();
    d = dist_gch(a, b);
    best_us = std::min(best_us, std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
  }
  ColorQuantizer q(2);
  const double from_images = dist_gch(compute_gch(figures::image_a(), q), compute_gch(figures::image_b(), q));
  const bool ok = std::abs(d - 0.153) <= 0.001 && std::abs(from_images - 0.153) <= 0.001 && best_us < 1000.0;
  report("golden GCH distance", ok,
         "d=" + fmt("%.6f", d) + " from images " + fmt("%.6f", from_images) + ", " + fmt("%.2f", best_us) + " us");
}

void golden_lch() {
  ColorQuantizer q(2);
  const double d = dist_lch(compute_lch(figures::image_a(), q, 2, 2), compute_lch(figures::image_b(), q, 2, 2));
  report("golden LCH distance", std::abs(d - 1.768) <= 0.005, "d=" + fmt("%.6f", d));
}

void rotation_property() {
  ColorQuantizer q(2);
  const FrameRGB d = figures::image_d(), d_rot = synth::rotate90(d), e = figures::image_e();
  const double g1 = dist_gch(compute_gch(d, q), compute_gch(e, q));
  const double g2 = dist_gch(compute_gch(d_rot, q), compute_gch(e, q));
  const double l1 = dist_lch(compute_lch(d, q, 2, 2), compute_lch(e, q, 2, 2));
  const double l2 = dist_lch(compute_lch(d_rot, q, 2, 2), compute_lch(e, q, 2, 2));
  report("rotation changes LCH only", std::abs(g1 - g2) <= 1e-12 && l1 > l2,
         "gch " + fmt("%.6f", g1) + "/" + fmt("%.6f", g2) + ", lch " + fmt("%.6f", l1) + " > " + fmt("%.6f", l2));
}

FrameRGB random_small(synth::Rng& rng, std::uint32_t w, std::uint32_t h) {
  std::vector<Rgb> palette;
  if (rng() % 2)
    for (int i = 0; i < 3; ++i) palette.push_back({std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())});
  std::vector<Rgb> px(std::size_t(w) * h);
  for (Rgb& p : px)
    p = palette.empty() ? Rgb{std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())} : palette[rng() % 3];
  return FrameRGB(w, h, std::move(px));
}

void oracle_equivalence() {
  constexpr double kTol = 1e-12;
  Check c;
  synth::Rng rng(20240601);
  std::size_t frames = 0;
  for (int pair = 0; pair < 600; ++pair) {
    const auto w = std::uint32_t(1 + rng() % 8), h = std::uint32_t(1 + rng() % 8);
    const int bits = 1 + int(rng() % 2);
    const std::uint32_t rows = std::min<std::uint32_t>(2, h), cols = std::min<std::uint32_t>(2, w);
    const double tau = std::array{0.01, 0.05, 0.1, 0.25}[rng() % 4];
    const FrameRGB fa = random_small(rng, w, h), fb = random_small(rng, w, h);
    frames += 2;
    const ColorQuantizer q(bits);
    const std::string tag = "pair " + std::to_string(pair);

    for (const FrameRGB* f : {&fa, &fb}) {
      const auto gch = compute_gch(*f, q).histogram.bins;
      const auto want_gch = oracle::histogram(*f, bits);
      for (std::size_t i = 0; i < gch.size(); ++i) c.close(gch[i], want_gch[i], kTol, tag + " gch");

      const auto avg = compute_avg_rgb(*f);
      const auto want_avg = oracle::avg_rgb(*f);
      c.close(avg.r, want_avg[0], kTol, tag + " avg r");
      c.close(avg.g, want_avg[1], kTol, tag + " avg g");
      c.close(avg.b, want_avg[2], kTol, tag + " avg b");

      const auto mom = flat(compute_moments(*f).channel);
      const auto want_mom = oracle::moments(*f);
      for (int i = 0; i < 9; ++i) c.close(mom[std::size_t(i)], want_mom[i / 3][i % 3], kTol, tag + " moments");

      const auto lch = compute_lch(*f, q, rows, cols);
      const auto want_lch = oracle::lch(*f, bits, int(rows), int(cols));
      for (std::size_t k = 0; k < want_lch.size(); ++k)
        for (std::size_t i = 0; i < want_lch[k].size(); ++i) c.close(lch.blocks[k].bins[i], want_lch[k][i], kTol, tag + " lch");

      const auto ccv = compute_ccv(*f, q, tau);
      const auto [coh, inc] = oracle::ccv(*f, bits, tau);
      for (std::size_t i = 0; i < coh.size(); ++i) {
        c.close(ccv.coherent[i], coh[i], kTol, tag + " ccv coherent");
        c.close(ccv.incoherent[i], inc[i], kTol, tag + " ccv incoherent");
      }
    }

    const auto ga = compute_gch(fa, q), gb = compute_gch(fb, q);
    c.close(dist_gch(ga, gb), oracle::euclid(oracle::histogram(fa, bits), oracle::histogram(fb, bits)), kTol, tag + " d_gch");
    const auto aa = oracle::avg_rgb(fa), ab = oracle::avg_rgb(fb);
    c.close(dist_avg_rgb(compute_avg_rgb(fa), compute_avg_rgb(fb)),
            oracle::euclid({aa[0], aa[1], aa[2]}, {ab[0], ab[1], ab[2]}), kTol, tag + " d_avg");
    c.close(dist_lch(compute_lch(fa, q, rows, cols), compute_lch(fb, q, rows, cols)),
            oracle::lch_distance(oracle::lch(fa, bits, int(rows), int(cols)), oracle::lch(fb, bits, int(rows), int(cols))),
            kTol, tag + " d_lch");
    MomentWeights wts{};
    std::array<std::array<double, 3>, 3> owts{};
    for (int i = 0; i < 3; ++i)
      for (int m = 0; m < 3; ++m) owts[i][m] = wts[i][m] = double(rng() % 1000) / 250.0;
    const Moments ma = compute_moments(fa), mb = compute_moments(fb);
    c.close(dist_moments(ma, mb, wts), oracle::moments_distance(grid(ma), grid(mb), owts), kTol, tag + " d_moments");
    const auto [ca, ia] = oracle::ccv(fa, bits, tau);
    const auto [cb, ib] = oracle::ccv(fb, bits, tau);
    c.close(dist_ccv(compute_ccv(fa, q, tau), compute_ccv(fb, q, tau)), oracle::l1(ca, cb) + oracle::l1(ia, ib), kTol,
            tag + " d_ccv");
  }
  report("oracle equivalence", c, std::to_string(frames) + " frames <= 8x8 at 1-2 bits");
}

void metric_and_partition() {
  Check c;
  synth::Rng rng(77);
  const DescriptorConfig cfg{.bits = 2, .grid_rows = 2, .grid_cols = 2, .tau = 0.05};
  std::vector<std::function<double(const DescriptorSet&, const DescriptorSet&)>> dists{
      [](const auto& a, const auto& b) { return dist_gch(a.gch, b.gch); },
      [](const auto& a, const auto& b) { return dist_lch(a.lch, b.lch); },
      [](const auto& a, const auto& b) { return dist_moments(a.moments, b.moments); },
      [](const auto& a, const auto& b) { return dist_ccv(a.ccv, b.ccv); }};
  const char* names[] = {"gch", "lch", "moments", "ccv"};

  for (int t = 0; t < 300; ++t) {
    const auto w = std::uint32_t(2 + rng() % 7), h = std::uint32_t(2 + rng() % 7);
    std::array<DescriptorSet, 3> s;
    std::array<FrameRGB, 3> f;
    for (int i = 0; i < 3; ++i) {
      f[i] = random_small(rng, w, h);
      s[i] = extract_all(f[i], cfg);
    }
    for (std::size_t k = 0; k < dists.size(); ++k) {
      const std::string n = names[k];
      const double ab = dists[k](s[0], s[1]), ba = dists[k](s[1], s[0]);
      const double bc = dists[k](s[1], s[2]), ac = dists[k](s[0], s[2]);
      c.expect(ab >= 0 && bc >= 0 && ac >= 0, n + " non-negative");
      c.expect(dists[k](s[0], s[0]) == 0.0, n + " identity");
      c.expect(ab == ba, n + " symmetry");
      c.expect(ac <= ab + bc + 1e-12, n + " triangle inequality");
    }
    for (const DescriptorSet& d : s) {
      double total = 0;
      for (double v : d.gch.histogram.bins) total += v;
      c.expect(std::abs(total - 1.0) <= 1e-12, "histogram sums to 1");
      for (const auto& block : d.lch.blocks) {
        double bt = 0;
        for (double v : block.bins) bt += v;
        c.expect(std::abs(bt - 1.0) <= 1e-12, "block histogram sums to 1");
      }
      for (std::size_t i = 0; i < d.ccv.size(); ++i)
        c.expect(std::abs(d.ccv.coherent[i] + d.ccv.incoherent[i] - d.gch.histogram.bins[i]) <= 1e-12,
                 "ccv coherent + incoherent == gch");
    }
    // Symmetric channel: each value paired with its mirror about a random center.
    std::vector<Rgb> px;
    const int center2 = int(rng() % 511);  // twice the center
    for (std::size_t i = 0; i < std::size_t(w) * h / 2 + 1; ++i) {
      const int lo = std::max(0, center2 - 255), hi = std::min(255, center2);
      const int v = lo + int(rng() % std::uint64_t(hi - lo + 1));
      px.push_back({std::uint8_t(v), std::uint8_t(rng()), std::uint8_t(v)});
      px.push_back({std::uint8_t(center2 - v), px.back().g, std::uint8_t(center2 - v)});
    }
    const Moments m = compute_moments(FrameRGB(std::uint32_t(px.size()), 1, px));
    c.expect(m.channel[0].skewness == 0.0 && m.channel[2].skewness == 0.0, "skewness 0 on symmetric channel");
  }
  report("metric and partition laws", c, "300 seeded triples");
}

struct CorpusVideo {
  std::string name;
  std::vector<FrameRGB> frames;
  std::size_t expected_shots;
};

std::vector<CorpusVideo> acceptance_corpus() {
  constexpr std::uint32_t W = 64, H = 48;
  std::vector<CorpusVideo> v;
  v.push_back({"solid_red", synth::solid({220, 20, 20}, 30, W, H), 1});
  v.push_back({"solid_teal", synth::solid({20, 160, 150}, 30, W, H), 1});
  v.push_back({"solid_violet", synth::solid({120, 40, 200}, 30, W, H), 1});
  v.push_back({"cut_white_black", synth::cut({250, 250, 250}, {10, 10, 10}, 12, 18, W, H), 2});
  v.push_back({"cut_gold_navy", synth::cut({240, 200, 40}, {30, 60, 160}, 20, 10, W, H), 2});
  auto three = synth::cut({200, 100, 0}, {0, 100, 200}, 10, 10, W, H);
  auto tail = synth::solid({100, 220, 100}, 10, W, H);
  three.insert(three.end(), tail.begin(), tail.end());
  v.push_back({"cut_three_shots", std::move(three), 3});
  v.push_back({"fade_green_magenta", synth::dissolve({0, 200, 0}, {200, 0, 200}, 40, W, H, 11), 1});
  v.push_back({"fade_orange_azure", synth::dissolve({255, 128, 0}, {0, 128, 255}, 40, W, H, 12), 1});
  v.push_back({"fade_gray_pink", synth::dissolve({90, 90, 90}, {250, 180, 180}, 40, W, H, 13), 1});
  auto fade_cut = synth::dissolve({60, 0, 90}, {160, 220, 40}, 25, W, H, 14);
  auto after = synth::solid({255, 255, 120}, 10, W, H);
  fade_cut.insert(fade_cut.end(), after.begin(), after.end());
  v.push_back({"fade_then_cut", std::move(fade_cut), 2});
  return v;
}

void pipeline_self_retrieval() {
  const auto t0 = Clock::now();
  Check c;
  const auto corpus = acceptance_corpus();
  FeatureIndex index;
  for (const auto& v : corpus) {
    const VideoAnalysis a = analyze_frames(v.frames, index.config);
    const VideoAnalysis again = analyze_frames(v.frames, index.config);
    c.expect(a.shots == again.shots && a.keyframes == again.keyframes, v.name + " deterministic analysis");
    c.expect(a.shots.size() == v.expected_shots,
             v.name + " shots " + std::to_string(a.shots.size()) + " want " + std::to_string(v.expected_shots));
    auto out = register_analysis(index, a, v.name, "memory:" + v.name);
    c.expect(!out.duplicate, v.name + " unique content");
    index = std::move(out.index);
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto q1 = frames_source(corpus[i].frames);
    auto r = query_by_clip(index, q1, FeatureSelection::all(), corpus.size());
    auto q2 = frames_source(corpus[i].frames);
    c.expect(r == query_by_clip(index, q2, FeatureSelection::all(), corpus.size()), corpus[i].name + " deterministic query");
    c.expect(!r.ranked.empty() && r.ranked[0].video_id == index.records[i].video_id, corpus[i].name + " ranks itself first");
    c.expect(!r.ranked.empty() && r.ranked[0].distance <= 1e-9, corpus[i].name + " self distance <= 1e-9");
    if (r.ranked.size() > 1) c.expect(r.ranked[1].distance > 1e-9, corpus[i].name + " unique best match");
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(secs < 60.0, "suite under 60 s");
  report("pipeline self-retrieval", c, std::to_string(corpus.size()) + " videos in " + fmt("%.2f", secs) + " s");
}

std::string run(const std::vector<std::string>& args, int* code = nullptr) {
  auto r = testutil::run_cli(args);
  if (code) *code = r.code;
  return r.out;
}

void round_trips() {
  Check c;
  testutil::TempDir dir("ivss_accept");
  synth::Rng rng(5);

  // Feature index.
  FeatureIndex index;
  for (const auto& v : acceptance_corpus()) {
    auto src = frames_source(v.frames);
    index = register_video(index, src, v.name).index;
  }
  save(index, dir / "corpus.idx");
  c.expect(load(dir / "corpus.idx") == index, "IVSSIDX1 load(save(x)) == x");
  const auto bytes = serialize_index(index);
  c.expect(serialize_index(deserialize_index(bytes)) == bytes, "IVSSIDX1 bytes stable");

  // PPM and raw streams.
  for (int i = 0; i < 100; ++i) {
    const FrameRGB f = oracle::random_frame(rng, 16);
    const auto ppm = write_ppm(f);
    c.expect(load_ppm(ppm) == f && write_ppm(load_ppm(ppm)) == ppm, "PPM parse/emit");
    std::vector<FrameRGB> frames{f};
    for (int k = 0; k < 3; ++k) frames.push_back(random_small(rng, f.width(), f.height()));
    const auto raw = encode_raw_stream(frames);
    auto src = open_raw_bytes(raw);
    const auto back = read_all(src);
    c.expect(back == frames && encode_raw_stream(back) == raw, "IVSSRAW1 parse/emit");
  }

  // CLI structured output.
  const std::string idx = (dir / "cli.idx").string();
  const auto corpus = acceptance_corpus();
  for (std::size_t i = 0; i < 4; ++i) {
    testutil::write_bytes(dir / (corpus[i].name + ".raw"), encode_raw_stream(corpus[i].frames));
    int code = -1;
    run({"--index", idx, "index", "add", (dir / (corpus[i].name + ".raw")).string()}, &code);
    c.expect(code == kExitOk, "cli index add");
  }
  testutil::write_frame_dir(dir / "query", synth::cut({220, 20, 20}, {250, 250, 250}, 4, 4, 64, 48));
  for (const char* sel : {"all", "gch:1,ccv:1", "lch", "avg_rgb:0.25,moments:3"}) {
    int code = -1;
    const auto text =
        run({"--index", idx, "--select", sel, "--format", "structured", "search", (dir / "query").string()}, &code);
    c.expect(code == kExitOk, std::string("cli search ") + sel);
    try {
      const QueryResult parsed = parse_structured(text);
      c.expect(format_structured(parsed) == text, std::string("structured re-emit ") + sel);
      c.expect(parsed.selection_used == FeatureSelection::parse(sel), std::string("structured selection ") + sel);
    } catch (const std::exception& e) {
      c.expect(false, std::string("structured parse: ") + e.what());
    }
  }
  report("round trips", c, "IVSSIDX1, PPM, IVSSRAW1, structured results");
}

void bench_table() {
  Check c;
  const std::string manifest = std::string(IVSS_SOURCE_DIR) + "/bench/default.manifest";
  int code1 = -1, code2 = -1;
  const auto t1 = run({"bench", manifest}, &code1);
  const auto t2 = run({"bench", manifest}, &code2);
  c.expect(code1 == kExitOk && code2 == kExitOk, "ivss bench exits 0");
  c.expect(!t1.empty() && t1 == t2, "bench table identical across runs");
  c.expect(t1.rfind("precision@5", 0) == 0, "precision@5 table");

  std::ifstream in(manifest);
  std::stringstream ss;
  ss << in.rdbuf();
  const BenchReport r = run_bench(parse_manifest(ss.str()));
  for (const BenchRow& row : r.classes) {
    double worst = 1.0;
    for (std::size_t m = 0; m < kDescriptorCount; ++m) worst = std::min(worst, row.precision[m]);
    c.expect(row.precision[kDescriptorCount] >= worst,
             row.label + ": all " + fmt("%.3f", row.precision[kDescriptorCount]) + " < worst " + fmt("%.3f", worst));
  }
  report("bench comparison table", c,
         std::to_string(r.classes.size()) + " classes, mean all=" + fmt("%.3f", r.mean.precision[kDescriptorCount]));
}

void cli_api_consistency() {
  Check c;
  testutil::TempDir dir("ivss_accept_api");
  const std::string idx = (dir / "shared.idx").string();
  const auto corpus = acceptance_corpus();
  for (const auto& v : corpus) {
    testutil::write_bytes(dir / (v.name + ".raw"), encode_raw_stream(v.frames));
    int code = -1;
    run({"--index", idx, "index", "add", (dir / (v.name + ".raw")).string(), "--name", v.name}, &code);
    c.expect(code == kExitOk, "cli index add " + v.name);
  }
  std::vector<std::filesystem::path> queries{dir / "fade_gray_pink.raw", dir / "cut_gold_navy.raw"};
  auto extra = synth::cut({230, 30, 30}, {100, 210, 110}, 5, 5, 64, 48);
  testutil::write_bytes(dir / "mixed_query.raw", encode_raw_stream(extra));
  queries.push_back(dir / "mixed_query.raw");

  testutil::RunningApi api({.index_path = idx});
  auto client = api.client();
  std::size_t compared = 0;
  for (const auto& q : queries) {
    std::ifstream in(q, std::ios::binary);
    const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (const char* sel : {"all", "gch:1,ccv:1", "lch:2,moments:0.5", "avg_rgb"}) {
      for (const char* k : {"3", "10"}) {
        const auto cli =
            run({"--index", idx, "--select", sel, "--top-k", k, "--format", "structured", "search", q.string()});
        auto res = client.Post(std::string("/api/search?format=structured&select=") + sel + "&top_k=" + k, body,
                               "application/octet-stream");
        c.expect(res && res->status == 200, std::string("api search ") + sel);
        c.expect(res && res->body == cli, q.filename().string() + " " + sel + " top_k " + k + " structured equality");
        ++compared;
      }
    }
    // JSON mode carries the same structured document.
    auto json_res = client.Post("/api/search?select=gch:1,ccv:1", body, "application/octet-stream");
    const auto cli = run({"--index", idx, "--select", "gch:1,ccv:1", "--format", "structured", "search", q.string()});
    c.expect(json_res && json_res->body.find(nlohmann::json(cli).dump()) != std::string::npos, "json structured field");
  }
  report("CLI/API consistency", c, std::to_string(compared) + " structured responses compared");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, void (*)()>> criteria{
      {"golden GCH distance", golden_gch},
      {"golden LCH distance", golden_lch},
      {"rotation changes LCH only", rotation_property},
      {"oracle equivalence", oracle_equivalence},
      {"metric and partition laws", metric_and_partition},
      {"pipeline self-retrieval", pipeline_self_retrieval},
      {"round trips", round_trips},
      {"bench comparison table", bench_table},
      {"CLI/API consistency", cli_api_consistency},
  };
  for (const auto& [name, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
