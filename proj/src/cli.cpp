#include "ivss/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ivss/api_service.hpp"
#include "ivss/bench.hpp"
#include "ivss/error.hpp"
#include "ivss/index_store.hpp"
#include "ivss/keyframes.hpp"
#include "ivss/retrieval.hpp"

namespace ivss {

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  std::string index_path;
  int bits = ColorQuantizer::kDefaultBits;
  std::string grid = "2x2";
  double tau = 0.01;
  double shot_threshold = kDefaultShotThreshold;
  double cluster_delta = kDefaultClusterDelta;
  std::string select = "all";
  std::size_t top_k = 10;
  std::string format = "text";

  CLI::Option* bits_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* shot_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* index_opt = nullptr;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::pair<std::uint32_t, std::uint32_t> parse_grid(const std::string& s) {
  auto x = s.find('x');
  std::uint32_t r = 0, c = 0;
  auto ok = [](std::string_view t, std::uint32_t& v) {
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    return ec == std::errc() && ptr == t.data() + t.size() && v > 0;
  };
  if (x == std::string::npos || !ok(std::string_view(s).substr(0, x), r) || !ok(std::string_view(s).substr(x + 1), c))
    throw UsageError("--grid expects RxC, e.g. 2x2");
  return {r, c};
}

PipelineConfig config_from_flags(const GlobalFlags& f) {
  PipelineConfig c;
  c.descriptors.bits = f.bits;
  std::tie(c.descriptors.grid_rows, c.descriptors.grid_cols) = parse_grid(f.grid);
  c.descriptors.tau = f.tau;
  c.shot_threshold = f.shot_threshold;
  c.cluster_delta = f.cluster_delta;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return c;
}

// Explicit flags must agree with an existing index; they never reconfigure it.
void check_flags_match(const GlobalFlags& f, const PipelineConfig& index_cfg) {
  const PipelineConfig want = config_from_flags(f);
  auto mismatch = [](const std::string& flag, const std::string& have, const std::string& given) {
    throw ConfigMismatchError("index was built with " + flag + " " + have + " but " + given +
                              " was given; flags cannot reconfigure an existing index");
  };
  if (f.bits_opt->count() && want.descriptors.bits != index_cfg.descriptors.bits)
    mismatch("--bits", std::to_string(index_cfg.descriptors.bits), std::to_string(want.descriptors.bits));
  if (f.grid_opt->count() && (want.descriptors.grid_rows != index_cfg.descriptors.grid_rows ||
                              want.descriptors.grid_cols != index_cfg.descriptors.grid_cols))
    mismatch("--grid",
             std::to_string(index_cfg.descriptors.grid_rows) + "x" + std::to_string(index_cfg.descriptors.grid_cols),
             f.grid);
  if (f.tau_opt->count() && want.descriptors.tau != index_cfg.descriptors.tau)
    mismatch("--tau", std::to_string(index_cfg.descriptors.tau), std::to_string(want.descriptors.tau));
  if (f.shot_opt->count() && want.shot_threshold != index_cfg.shot_threshold)
    mismatch("--shot-threshold", std::to_string(index_cfg.shot_threshold), std::to_string(want.shot_threshold));
  if (f.delta_opt->count() && want.cluster_delta != index_cfg.cluster_delta)
    mismatch("--cluster-delta", std::to_string(index_cfg.cluster_delta), std::to_string(want.cluster_delta));
}

const std::string& require_index(const GlobalFlags& f) {
  if (f.index_path.empty()) throw UsageError("--index is required for this command");
  return f.index_path;
}

FeatureIndex load_existing(const GlobalFlags& f) {
  const auto& path = require_index(f);
  if (!fs::exists(path)) throw Error("index " + path + " does not exist; add a video first");
  FeatureIndex index = load(path);
  check_flags_match(f, index.config);
  return index;
}

FeatureSelection selection_from(const GlobalFlags& f) {
  try {
    return FeatureSelection::parse(f.select);
  } catch (const SelectionError& e) {
    throw UsageError(std::string("--select: ") + e.what());
  }
}

void print_warnings(const FrameSource& src, std::ostream& err) {
  for (const auto& w : src.warnings()) err << "warning: " << src.locator() << ": " << w << "\n";
}

int cmd_index_add(const GlobalFlags& f, const std::string& source_path, std::string name, std::ostream& out,
                  std::ostream& err) {
  const auto& path = require_index(f);
  FeatureIndex index;
  if (fs::exists(path)) {
    index = load(path);
    check_flags_match(f, index.config);
  } else {
    index.config = config_from_flags(f);
  }
  FrameSource src = open_source(source_path);
  print_warnings(src, err);
  if (name.empty()) name = fs::path(source_path).filename().string();
  RegisterOutcome result = register_video(index, src, std::move(name));
  if (result.duplicate) {
    err << "notice: identical content already registered as " << result.record.video_id << "\n";
  } else {
    save(result.index, path);
  }
  out << result.record.video_id << "\n";
  return kExitOk;
}

int cmd_index_list(const GlobalFlags& f, std::ostream& out) {
  FeatureIndex index = load_existing(f);
  if (f.format == "structured") {
    out << "ivss-index\t1\n";
    for (const VideoRecord& r : index.records)
      out << r.video_id << "\t" << r.display_name << "\t" << r.frame_count << "\t" << r.shots.size() << "\t"
          << r.keyframes.size() << "\n";
    return kExitOk;
  }
  out << index.records.size() << " video(s); bits=" << index.config.descriptors.bits
      << " grid=" << index.config.descriptors.grid_rows << "x" << index.config.descriptors.grid_cols
      << " tau=" << index.config.descriptors.tau << "\n";
  for (const VideoRecord& r : index.records)
    out << r.video_id << "  " << r.display_name << "  frames " << r.frame_count << "  shots " << r.shots.size()
        << "  keyframes " << r.keyframes.size() << "\n";
  return kExitOk;
}

int cmd_search(const GlobalFlags& f, const std::string& query_path, std::ostream& out, std::ostream& err) {
  const FeatureSelection sel = selection_from(f);
  if (f.top_k == 0) throw UsageError("--top-k must be at least 1");
  FeatureIndex index = load_existing(f);
  FrameSource src = open_source(query_path);
  print_warnings(src, err);
  QueryResult result = query_by_clip(index, src, sel, f.top_k);
  out << (f.format == "structured" ? format_structured(result) : format_text(result, index));
  return kExitOk;
}

int cmd_compare(const GlobalFlags& f, const std::string& a, const std::string& b, std::ostream& out) {
  const FeatureSelection sel = selection_from(f);
  PipelineConfig cfg;
  if (!f.index_path.empty() && fs::exists(f.index_path))
    cfg = load_existing(f).config;
  else
    cfg = config_from_flags(f);
  FrameSource sa = open_source(a);
  FrameSource sb = open_source(b);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", compare_pair(sa, sb, sel, cfg));
  out << buf << "\n";
  return kExitOk;
}

int cmd_keyframes(const GlobalFlags& f, const std::string& source_path, const std::string& out_dir, std::ostream& out,
                  std::ostream& err) {
  PipelineConfig cfg;
  if (!f.index_path.empty() && fs::exists(f.index_path))
    cfg = load_existing(f).config;
  else
    cfg = config_from_flags(f);
  FrameSource src = open_source(source_path);
  print_warnings(src, err);
  VideoAnalysis a = analyze_video(src, cfg);
  std::string name = fs::path(source_path).filename().string();
  if (name.empty()) name = fs::path(source_path).parent_path().filename().string();
  if (name.empty()) name = "video";
  auto paths = export_contact_sheet(out_dir, name, a.keyframes);
  const std::string report = shot_report(a);
  std::ofstream(fs::path(out_dir) / "shots.txt") << report;
  out << report;
  for (const auto& p : paths) out << p.string() << "\n";
  return kExitOk;
}

int cmd_bench(const std::string& manifest_path, std::ostream& out) {
  std::ifstream in(manifest_path);
  if (!in) throw Error("cannot read manifest " + manifest_path);
  std::stringstream ss;
  ss << in.rdbuf();
  BenchReport report = run_bench(parse_manifest(ss.str()));
  out << format_bench_table(report);
  return kExitOk;
}

int cmd_serve(const GlobalFlags& f, const std::string& host, int port, const std::string& ui_dir,
              std::size_t max_upload_mb, std::ostream& out) {
  ApiOptions opt;
  opt.index_path = require_index(f);
  if (!ui_dir.empty()) opt.ui_dir = ui_dir;
  opt.max_upload_bytes = max_upload_mb << 20;
  if (fs::exists(opt.index_path))
    check_flags_match(f, load(opt.index_path).config);
  else
    opt.new_index_config = config_from_flags(f);
  ApiService service(opt);
  const int bound = service.bind(host, port);
  if (bound <= 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
  service.listen();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ivss - color-feature video search", "ivss"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags f;
  f.index_opt = app.add_option("--index", f.index_path, "Index file (IVSSIDX1)");
  f.bits_opt = app.add_option("--bits", f.bits, "Quantizer bits per channel")->check(CLI::Range(1, 8));
  f.grid_opt = app.add_option("--grid", f.grid, "LCH grid as RxC");
  f.tau_opt = app.add_option("--tau", f.tau, "CCV coherence threshold, fraction of image area");
  f.shot_opt = app.add_option("--shot-threshold", f.shot_threshold, "GCH distance that starts a new shot");
  f.delta_opt = app.add_option("--cluster-delta", f.cluster_delta, "Key-frame clustering radius in RGB units");
  app.add_option("--select", f.select, "Descriptor selection, e.g. gch:1,ccv:2 or all");
  app.add_option("--top-k", f.top_k, "Number of results");
  app.add_option("--format", f.format, "Output format")->check(CLI::IsMember({"text", "structured"}));

  auto* index_cmd = app.add_subcommand("index", "Manage the index");
  index_cmd->require_subcommand(1);
  std::string add_source, add_name;
  auto* add_cmd = index_cmd->add_subcommand("add", "Register a video");
  add_cmd->add_option("source", add_source, "Frame directory, .ppm image, or IVSSRAW1 stream")->required();
  add_cmd->add_option("--name", add_name, "Display name");
  auto* list_cmd = index_cmd->add_subcommand("list", "List registered videos");

  std::string query_path;
  auto* search_cmd = app.add_subcommand("search", "Query the index with a clip");
  search_cmd->add_option("query", query_path, "Query clip")->required();

  std::string kf_source, kf_out;
  auto* kf_cmd = app.add_subcommand("keyframes", "Export key frames and a shot report");
  kf_cmd->add_option("source", kf_source)->required();
  kf_cmd->add_option("out_dir", kf_out)->required();

  std::string cmp_a, cmp_b;
  auto* cmp_cmd = app.add_subcommand("compare", "Distance from one clip to another");
  cmp_cmd->add_option("query", cmp_a)->required();
  cmp_cmd->add_option("candidate", cmp_b)->required();

  std::string manifest;
  auto* bench_cmd = app.add_subcommand("bench", "Per-descriptor precision on a synthetic corpus");
  bench_cmd->add_option("manifest", manifest)->required();

  std::string host = "127.0.0.1", ui_dir;
  int port = 8080;
  std::size_t max_upload_mb = 256;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--ui-dir", ui_dir, "Directory with the built browser client");
  serve_cmd->add_option("--max-upload-mb", max_upload_mb);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*add_cmd) return cmd_index_add(f, add_source, add_name, out, err);
    if (*list_cmd) return cmd_index_list(f, out);
    if (*search_cmd) return cmd_search(f, query_path, out, err);
    if (*kf_cmd) return cmd_keyframes(f, kf_source, kf_out, out, err);
    if (*cmp_cmd) return cmd_compare(f, cmp_a, cmp_b, out);
    if (*bench_cmd) return cmd_bench(manifest, out);
    if (*serve_cmd) return cmd_serve(f, host, port, ui_dir, max_upload_mb, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace ivss
