#include "ivss/api_service.hpp"

#include <httplib.h>

#include <cstdio>
#include <json.hpp>
#include <mutex>

#include "ivss/error.hpp"
#include "ivss/png_writer.hpp"
#include "ivss/retrieval.hpp"

namespace ivss {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>ivss</title></head>"
    "<body><h1>ivss</h1><p>The browser client is not installed. Start the server with "
    "<code>--ui-dir</code> pointing at the built UI bundle, or use the JSON API under "
    "<code>/api</code>.</p></body></html>";

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status(status), code(std::move(code)) {}
  int status;
  std::string code;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string thumbnail_url(const std::string& video_id, std::size_t frame) {
  return "/api/keyframes/" + video_id + "/" + std::to_string(frame) + ".png";
}

json record_summary(const VideoRecord& r) {
  return {{"video_id", r.video_id},       {"name", r.display_name},          {"source", r.source_locator},
          {"frame_count", r.frame_count}, {"shot_count", r.shots.size()},    {"keyframe_count", r.keyframes.size()},
          {"indexed_at", r.indexed_at}};
}

json record_detail(const VideoRecord& r) {
  json j = record_summary(r);
  j["shots"] = json::array();
  for (const Shot& s : r.shots) j["shots"].push_back({{"start_frame", s.start_frame}, {"end_frame", s.end_frame}});
  j["keyframes"] = json::array();
  for (const KeyFrame& k : r.keyframes)
    j["keyframes"].push_back({{"frame_index", k.frame_index},
                              {"shot_id", k.shot_id},
                              {"width", k.thumbnail.width()},
                              {"height", k.thumbnail.height()},
                              {"thumbnail", thumbnail_url(r.video_id, k.frame_index)}});
  return j;
}

json result_json(const QueryResult& result, const FeatureIndex& index) {
  json j;
  j["selection"] = result.selection_used.to_string();
  j["results"] = json::array();
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    const RankedVideo& v = result.ranked[i];
    const VideoRecord* rec = index.find(v.video_id);
    json matches = json::array();
    for (const KeyFrameMatch& m : v.best_matches)
      matches.push_back({{"query_frame", m.query_frame},
                         {"db_frame", m.db_frame},
                         {"distance", fixed6(m.distance)},
                         {"thumbnail", thumbnail_url(v.video_id, m.db_frame)}});
    j["results"].push_back({{"rank", i + 1},
                            {"video_id", v.video_id},
                            {"name", rec ? rec->display_name : ""},
                            {"distance", fixed6(v.distance)},
                            {"best_matches", std::move(matches)}});
  }
  j["structured"] = format_structured(result);
  return j;
}

void send_error(httplib::Response& res, const ApiError& e, json extra = json::object()) {
  extra["error"] = {{"code", e.code}, {"message", e.message}};
  res.status = e.http_status;
  res.set_content(extra.dump(), "application/json");
}

bool is_json(const httplib::Request& req) {
  return req.get_header_value("Content-Type").rfind("application/json", 0) == 0;
}

json parse_body(const httplib::Request& req) {
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw HttpError(400, "bad_request", "JSON body must be an object");
    return j;
  } catch (const json::parse_error& e) {
    throw HttpError(400, "bad_request", std::string("invalid JSON body: ") + e.what());
  }
}

template <class T>
T json_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw HttpError(400, "bad_request", std::string("field '") + key + "' has the wrong type");
  }
}

FrameSource source_from_path(const std::string& path) {
  if (path.empty()) throw HttpError(400, "bad_request", "missing 'path'");
  if (!fs::exists(path)) throw HttpError(400, "bad_request", "no such path on the server: " + path);
  return open_source(path);
}

std::size_t parse_top_k(const std::string& s) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size() || v < 1) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw HttpError(400, "bad_request", "top_k must be a positive integer");
  }
}

}  // namespace

ApiError map_exception(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const HttpError& e) {
    return {e.status, e.code, e.what()};
  } catch (const SelectionError& e) {
    return {400, "bad_selection", e.what()};
  } catch (const EmptySourceError& e) {
    return {422, "empty_source", e.what()};
  } catch (const EmptyIndexError& e) {
    return {409, "empty_index", e.what()};
  } catch (const NotFoundError& e) {
    return {404, "not_found", e.what()};
  } catch (const ParseError& e) {
    return {400, "malformed_source", e.what()};
  } catch (const UnsupportedError& e) {
    return {400, "malformed_source", e.what()};
  } catch (const DimensionMismatchError& e) {
    return {400, "malformed_source", e.what()};
  } catch (const EmptyFrameError& e) {
    return {400, "malformed_source", e.what()};
  } catch (const ConfigError& e) {
    return {400, "bad_request", e.what()};
  } catch (const std::exception& e) {
    return {500, "internal", e.what()};
  } catch (...) {
    return {500, "internal", "unknown error"};
  }
}

struct ApiService::Impl {
  ApiOptions options;
  httplib::Server server;
  mutable std::mutex snapshot_mutex;
  std::shared_ptr<const FeatureIndex> index;
  std::mutex writer_mutex;

  std::shared_ptr<const FeatureIndex> current() const {
    std::lock_guard lock(snapshot_mutex);
    return index;
  }
  void publish(std::shared_ptr<const FeatureIndex> next) {
    std::lock_guard lock(snapshot_mutex);
    index = std::move(next);
  }

  void register_video(const httplib::Request& req, httplib::Response& res) {
    std::string name;
    std::optional<FrameSource> source;
    if (is_json(req)) {
      json body = parse_body(req);
      std::string path = json_field<std::string>(body, "path", "");
      name = json_field<std::string>(body, "name", fs::path(path).filename().string());
      source.emplace(source_from_path(path));
    } else {
      name = req.has_param("name") ? req.get_param_value("name") : std::string("upload");
      std::vector<std::uint8_t> bytes(req.body.begin(), req.body.end());
      source.emplace(open_raw_bytes(std::move(bytes), "upload:" + name));
    }

    // Analysis runs outside the writer lock; only the append/save/swap is serialized.
    auto base = current();
    VideoAnalysis analysis = analyze_video(*source, base->config);
    std::lock_guard writer(writer_mutex);
    auto latest = current();
    RegisterOutcome out = register_analysis(*latest, analysis, name, source->locator());
    if (out.duplicate) {
      send_error(res, {409, "duplicate", "identical content is already registered as " + out.record.video_id},
                 {{"video_id", out.record.video_id}, {"video", record_summary(out.record)}});
      return;
    }
    save(out.index, options.index_path);
    publish(std::make_shared<const FeatureIndex>(std::move(out.index)));
    res.status = 201;
    res.set_content(record_summary(out.record).dump(), "application/json");
  }

  void search(const httplib::Request& req, httplib::Response& res) {
    std::string select = "all", format = "json";
    std::size_t top_k = 10;
    std::optional<FrameSource> source;
    if (is_json(req)) {
      json body = parse_body(req);
      select = json_field<std::string>(body, "select", select);
      format = json_field<std::string>(body, "format", format);
      const long long k = json_field<long long>(body, "top_k", 10);
      if (k < 1) throw HttpError(400, "bad_request", "top_k must be a positive integer");
      top_k = static_cast<std::size_t>(k);
      source.emplace(source_from_path(json_field<std::string>(body, "path", "")));
    } else {
      if (req.has_param("select")) select = req.get_param_value("select");
      if (req.has_param("format")) format = req.get_param_value("format");
      if (req.has_param("top_k")) top_k = parse_top_k(req.get_param_value("top_k"));
      std::vector<std::uint8_t> bytes(req.body.begin(), req.body.end());
      source.emplace(open_raw_bytes(std::move(bytes), "query"));
    }
    if (format != "json" && format != "structured")
      throw HttpError(400, "bad_request", "format must be json or structured");
    const FeatureSelection sel = FeatureSelection::parse(select);

    auto snap = current();
    if (snap->empty()) throw EmptyIndexError("the index contains no videos; register one first");
    QueryResult result = query_by_clip(*snap, *source, sel, top_k);
    if (format == "structured")
      res.set_content(format_structured(result), "text/plain");
    else
      res.set_content(result_json(result, *snap).dump(), "application/json");
  }

  void routes() {
    server.set_payload_max_length(options.max_upload_bytes);
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      send_error(res, map_exception(ep));
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 413)
        send_error(res, {413, "payload_too_large", "upload exceeds the configured limit"});
      else if (res.status == 404)
        send_error(res, {404, "not_found", "no such resource"});
    });

    server.Post("/api/videos", [this](const httplib::Request& req, httplib::Response& res) { register_video(req, res); });
    server.Post("/api/search", [this](const httplib::Request& req, httplib::Response& res) { search(req, res); });

    server.Get("/api/videos", [this](const httplib::Request&, httplib::Response& res) {
      json list = json::array();
      for (const VideoRecord& r : current()->records) list.push_back(record_summary(r));
      res.set_content(json{{"videos", std::move(list)}}.dump(), "application/json");
    });
    server.Get(R"(/api/videos/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto snap = current();
      const VideoRecord* rec = snap->find(req.matches[1].str());
      if (!rec) throw NotFoundError("unknown video id " + req.matches[1].str());
      res.set_content(record_detail(*rec).dump(), "application/json");
    });
    server.Get(R"(/api/keyframes/([^/]+)/(\d+)\.png)", [this](const httplib::Request& req, httplib::Response& res) {
      auto snap = current();
      const VideoRecord* rec = snap->find(req.matches[1].str());
      if (!rec) throw NotFoundError("unknown video id " + req.matches[1].str());
      const std::size_t frame = std::stoull(req.matches[2].str());
      for (const KeyFrame& k : rec->keyframes) {
        if (k.frame_index != frame) continue;
        auto png = encode_png(k.thumbnail);
        res.set_content(std::string(png.begin(), png.end()), "image/png");
        return;
      }
      throw NotFoundError("frame " + std::to_string(frame) + " is not a key frame of " + rec->video_id);
    });

    if (options.ui_dir && fs::is_directory(*options.ui_dir)) {
      server.set_mount_point("/", options.ui_dir->string());
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kPlaceholderPage, "text/html");
      });
    }
  }
};

ApiService::ApiService(ApiOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  if (fs::exists(impl_->options.index_path)) {
    impl_->index = std::make_shared<const FeatureIndex>(load(impl_->options.index_path));
  } else {
    impl_->options.new_index_config.validate();
    FeatureIndex empty;
    empty.config = impl_->options.new_index_config;
    impl_->index = std::make_shared<const FeatureIndex>(std::move(empty));
  }
  impl_->routes();
}

ApiService::~ApiService() { stop(); }

int ApiService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void ApiService::listen() { impl_->server.listen_after_bind(); }
void ApiService::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}
void ApiService::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::shared_ptr<const FeatureIndex> ApiService::snapshot() const { return impl_->current(); }

}  // namespace ivss
