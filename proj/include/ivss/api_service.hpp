#pragma once

// HTTP facade over the index: video registration, search, listings and
// key-frame thumbnails, plus static hosting of the browser client.
//
//   POST /api/videos                          register (raw IVSSRAW1 body, or JSON {"path","name"})
//   POST /api/search                          search (raw body + query params, or JSON {"path","select","top_k","format"})
//   GET  /api/videos                          list records
//   GET  /api/videos/{id}                     one record with shots and key frames
//   GET  /api/keyframes/{id}/{frame}.png      key-frame thumbnail
//   GET  /                                    static UI bundle
//
// Errors are JSON: {"error": {"code": "...", "message": "..."}}.
//
//   400 malformed_source | bad_request | bad_selection
//   404 not_found
//   409 duplicate (body also carries "video_id") | empty_index
//   413 payload_too_large
//   422 empty_source
//   500 internal

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "ivss/index_store.hpp"

namespace ivss {

struct ApiOptions {
  std::filesystem::path index_path;
  std::optional<std::filesystem::path> ui_dir;
  std::size_t max_upload_bytes = std::size_t(256) << 20;
  // Used only when index_path does not exist yet.
  PipelineConfig new_index_config;
};

struct ApiError {
  int http_status = 500;
  std::string code;
  std::string message;
};

// Maps a thrown exception to its (status, code) pair.
ApiError map_exception(std::exception_ptr error);

class ApiService {
 public:
  explicit ApiService(ApiOptions options);
  ~ApiService();
  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  // Binds to host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  void listen();
  void stop();
  // Blocks until the server accepts connections.
  void wait_until_ready() const;

  // Current immutable index snapshot.
  std::shared_ptr<const FeatureIndex> snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ivss
