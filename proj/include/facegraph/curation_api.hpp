#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "facegraph/curation.hpp"

namespace facegraph {

struct ApiResponse {
  int status = 200;
  /// JSON body. Every body carries "seq" once a session is known.
  std::string body;
};

/// Transport-independent router for the curation HTTP+JSON API.
///
///   POST /sessions                         {"dataset", "clustering", "store"?}
///   GET  /sessions/{id}/clusters
///   GET  /clusters/{cid}?session=
///   GET  /clusters/{cid}/similar?session=&top=
///   POST /sessions/{id}/actions            action + "last_seen_seq"
///   GET  /faces/{fid}/context?session=
///   GET  /faces/{fid}/similar?session=&threshold=
///   POST /sessions/{id}/export
///
/// Errors map to 400 (bad request or config), 404 (unknown id), 409 (stale
/// sequence number, stale target, cannot-link guard) and 422 (invalid action
/// payload).
class CurationApi {
 public:
  explicit CurationApi(SessionOptions defaults = {}) : defaults_(std::move(defaults)) {}

  ApiResponse handle(const std::string& method, const std::string& path,
                     const std::map<std::string, std::string>& query,
                     const std::string& body);

  /// Registers an existing session under a new id and returns the id.
  std::string add_session(std::unique_ptr<CurationSession> session);
  CurationSession& session(const std::string& id);

 private:
  ApiResponse route(const std::string& method, const std::string& path,
                    const std::map<std::string, std::string>& query, const std::string& body,
                    std::uint64_t& seq_hint);

  SessionOptions defaults_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<CurationSession>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// HTTP binding for a CurationApi.
class CurationHttpServer {
 public:
  explicit CurationHttpServer(CurationApi& api);
  ~CurationHttpServer();
  CurationHttpServer(const CurationHttpServer&) = delete;
  CurationHttpServer& operator=(const CurationHttpServer&) = delete;

  /// Binds the socket; port 0 picks a free one. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves requests until stop(). Blocks.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace facegraph
