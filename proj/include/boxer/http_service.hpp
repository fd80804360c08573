#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "boxer/session.hpp"

namespace httplib {
class Server;
}

namespace boxer {

/// The `/v1/` HTTP+JSON surface over a SessionManager.
///
///   POST /v1/datasets                 {manifest_path} or {manifest, base_dir?}, optional {dataset_id}
///   GET  /v1/datasets
///   POST /v1/sessions                 {dataset_id}
///   GET  /v1/sessions/{id}/state
///   POST /v1/sessions/{id}/selection  mutation action
///   GET  /v1/sessions/{id}/views/{kind}?params
///   GET  /v1/sessions/{id}/instances?offset&limit&sort&order&filter
///
/// Errors are {code, message, detail_path, selection_version}.
class HttpService {
 public:
  struct Response {
    int status = 200;
    std::string body;
  };
  using QueryParams = std::multimap<std::string, std::string>;

  explicit HttpService(SessionManager& manager);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Routes one request without a socket; `listen` serves the same handler.
  Response handle(std::string_view method, std::string_view path, const QueryParams& query,
                  std::string_view body) const;

  /// Binds `host:port` (0 picks a free port) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();

 private:
  SessionManager& manager_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace boxer
