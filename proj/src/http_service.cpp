#include "boxer/http_service.hpp"

#include <vector>

#include "boxer/error.hpp"
#include "httplib.h"

namespace boxer {

using nlohmann::json;

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDataset:
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownView: return 404;
    case ErrorCode::MissingSelection: return 409;
    case ErrorCode::MissingFile: return 422;
    default: return 400;
  }
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    while (!path.empty() && path.front() == '/') path.remove_prefix(1);
    if (path.empty()) break;
    const auto slash = path.find('/');
    parts.push_back(path.substr(0, slash));
    path = slash == std::string_view::npos ? std::string_view{} : path.substr(slash);
  }
  return parts;
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  auto parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) throw Error(ErrorCode::InvalidParameter, "request body is not valid JSON", "body");
  if (!parsed.is_object()) throw Error(ErrorCode::InvalidParameter, "request body must be a JSON object", "body");
  return parsed;
}

ViewParams single_valued(const HttpService::QueryParams& query) {
  ViewParams params;
  for (const auto& [key, value] : query) {
    if (!params.emplace(key, value).second) {
      throw Error(ErrorCode::InvalidParameter, "parameter '" + key + "' given more than once", key);
    }
  }
  return params;
}

HttpService::Response ok(json body) { return {200, to_text(body)}; }

HttpService::Response not_found(std::string_view method, std::string_view path) {
  return {404, to_text({{"code", "NotFound"},
                        {"message", "no route for " + std::string(method) + " " + std::string(path)},
                        {"detail_path", std::string(path)},
                        {"selection_version", nullptr}})};
}

}  // namespace

HttpService::HttpService(SessionManager& manager) : manager_(manager) {}

HttpService::~HttpService() = default;

HttpService::Response HttpService::handle(std::string_view method, std::string_view path, const QueryParams& query,
                                          std::string_view body) const {
  const auto parts = split_path(path);
  std::shared_ptr<Session> session;
  try {
    if (parts.size() < 2 || parts[0] != "v1") return not_found(method, path);

    if (parts[1] == "datasets" && parts.size() == 2) {
      if (method == "GET") {
        json list = json::array();
        for (const auto& info : manager_.datasets()) list.push_back(to_json(info));
        return ok({{"datasets", std::move(list)}, {"selection_version", nullptr}});
      }
      if (method == "POST") {
        const auto request = parse_body(body);
        std::shared_ptr<const ExperimentDataset> dataset;
        std::string source;
        if (const auto it = request.find("manifest_path"); it != request.end()) {
          if (!it->is_string()) throw Error(ErrorCode::InvalidParameter, "manifest_path must be a string", "manifest_path");
          source = it->get<std::string>();
          dataset = std::make_shared<const ExperimentDataset>(load_dataset(std::filesystem::path(source)));
        } else if (const auto m = request.find("manifest"); m != request.end()) {
          std::string base = ".";
          if (const auto b = request.find("base_dir"); b != request.end() && b->is_string()) base = b->get<std::string>();
          source = "inline";
          dataset = std::make_shared<const ExperimentDataset>(load_dataset(*m, base));
        } else {
          throw Error(ErrorCode::InvalidParameter, "provide manifest_path or manifest", "manifest_path");
        }
        std::string id;
        if (const auto it = request.find("dataset_id"); it != request.end()) {
          if (!it->is_string() || it->get<std::string>().empty()) {
            throw Error(ErrorCode::InvalidParameter, "dataset_id must be a non-empty string", "dataset_id");
          }
          id = it->get<std::string>();
        }
        auto out = to_json(manager_.add_dataset(std::move(dataset), std::move(source), std::move(id)));
        out["selection_version"] = nullptr;
        return ok(std::move(out));
      }
      return not_found(method, path);
    }

    if (parts[1] != "sessions") return not_found(method, path);
    if (parts.size() == 2) {
      if (method != "POST") return not_found(method, path);
      const auto request = parse_body(body);
      const auto it = request.find("dataset_id");
      if (it == request.end() || !it->is_string()) {
        throw Error(ErrorCode::InvalidParameter, "dataset_id must be a string", "dataset_id");
      }
      session = manager_.create_session(it->get<std::string>());
      auto out = session->summary();
      out["session_id"] = session->id();
      out["dataset_id"] = session->dataset_id();
      return ok(std::move(out));
    }

    if (parts.size() < 4) return not_found(method, path);
    const auto resource = parts[3];
    const bool known = (resource == "state" && parts.size() == 4 && method == "GET") ||
                       (resource == "selection" && parts.size() == 4 && method == "POST") ||
                       (resource == "views" && parts.size() == 5 && method == "GET") ||
                       (resource == "instances" && parts.size() == 4 && method == "GET");
    if (!known) return not_found(method, path);
    session = manager_.session(std::string(parts[2]));

    if (resource == "state") {
      auto out = session->summary();
      out["session_id"] = session->id();
      out["dataset_id"] = session->dataset_id();
      return ok(std::move(out));
    }
    if (resource == "selection") return ok(session->mutate(parse_body(body)));
    const auto kind = resource == "views" ? parts[4] : std::string_view("instances");
    return ok(to_json(session->view(kind, single_valued(query))));
  } catch (const Error& e) {
    json version = nullptr;
    if (session) version = session->version();
    return {status_for(e.code()), to_text({{"code", e.code_name()},
                                           {"message", e.what()},
                                           {"detail_path", e.detail_path()},
                                           {"selection_version", version}})};
  } catch (const std::exception& e) {
    return {500, to_text({{"code", "Internal"}, {"message", e.what()}, {"detail_path", ""}, {"selection_version", nullptr}})};
  }
}

int HttpService::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = handle(req.method, req.path, QueryParams(req.params.begin(), req.params.end()), req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  server_->Get(".*", route);
  server_->Post(".*", route);
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpService::listen() { return server_ && server_->listen_after_bind(); }

void HttpService::stop() {
  if (server_) server_->stop();
}

}  // namespace boxer
