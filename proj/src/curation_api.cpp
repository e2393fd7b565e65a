#include "facegraph/curation_api.hpp"

#include <httplib.h>

#include <spdlog/spdlog.h>

#include "json_util.hpp"

namespace facegraph {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const std::size_t end = path.find('/', pos);
    const std::string part = path.substr(pos, end == std::string::npos ? end : end - pos);
    if (!part.empty()) parts.push_back(part);
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return parts;
}

ApiResponse reply(int status, json body, std::uint64_t seq) {
  body["seq"] = seq;
  return {status, body.dump()};
}

ApiResponse error_reply(int status, const std::string& kind, const std::string& message,
                        std::uint64_t seq) {
  return reply(status, {{"error", kind}, {"message", message}}, seq);
}

const std::string& query_param(const std::map<std::string, std::string>& query,
                               const std::string& key) {
  auto it = query.find(key);
  if (it == query.end()) {
    throw ConfigError("missing query parameter '" + key + "'");
  }
  return it->second;
}

double parse_number(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("query parameter '" + key + "' is not a number: '" + text + "'");
  }
}

json face_view_json(const FaceView& f) {
  return {{"face_id", f.face_id},
          {"image_id", f.image_id},
          {"quality_score", f.quality_score},
          {"distance", f.distance}};
}

json cluster_view_json(const ClusterView& v) {
  json members = json::array();
  for (const auto& f : v.members) {
    json j = face_view_json(f);
    j["flag"] = "member";
    members.push_back(std::move(j));
  }
  json potentials = json::array();
  for (const auto& f : v.potentials) {
    json j = face_view_json(f);
    j["flag"] = "potential";
    potentials.push_back(std::move(j));
  }
  return {{"cluster_id", v.cluster_id},
          {"status", to_string(v.status)},
          {"members", std::move(members)},
          {"potentials", std::move(potentials)}};
}

}  // namespace

std::string CurationApi::add_session(std::unique_ptr<CurationSession> session) {
  std::lock_guard lock(sessions_mutex_);
  const std::string id = "s" + std::to_string(next_id_++);
  sessions_[id] = std::move(session);
  return id;
}

CurationSession& CurationApi::session(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw NotFoundError("unknown session '" + id + "'");
  }
  return *it->second;
}

ApiResponse CurationApi::handle(const std::string& method, const std::string& path,
                                const std::map<std::string, std::string>& query,
                                const std::string& body) {
  std::uint64_t seq = 0;
  try {
    return route(method, path, query, body, seq);
  } catch (const NotFoundError& e) {
    return error_reply(404, "not_found", e.what(), seq);
  } catch (const StaleError& e) {
    return error_reply(409, "stale", e.what(), seq);
  } catch (const CannotLinkError& e) {
    return error_reply(409, "cannot_link", e.what(), seq);
  } catch (const CurationError& e) {
    return error_reply(422, "invalid_action", e.what(), seq);
  } catch (const IntegrityError& e) {
    return error_reply(400, "integrity", e.what(), seq);
  } catch (const ParseError& e) {
    return error_reply(400, "parse", e.what(), seq);
  } catch (const ConfigError& e) {
    return error_reply(400, "bad_request", e.what(), seq);
  } catch (const IoError& e) {
    return error_reply(400, "io", e.what(), seq);
  }
}

ApiResponse CurationApi::route(const std::string& method, const std::string& path,
                               const std::map<std::string, std::string>& query,
                               const std::string& body, std::uint64_t& seq) {
  const auto parts = split_path(path);
  auto bind = [&](const std::string& id) -> CurationSession& {
    CurationSession& s = session(id);
    seq = s.seq();
    return s;
  };

  if (method == "POST" && parts.size() == 1 && parts[0] == "sessions") {
    const json doc = detail::parse_text(body, "<request>");
    const auto dataset = detail::field<std::string>(doc, "dataset", "<request>");
    const auto clustering = detail::field<std::string>(doc, "clustering", "<request>");
    std::optional<std::filesystem::path> store;
    if (doc.contains("store")) store = detail::field<std::string>(doc, "store", "<request>");
    auto opened = CurationSession::open(dataset, clustering, defaults_, store);
    const std::size_t n = opened->list_clusters().size();
    const std::string id = add_session(std::move(opened));
    spdlog::info("opened curation session {} with {} clusters", id, n);
    return reply(201, {{"session", id}, {"clusters", n}}, 0);
  }

  if (parts.size() == 3 && parts[0] == "sessions") {
    CurationSession& s = bind(parts[1]);
    if (method == "GET" && parts[2] == "clusters") {
      json list = json::array();
      for (const auto& c : s.list_clusters()) {
        list.push_back({{"cluster_id", c.cluster_id},
                        {"status", to_string(c.status)},
                        {"size", c.size}});
      }
      return reply(200, {{"clusters", std::move(list)}}, seq);
    }
    if (method == "POST" && parts[2] == "actions") {
      json doc = detail::parse_text(body, "<request>");
      if (!doc.is_object() || !doc.contains("last_seen_seq")) {
        throw ConfigError("action request needs 'last_seen_seq'");
      }
      const auto last_seen = detail::field<std::uint64_t>(doc, "last_seen_seq", "<request>");
      doc.erase("last_seen_seq");
      doc.erase("seq");
      const CurationAction action = action_from_json(doc.dump(), "<request>");
      const ActionResult r = s.apply(action, last_seen);
      seq = r.seq;
      return reply(200,
                   {{"action", json::parse(action_to_json(r.committed))},
                    {"clusters", r.clusters},
                    {"confirmed", r.confirmed},
                    {"unassigned", r.unassigned},
                    {"rejected", r.rejected}},
                   r.seq);
    }
    if (method == "POST" && parts[2] == "export") {
      const CuratedExport ex = s.export_curated();
      json identities = json::object();
      for (const auto& [pid, faces] : ex.truth.identities) identities[pid] = faces;
      return reply(200,
                   {{"clustering", json::parse(clustering_to_json(ex.clustering))},
                    {"truth", {{"identities", std::move(identities)}}}},
                   ex.seq);
    }
  }

  if (method == "GET" && parts.size() >= 2 && parts.size() <= 3 && parts[0] == "clusters") {
    CurationSession& s = bind(query_param(query, "session"));
    if (parts.size() == 2) {
      const ClusterView v = s.get_cluster(parts[1]);
      seq = v.seq;
      return reply(200, cluster_view_json(v), seq);
    }
    if (parts[2] == "similar") {
      std::size_t top = 5;
      if (query.contains("top")) {
        const double t = parse_number(query.at("top"), "top");
        if (t < 0) throw ConfigError("'top' must be non-negative");
        top = static_cast<std::size_t>(t);
      }
      json list = json::array();
      for (const auto& c : s.similar_clusters(parts[1], top)) {
        list.push_back({{"cluster_id", c.cluster_id},
                        {"distance", c.distance},
                        {"similarity", c.similarity},
                        {"conflict", c.conflict}});
      }
      return reply(200, {{"cluster_id", parts[1]}, {"similar", std::move(list)}}, seq);
    }
  }

  if (method == "GET" && parts.size() == 3 && parts[0] == "faces") {
    CurationSession& s = bind(query_param(query, "session"));
    if (!s.dataset().has_face(parts[1])) {
      throw NotFoundError("unknown face '" + parts[1] + "'");
    }
    if (parts[2] == "context") {
      const FaceContext ctx = s.face_context(parts[1]);
      seq = ctx.seq;
      json doc = {{"face_id", ctx.face_id},
                  {"image_id", ctx.image_id},
                  {"capture_time", ctx.capture_time},
                  {"siblings", ctx.siblings},
                  {"image_ref", ctx.image_ref}};
      doc["cluster_id"] = ctx.cluster_id ? json(*ctx.cluster_id) : json(nullptr);
      return reply(200, std::move(doc), seq);
    }
    if (parts[2] == "similar") {
      const double threshold = parse_number(query_param(query, "threshold"), "threshold");
      json list = json::array();
      for (const auto& f : s.similar_faces(parts[1], threshold)) {
        json j = face_view_json(f);
        j["flag"] = "similar";
        list.push_back(std::move(j));
      }
      return reply(200, {{"face_id", parts[1]}, {"similar", std::move(list)}}, seq);
    }
  }

  throw NotFoundError("no route for " + method + " " + path);
}

struct CurationHttpServer::Impl {
  httplib::Server server;
};

CurationHttpServer::CurationHttpServer(CurationApi& api) : impl_(std::make_unique<Impl>()) {
  auto adapt = [&api](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const ApiResponse r = api.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get(".*", adapt);
  impl_->server.Post(".*", adapt);
}

CurationHttpServer::~CurationHttpServer() { stop(); }

int CurationHttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  spdlog::info("curation API bound to {}:{}", host, bound);
  return bound;
}

void CurationHttpServer::listen() {
  if (!impl_->server.listen_after_bind()) {
    throw IoError("curation API listener failed");
  }
}

void CurationHttpServer::stop() { impl_->server.stop(); }

}  // namespace facegraph
