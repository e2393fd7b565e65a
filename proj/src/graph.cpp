#include "facegraph/graph.hpp"

#include <algorithm>
#include <sstream>

#include "json_util.hpp"

namespace facegraph {

SocialGraph::Key SocialGraph::key(const std::string& a, const std::string& b) {
  return a < b ? Key{a, b} : Key{b, a};
}

void SocialGraph::add_node(const std::string& id) { nodes_.insert(id); }

void SocialGraph::add_evidence(const std::string& a, const std::string& b,
                               const std::string& image_id) {
  if (a == b) {
    throw IntegrityError("self-loop on '" + a + "'");
  }
  nodes_.insert(a);
  nodes_.insert(b);
  edges_[key(a, b)].insert(image_id);
}

bool SocialGraph::connected(const std::string& a, const std::string& b) const {
  return a != b && edges_.contains(key(a, b));
}

std::size_t SocialGraph::weight(const std::string& a, const std::string& b) const {
  if (a == b) return 0;
  auto it = edges_.find(key(a, b));
  return it == edges_.end() ? 0 : it->second.size();
}

std::size_t SocialGraph::degree(const std::string& node) const {
  std::size_t d = 0;
  for (const auto& [k, ev] : edges_) {
    if (k.first == node || k.second == node) ++d;
  }
  return d;
}

std::size_t SocialGraph::total_weight(const std::string& node) const {
  std::size_t w = 0;
  for (const auto& [k, ev] : edges_) {
    if (k.first == node || k.second == node) w += ev.size();
  }
  return w;
}

SocialGraph SocialGraph::filtered(std::size_t min_weight) const {
  SocialGraph g;
  g.nodes_ = nodes_;
  for (const auto& [k, ev] : edges_) {
    if (ev.size() >= min_weight) g.edges_.emplace(k, ev);
  }
  return g;
}

SocialGraph discover_graph(const Clustering& clustering, const EventDataset& dataset) {
  SocialGraph graph;
  const auto owner = clustering.assignment();
  for (const auto& [cid, members] : clustering.clusters) {
    graph.add_node(cid);
  }
  for (const ImageRecord& img : dataset.images()) {
    std::set<std::string> present;
    for (const auto& f : img.face_ids) {
      if (auto it = owner.find(f); it != owner.end()) present.insert(it->second);
    }
    for (auto a = present.begin(); a != present.end(); ++a) {
      for (auto b = std::next(a); b != present.end(); ++b) {
        graph.add_evidence(*a, *b, img.image_id);
      }
    }
  }
  return graph;
}

std::vector<std::string> top_k_by_degree(const SocialGraph& graph, std::size_t k) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> stats;
  for (const auto& n : graph.nodes()) stats[n] = {0, 0};
  for (const auto& [key, evidence] : graph.edges()) {
    for (const std::string* n : {&key.first, &key.second}) {
      auto& s = stats[*n];
      ++s.first;
      s.second += evidence.size();
    }
  }
  std::vector<std::string> order(graph.nodes().begin(), graph.nodes().end());
  std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    const auto& sa = stats[a];
    const auto& sb = stats[b];
    if (sa.first != sb.first) return sa.first > sb.first;
    if (sa.second != sb.second) return sa.second > sb.second;
    return a < b;
  });
  if (order.size() > k) order.resize(k);
  return order;
}

GraphFormat parse_graph_format(const std::string& name) {
  if (name == "json-nodelink" || name == "json") return GraphFormat::kJsonNodeLink;
  if (name == "dot") return GraphFormat::kDot;
  throw ConfigError("unknown graph format '" + name + "' (expected json-nodelink or dot)");
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string export_graph(const SocialGraph& graph, GraphFormat format) {
  if (format == GraphFormat::kDot) {
    std::ostringstream os;
    os << "graph social {\n";
    for (const auto& n : graph.nodes()) {
      os << "  " << dot_quote(n) << ";\n";
    }
    for (const auto& [key, evidence] : graph.edges()) {
      os << "  " << dot_quote(key.first) << " -- " << dot_quote(key.second)
         << " [weight=" << evidence.size() << "];\n";
    }
    os << "}\n";
    return os.str();
  }
  json doc;
  json nodes = json::array();
  for (const auto& n : graph.nodes()) nodes.push_back({{"id", n}});
  json links = json::array();
  for (const auto& [key, evidence] : graph.edges()) {
    links.push_back({{"source", key.first},
                     {"target", key.second},
                     {"weight", evidence.size()},
                     {"evidence", evidence}});
  }
  doc["nodes"] = std::move(nodes);
  doc["links"] = std::move(links);
  return doc.dump(2) + "\n";
}

SocialGraph parse_node_link(const std::string& text, const std::string& source) {
  const json doc = detail::parse_text(text, source);
  SocialGraph g;
  for (const json& n : detail::field<json>(doc, "nodes", source)) {
    g.add_node(detail::field<std::string>(n, "id", source));
  }
  for (const json& l : detail::field<json>(doc, "links", source)) {
    const auto a = detail::field<std::string>(l, "source", source);
    const auto b = detail::field<std::string>(l, "target", source);
    const auto evidence = detail::field<std::set<std::string>>(l, "evidence", source);
    const auto weight = detail::field<std::size_t>(l, "weight", source);
    if (evidence.size() != weight || weight == 0) {
      throw ParseError(source, 0, "link " + a + "--" + b + ": weight disagrees with evidence");
    }
    for (const auto& img : evidence) g.add_evidence(a, b, img);
  }
  return g;
}

}  // namespace facegraph
