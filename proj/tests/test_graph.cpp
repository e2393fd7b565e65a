#include <doctest.h>

#include "facegraph/evaluation.hpp"
#include "facegraph/graph.hpp"
#include "facegraph/synth.hpp"
#include "support.hpp"

using namespace facegraph;
using facegraph::testing::Builder;

namespace {

Clustering perfect(const SyntheticEvent& ev) {
  Clustering c;
  for (const auto& [pid, faces] : ev.truth.identities) c.clusters["k_" + pid] = faces;
  return c;
}

SyntheticEvent event(std::uint64_t seed = 7) {
  SynthConfig cfg;
  cfg.n_participants = 40;
  cfg.n_images = 250;
  cfg.duplicate_rate = 0.1;
  cfg.seed = seed;
  return generate_synthetic_event(cfg);
}

SocialGraph star() {
  SocialGraph g;
  for (int i = 0; i < 5; ++i) g.add_evidence("h", "leaf" + std::to_string(i), "img" + std::to_string(i));
  return g;
}

}  // namespace

TEST_CASE("two clusters sharing one image give one edge of weight 1") {
  const EventDataset d = Builder()
                             .image("shared")
                             .image("solo")
                             .face("a", "shared", {0, 0})
                             .face("b", "shared", {1, 0})
                             .face("c", "solo", {2, 0})
                             .build();
  Clustering c;
  c.clusters = {{"A", {"a", "c"}}, {"B", {"b"}}};
  const SocialGraph g = discover_graph(c, d);
  CHECK(g.nodes() == std::set<std::string>{"A", "B"});
  CHECK(g.edges().size() == 1);
  CHECK(g.weight("A", "B") == 1);
  CHECK(g.weight("B", "A") == 1);
  CHECK(g.edges().at(SocialGraph::key("A", "B")) == std::set<std::string>{"shared"});
}

TEST_CASE("unassigned and rejected faces add nothing") {
  const EventDataset d = Builder().image("i").face("a", "i", {0, 0}).face("b", "i", {1, 0}).build();
  Clustering c = Clustering::all_unassigned(d);
  const SocialGraph g = discover_graph(c, d);
  CHECK(g.nodes().empty());
  CHECK(g.edges().empty());
  c.unassigned = {"b"};
  c.clusters = {{"A", {"a"}}};
  CHECK(discover_graph(c, d).edges().empty());
}

TEST_CASE("perfect clustering recovers the planted graph exactly") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto ev = event(seed);
    const SocialGraph g = discover_graph(perfect(ev), ev.dataset);
    std::map<std::pair<std::string, std::string>, std::size_t> mapped;
    for (const auto& [key, evidence] : g.edges()) {
      mapped[{key.first.substr(2), key.second.substr(2)}] = evidence.size();
    }
    CHECK(mapped == ev.planted.edges);
  }
}

TEST_CASE("evidence images really carry both endpoints") {
  const auto ev = event();
  const Clustering c = perfect(ev);
  const auto assign = c.assignment();
  const SocialGraph g = discover_graph(c, ev.dataset);
  for (const auto& [key, evidence] : g.edges()) {
    CHECK(key.first < key.second);
    CHECK(!evidence.empty());
    for (const auto& img : evidence) {
      std::set<std::string> on_image;
      for (const auto& f : ev.dataset.image(img).face_ids) {
        if (assign.contains(f)) on_image.insert(assign.at(f));
      }
      CHECK(on_image.contains(key.first));
      CHECK(on_image.contains(key.second));
    }
  }
}

TEST_CASE("relabelling clusters gives an isomorphic graph") {
  const auto ev = event();
  const Clustering c = perfect(ev);
  Clustering renamed;
  std::map<std::string, std::string> rename;
  int n = 0;
  for (auto it = c.clusters.rbegin(); it != c.clusters.rend(); ++it) {
    rename[it->first] = "z" + std::to_string(n++);
    renamed.clusters[rename[it->first]] = it->second;
  }
  const SocialGraph a = discover_graph(c, ev.dataset);
  const SocialGraph b = discover_graph(renamed, ev.dataset);
  REQUIRE(a.edges().size() == b.edges().size());
  for (const auto& [key, evidence] : a.edges()) {
    CHECK(b.weight(rename[key.first], rename[key.second]) == evidence.size());
  }
}

TEST_CASE("merging clusters never loses evidence of other nodes") {
  const auto ev = event();
  Clustering c = perfect(ev);
  const SocialGraph before = discover_graph(c, ev.dataset);
  auto it = c.clusters.begin();
  const std::string x = it->first;
  const std::string y = std::next(it)->first;
  c.clusters[x].insert(c.clusters[y].begin(), c.clusters[y].end());
  c.clusters.erase(y);
  const SocialGraph after = discover_graph(c, ev.dataset);
  for (const auto& node : after.nodes()) {
    if (node == x) continue;
    CHECK(after.weight(node, x) >= std::max(before.weight(node, x), before.weight(node, y)));
  }
}

TEST_SUITE("top_k_by_degree") {
  TEST_CASE("star hub first") {
    CHECK(top_k_by_degree(star(), 1) == std::vector<std::string>{"h"});
    CHECK(top_k_by_degree(star(), 10).size() == 6);
  }
  TEST_CASE("empty graph") { CHECK(top_k_by_degree(SocialGraph{}, 10).empty()); }
  TEST_CASE("ties by weight then id") {
    SocialGraph g;
    g.add_evidence("b", "x", "i1");
    g.add_evidence("a", "y", "i2");
    g.add_evidence("c", "z", "i3");
    g.add_evidence("c", "z", "i4");
    const auto top = top_k_by_degree(g, 3);
    CHECK(top == std::vector<std::string>{"c", "z", "a"});
  }
  TEST_CASE("perfect clustering top-10 equals planted top-10") {
    const auto ev = event();
    const auto top = top_k_by_degree(discover_graph(perfect(ev), ev.dataset), 10);
    std::vector<std::string> mapped;
    for (const auto& id : top) mapped.push_back(id.substr(2));
    CHECK(mapped == top_participants(ev.planted, 10));
  }
}

TEST_SUITE("export") {
  TEST_CASE("dot for one edge") {
    SocialGraph g;
    g.add_evidence("A", "B", "img1");
    const std::string dot = export_graph(g, GraphFormat::kDot);
    CHECK(dot.rfind("graph social {", 0) == 0);
    CHECK(dot.find("\"A\" -- \"B\" [weight=1];") != std::string::npos);
    std::size_t edges = 0;
    for (std::size_t p = dot.find("--"); p != std::string::npos; p = dot.find("--", p + 2)) ++edges;
    CHECK(edges == 1);
  }
  TEST_CASE("node-link round trip") {
    const auto ev = event();
    const SocialGraph g = discover_graph(perfect(ev), ev.dataset);
    CHECK(parse_node_link(export_graph(g, GraphFormat::kJsonNodeLink)) == g);
  }
  TEST_CASE("empty graph in both formats") {
    const SocialGraph g;
    CHECK(parse_node_link(export_graph(g, GraphFormat::kJsonNodeLink)) == g);
    const std::string dot = export_graph(g, GraphFormat::kDot);
    CHECK(dot.find("graph social {") != std::string::npos);
    CHECK(dot.find('}') != std::string::npos);
  }
  TEST_CASE("format names") {
    CHECK(parse_graph_format("dot") == GraphFormat::kDot);
    CHECK(parse_graph_format("json-nodelink") == GraphFormat::kJsonNodeLink);
    CHECK_THROWS_AS(parse_graph_format("graphml"), ConfigError);
  }
  TEST_CASE("self loops are refused, min-weight filter keeps nodes") {
    SocialGraph g;
    CHECK_THROWS(g.add_evidence("a", "a", "i"));
    g.add_evidence("a", "b", "i1");
    g.add_evidence("a", "c", "i1");
    g.add_evidence("a", "c", "i2");
    const SocialGraph f = g.filtered(2);
    CHECK(f.nodes() == g.nodes());
    CHECK(f.edges().size() == 1);
    CHECK(f.connected("a", "c"));
    CHECK(g.filtered(1) == g);
  }
}
