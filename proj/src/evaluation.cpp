#include "facegraph/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json_util.hpp"

namespace facegraph {

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 20; ++i) {
    out += (i ? ", " : "") + ids[i];
  }
  if (ids.size() > 20) out += ", ...";
  return out;
}

std::uint64_t choose2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace

MissingTruthError::MissingTruthError(std::vector<std::string> faces)
    : Error(std::to_string(faces.size()) + " evaluated face(s) lack a ground-truth label: " +
            join_ids(faces)),
      faces_(std::move(faces)) {}

PairConfusion pair_confusion(const Clustering& clustering, const GroundTruth& truth) {
  const auto labels = truth.label_index();
  std::vector<std::string> missing;

  // Truth ids and predicted ids interned to integers.
  std::unordered_map<std::string, std::size_t> truth_ids;
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> table;
  std::vector<std::uint64_t> truth_sizes;
  std::vector<std::uint64_t> pred_sizes;
  std::uint64_t n = 0;

  auto add = [&](const std::string& face, std::size_t pred) {
    auto it = labels.find(face);
    if (it == labels.end()) {
      missing.push_back(face);
      return;
    }
    auto [t, inserted] = truth_ids.emplace(it->second, truth_ids.size());
    if (inserted) truth_sizes.push_back(0);
    ++truth_sizes[t->second];
    ++pred_sizes[pred];
    ++table[{t->second, pred}];
    ++n;
  };
  for (const auto& [cid, members] : clustering.clusters) {
    pred_sizes.push_back(0);
    for (const auto& f : members) add(f, pred_sizes.size() - 1);
  }
  for (const auto& f : clustering.unassigned) {
    pred_sizes.push_back(0);
    add(f, pred_sizes.size() - 1);
  }
  if (!missing.empty()) {
    throw MissingTruthError(std::move(missing));
  }

  std::uint64_t tp = 0;
  for (const auto& [cell, count] : table) tp += choose2(count);
  std::uint64_t same_pred = 0;
  for (auto s : pred_sizes) same_pred += choose2(s);
  std::uint64_t same_truth = 0;
  for (auto s : truth_sizes) same_truth += choose2(s);

  PairConfusion c;
  c.true_positive = tp;
  c.false_positive = same_pred - tp;
  c.false_negative = same_truth - tp;
  c.true_negative = choose2(n) - tp - c.false_positive - c.false_negative;
  return c;
}

PairMetrics precision_recall_f1(const PairConfusion& c) {
  PairMetrics m;
  const std::uint64_t predicted = c.true_positive + c.false_positive;
  const std::uint64_t actual = c.true_positive + c.false_negative;
  m.precision = predicted == 0 ? 1.0
                               : static_cast<double>(c.true_positive) /
                                     static_cast<double>(predicted);
  m.recall = actual == 0 ? 1.0
                         : static_cast<double>(c.true_positive) / static_cast<double>(actual);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

PairConfusion brute_force_pair_confusion(const Clustering& clustering, const GroundTruth& truth) {
  struct Item {
    const std::string* truth;
    long cluster;  // -1 - index for unassigned singletons
  };
  std::vector<Item> items;
  std::vector<std::string> missing;
  auto lookup = [&](const std::string& face) -> const std::string* {
    for (const auto& [pid, faces] : truth.identities) {
      if (faces.contains(face)) return &pid;
    }
    return nullptr;
  };
  long cluster_no = 0;
  for (const auto& [cid, members] : clustering.clusters) {
    for (const auto& f : members) {
      if (const std::string* t = lookup(f)) {
        items.push_back({t, cluster_no});
      } else {
        missing.push_back(f);
      }
    }
    ++cluster_no;
  }
  long singleton = -1;
  for (const auto& f : clustering.unassigned) {
    if (const std::string* t = lookup(f)) {
      items.push_back({t, singleton--});
    } else {
      missing.push_back(f);
    }
  }
  if (!missing.empty()) {
    throw MissingTruthError(std::move(missing));
  }

  PairConfusion c;
  for (std::size_t a = 0; a < items.size(); ++a) {
    for (std::size_t b = a + 1; b < items.size(); ++b) {
      const bool same_truth = *items[a].truth == *items[b].truth;
      const bool same_cluster = items[a].cluster == items[b].cluster;
      if (same_truth && same_cluster) {
        ++c.true_positive;
      } else if (same_cluster) {
        ++c.false_positive;
      } else if (same_truth) {
        ++c.false_negative;
      } else {
        ++c.true_negative;
      }
    }
  }
  return c;
}

PairMetrics brute_force_pair_metrics(const Clustering& clustering, const GroundTruth& truth) {
  return precision_recall_f1(brute_force_pair_confusion(clustering, truth));
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t common = 0;
  for (const auto& x : a) {
    if (b.contains(x)) ++common;
  }
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

int jaccard_match(const std::set<std::string>& truth_faces,
                  const std::set<std::string>& cluster_faces, double threshold) {
  if (truth_faces.empty()) {
    throw ConfigError("jaccard_match: empty truth face set");
  }
  return jaccard(truth_faces, cluster_faces) > threshold ? 1 : 0;
}

std::vector<std::string> top_participants(const PlantedGraph& truth_graph, std::size_t k) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> stats;
  for (const auto& n : truth_graph.nodes) stats[n] = {0, 0};
  for (const auto& [key, w] : truth_graph.edges) {
    for (const std::string* n : {&key.first, &key.second}) {
      ++stats[*n].first;
      stats[*n].second += w;
    }
  }
  std::vector<std::string> order;
  for (const auto& [n, s] : stats) order.push_back(n);
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

double rs_score(const Clustering& clustering, const GroundTruth& truth, const EventDataset& dataset,
                std::size_t k, double threshold) {
  const auto top = top_participants(truth_cooccurrence_graph(dataset, truth), k);
  if (top.empty()) return 0.0;
  const auto owner = clustering.assignment();

  struct Candidate {
    double j;
    const std::string* participant;
    const std::string* cluster;
  };
  std::vector<Candidate> candidates;
  for (const auto& pid : top) {
    const auto& faces = truth.identities.at(pid);
    std::set<std::string> touched;
    for (const auto& f : faces) {
      if (auto it = owner.find(f); it != owner.end()) touched.insert(it->second);
    }
    for (const auto& cid : touched) {
      const auto& members = clustering.clusters.at(cid);
      if (jaccard_match(faces, members, threshold)) {
        candidates.push_back({jaccard(faces, members), &pid, &clustering.clusters.find(cid)->first});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.j != b.j) return a.j > b.j;
    if (*a.participant != *b.participant) return *a.participant < *b.participant;
    return *a.cluster < *b.cluster;
  });
  std::set<std::string> used_participants;
  std::set<std::string> used_clusters;
  for (const auto& c : candidates) {
    if (used_participants.contains(*c.participant) || used_clusters.contains(*c.cluster)) continue;
    used_participants.insert(*c.participant);
    used_clusters.insert(*c.cluster);
  }
  return static_cast<double>(used_participants.size()) / static_cast<double>(top.size());
}

MetricRow evaluate(const Clustering& clustering, const GroundTruth& truth,
                   const EventDataset& dataset, const std::string& label) {
  MetricRow row;
  row.label = label;
  row.confusion = pair_confusion(clustering, truth);
  const PairMetrics m = precision_recall_f1(row.confusion);
  row.precision = m.precision;
  row.recall = m.recall;
  row.f1 = m.f1;
  row.rs = rs_score(clustering, truth, dataset);
  return row;
}

namespace {

json row_json(const MetricRow& r) {
  return {{"label", r.label},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"rs", r.rs},
          {"pair_confusion",
           {{"true_positive", r.confusion.true_positive},
            {"false_positive", r.confusion.false_positive},
            {"false_negative", r.confusion.false_negative},
            {"true_negative", r.confusion.true_negative}}}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

constexpr const char* kCsvHeader =
    "label,precision,recall,f1,rs,true_positive,false_positive,false_negative,true_negative";

}  // namespace

std::string report_to_json(const EvalReport& report) {
  json doc = row_json(report.overall);
  json rows = json::array();
  for (const auto& r : report.ablation) rows.push_back(row_json(r));
  doc["ablation"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = std::string(kCsvHeader) + "\n";
  auto emit = [&](const MetricRow& r) {
    out += csv_escape(r.label) + "," + format_double(r.precision) + "," +
           format_double(r.recall) + "," + format_double(r.f1) + "," + format_double(r.rs) + "," +
           std::to_string(r.confusion.true_positive) + "," +
           std::to_string(r.confusion.false_positive) + "," +
           std::to_string(r.confusion.false_negative) + "," +
           std::to_string(r.confusion.true_negative) + "\n";
  };
  if (report.ablation.empty()) {
    emit(report.overall);
  } else {
    for (const auto& r : report.ablation) emit(r);
  }
  return out;
}

std::vector<MetricRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<MetricRow> rows;
  auto number = [&](const std::string& cell, auto& out) {
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw ParseError("<csv>", line_no, "bad number '" + cell + "'");
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kCsvHeader) throw ParseError("<csv>", 1, "unexpected header");
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 9) throw ParseError("<csv>", line_no, "expected 9 columns");
    MetricRow r;
    r.label = cells[0];
    number(cells[1], r.precision);
    number(cells[2], r.recall);
    number(cells[3], r.f1);
    number(cells[4], r.rs);
    number(cells[5], r.confusion.true_positive);
    number(cells[6], r.confusion.false_positive);
    number(cells[7], r.confusion.false_negative);
    number(cells[8], r.confusion.true_negative);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace facegraph
