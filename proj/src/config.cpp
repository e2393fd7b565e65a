#include "facegraph/config.hpp"

#include <algorithm>
#include <set>

#include "json_util.hpp"

namespace facegraph {

namespace {

constexpr const char* kOperationOrder[] = {"filter", "check", "time", "same", "knn", "neghigh"};

bool* flag_for(OperationFlags& flags, const std::string& name) {
  if (name == "filter") return &flags.filter;
  if (name == "check") return &flags.check;
  if (name == "time") return &flags.time;
  if (name == "same") return &flags.same;
  if (name == "knn") return &flags.knn;
  if (name == "neghigh") return &flags.neghigh;
  return nullptr;
}

}  // namespace

std::string to_string(InitialAlgorithm algorithm) {
  switch (algorithm) {
    case InitialAlgorithm::kDbscan:
      return "dbscan";
    case InitialAlgorithm::kKMeans:
      return "kmeans";
    case InitialAlgorithm::kRandom:
      return "random";
  }
  return "unknown";
}

InitialAlgorithm parse_initial_algorithm(const std::string& name) {
  if (name == "dbscan") return InitialAlgorithm::kDbscan;
  if (name == "kmeans") return InitialAlgorithm::kKMeans;
  if (name == "random") return InitialAlgorithm::kRandom;
  throw ConfigError("unknown initial algorithm '" + name + "'");
}

OperationFlags OperationFlags::from_names(const std::vector<std::string>& names) {
  OperationFlags flags = none();
  for (const auto& n : names) {
    bool* f = flag_for(flags, n);
    if (!f) {
      throw ConfigError("unknown operation '" + n + "'");
    }
    *f = true;
  }
  return flags;
}

std::vector<std::string> OperationFlags::names() const {
  std::vector<std::string> out;
  OperationFlags copy = *this;
  for (const char* n : kOperationOrder) {
    if (*flag_for(copy, n)) {
      out.emplace_back(n);
    }
  }
  return out;
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw ConfigError("invalid pipeline config: " + what);
    }
  };
  require(quality_threshold >= 0.0 && quality_threshold <= 1.0,
          "filter.quality_threshold must be in [0,1]");
  require(time_group_window >= 0, "time_group.window_seconds must be >= 0");
  require(time_group_distance > 0.0, "time_group.distance must be > 0");
  require(duplicate_window >= 0, "dedup.window_seconds must be >= 0");
  require(duplicate_distance >= 0.0, "dedup.distance must be >= 0");
  require(initial.eps > 0.0, "initial.eps must be > 0");
  require(initial.min_samples >= 1, "initial.min_samples must be >= 1");
  require(initial.k >= 1, "initial.k must be >= 1");
  require(split_distance >= 0.0, "cooccurrence.stop_distance must be >= 0");
  require(knn_k >= 1, "knn.k must be >= 1");
  require(knn_votes >= 1, "knn.votes_required must be >= 1");
  require(knn_votes <= knn_k, "knn.votes_required (" + std::to_string(knn_votes) +
                                  ") must not exceed knn.k (" + std::to_string(knn_k) + ")");
  require(prune_threshold >= 0.0 && prune_threshold <= 1.0, "prune.threshold must be in [0,1]");
  std::set<std::string> labels;
  for (const auto& row : ablation) {
    require(!row.label.empty(), "ablation row without label");
    require(labels.insert(row.label).second, "duplicate ablation label '" + row.label + "'");
  }
}

PipelineConfig pipeline_config_from_json_text(const std::string& text, const std::string& source) {
  const json doc = detail::parse_text(text, source);
  if (!doc.is_object()) {
    throw ConfigError(source + ": pipeline config must be a JSON object");
  }
  PipelineConfig c;
  auto section = [&](const char* name) -> json {
    return doc.contains(name) ? doc.at(name) : json::object();
  };
  try {
    c.seed = detail::field_or(doc, "seed", c.seed, source);

    const json initial = section("initial");
    c.initial.algorithm = parse_initial_algorithm(
        detail::field_or<std::string>(initial, "algorithm", "dbscan", source));
    c.initial.eps = detail::field_or(initial, "eps", c.initial.eps, source);
    c.initial.min_samples = detail::field_or(initial, "min_samples", c.initial.min_samples, source);
    c.initial.k = detail::field_or(initial, "k", c.initial.k, source);

    // Distances default relative to eps.
    c.time_group_distance = 1.5 * c.initial.eps;
    c.duplicate_distance = 0.5 * c.initial.eps;
    c.split_distance = c.initial.eps;

    const json filter = section("filter");
    c.operations.filter = detail::field_or(filter, "enabled", true, source);
    c.quality_threshold = detail::field_or(filter, "quality_threshold", c.quality_threshold, source);

    const json dedup = section("dedup");
    c.operations.check = detail::field_or(dedup, "enabled", true, source);
    c.duplicate_window = detail::field_or(dedup, "window_seconds", c.duplicate_window, source);
    c.duplicate_distance = detail::field_or(dedup, "distance", c.duplicate_distance, source);

    const json time = section("time_group");
    c.operations.time = detail::field_or(time, "enabled", true, source);
    c.time_group_window = detail::field_or(time, "window_seconds", c.time_group_window, source);
    c.time_group_distance = detail::field_or(time, "distance", c.time_group_distance, source);

    const json same = section("cooccurrence");
    c.operations.same = detail::field_or(same, "enabled", true, source);
    c.split_distance = detail::field_or(same, "stop_distance", c.split_distance, source);

    const json knn = section("knn");
    c.operations.knn = detail::field_or(knn, "enabled", true, source);
    c.knn_k = detail::field_or(knn, "k", c.knn_k, source);
    c.knn_votes = detail::field_or(knn, "votes_required", c.knn_votes, source);

    const json prune = section("prune");
    c.operations.neghigh = detail::field_or(prune, "enabled", true, source);
    c.prune_threshold = detail::field_or(prune, "threshold", c.prune_threshold, source);

    if (doc.contains("ablation")) {
      for (const json& row : doc.at("ablation")) {
        c.ablation.push_back(
            {detail::field<std::string>(row, "label", source),
             OperationFlags::from_names(
                 detail::field<std::vector<std::string>>(row, "operations", source))});
      }
    }
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& file) {
  return pipeline_config_from_json_text(read_file(file), file.string());
}

std::string pipeline_config_to_json(const PipelineConfig& c) {
  json doc;
  doc["seed"] = c.seed;
  doc["filter"] = {{"enabled", c.operations.filter}, {"quality_threshold", c.quality_threshold}};
  doc["dedup"] = {{"enabled", c.operations.check},
                  {"window_seconds", c.duplicate_window},
                  {"distance", c.duplicate_distance}};
  doc["time_group"] = {{"enabled", c.operations.time},
                       {"window_seconds", c.time_group_window},
                       {"distance", c.time_group_distance}};
  doc["initial"] = {{"algorithm", to_string(c.initial.algorithm)},
                    {"eps", c.initial.eps},
                    {"min_samples", c.initial.min_samples},
                    {"k", c.initial.k}};
  doc["cooccurrence"] = {{"enabled", c.operations.same}, {"stop_distance", c.split_distance}};
  doc["knn"] = {{"enabled", c.operations.knn}, {"k", c.knn_k}, {"votes_required", c.knn_votes}};
  doc["prune"] = {{"enabled", c.operations.neghigh}, {"threshold", c.prune_threshold}};
  if (!c.ablation.empty()) {
    json rows = json::array();
    for (const auto& row : c.ablation) {
      rows.push_back({{"label", row.label}, {"operations", row.operations.names()}});
    }
    doc["ablation"] = std::move(rows);
  }
  return doc.dump(2) + "\n";
}

std::vector<AblationRow> individual_sweep() {
  std::vector<AblationRow> rows{{"initial", OperationFlags::none()}};
  for (const char* name : kOperationOrder) {
    rows.push_back({name, OperationFlags::from_names({name})});
  }
  return rows;
}

std::vector<AblationRow> cumulative_sweep() {
  std::vector<AblationRow> rows{{"initial", OperationFlags::none()}};
  std::vector<std::string> names;
  std::string label;
  for (const char* name : kOperationOrder) {
    names.emplace_back(name);
    label += label.empty() ? name : std::string("+") + name;
    rows.push_back({label, OperationFlags::from_names(names)});
  }
  return rows;
}

std::vector<AblationRow> ablation_rows(const PipelineConfig& config) {
  if (!config.ablation.empty()) {
    return config.ablation;
  }
  std::vector<AblationRow> rows = individual_sweep();
  for (auto& row : cumulative_sweep()) {
    const bool seen = std::any_of(rows.begin(), rows.end(),
                                  [&](const AblationRow& r) { return r.label == row.label; });
    if (!seen) {
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace facegraph
