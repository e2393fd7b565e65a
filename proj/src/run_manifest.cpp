#include "facegraph/run_manifest.hpp"

#include "facegraph/dataset.hpp"
#include "json_util.hpp"

namespace facegraph {

std::string dataset_hash(const std::filesystem::path& dataset_dir) {
  std::string bytes = read_file(dataset_dir / kManifestFile);
  bytes += '\0';
  bytes += read_file(dataset_dir / kFacesFile);
  return fnv1a_hex(bytes);
}

std::string run_manifest_to_json(const RunManifest& m) {
  json doc;
  doc["config"] = json::parse(m.config);
  doc["dataset_hash"] = m.dataset_hash;
  doc["seed"] = m.seed;
  json timings = json::array();
  for (const auto& [stage, ms] : m.timings_ms) {
    timings.push_back({{"stage", stage}, {"ms", ms}});
  }
  doc["timings_ms"] = std::move(timings);
  doc["outputs"] = m.outputs;
  return doc.dump(2) + "\n";
}

RunManifest run_manifest_from_json(const std::string& text, const std::string& source) {
  const json doc = detail::parse_text(text, source);
  RunManifest m;
  m.config = detail::field<json>(doc, "config", source).dump(2) + "\n";
  m.dataset_hash = detail::field<std::string>(doc, "dataset_hash", source);
  m.seed = detail::field<std::uint64_t>(doc, "seed", source);
  for (const json& t : detail::field<json>(doc, "timings_ms", source)) {
    const double ms = detail::field<double>(t, "ms", source);
    if (ms < 0.0) {
      throw ParseError(source, 0, "negative stage timing");
    }
    m.timings_ms.emplace_back(detail::field<std::string>(t, "stage", source), ms);
  }
  m.outputs = detail::field<std::vector<std::string>>(doc, "outputs", source);
  return m;
}

bool verify_run_manifest(const RunManifest& manifest, const std::filesystem::path& dataset_dir) {
  return dataset_hash(dataset_dir) == manifest.dataset_hash;
}

}  // namespace facegraph
