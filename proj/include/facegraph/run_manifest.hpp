#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "facegraph/pipeline.hpp"

namespace facegraph {

/// Record of one `cluster` run: what went in, what came out, how long it took.
struct RunManifest {
  /// Canonical pipeline config JSON.
  std::string config;
  std::string dataset_hash;
  std::uint64_t seed = 0;
  StageTimings timings_ms;
  std::vector<std::string> outputs;
};

/// Content hash of a dataset directory (manifest + faces file bytes).
std::string dataset_hash(const std::filesystem::path& dataset_dir);

std::string run_manifest_to_json(const RunManifest& manifest);
RunManifest run_manifest_from_json(const std::string& text, const std::string& source);

/// True when the dataset directory still hashes to what the manifest recorded.
bool verify_run_manifest(const RunManifest& manifest, const std::filesystem::path& dataset_dir);

}  // namespace facegraph
