#pragma once

#include <filesystem>
#include <string>

namespace facegraph {

std::string read_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, const std::string& contents);

/// FNV-1a 64-bit, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace facegraph
