#pragma once

#include <algorithm>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "facegraph/errors.hpp"
#include "facegraph/io.hpp"

namespace facegraph {

using json = nlohmann::ordered_json;

namespace detail {

inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
    throw ParseError(source, line, e.what());
  }
}

inline json parse_document(const std::filesystem::path& file) {
  return parse_text(read_file(file), file.string());
}

template <typename T>
T field(const json& obj, const char* key, const std::string& source, std::size_t line = 0) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(source, line, std::string("missing field '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(source, line, std::string("bad field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& source) {
  if (!obj.is_object() || !obj.contains(key)) {
    return fallback;
  }
  return field<T>(obj, key, source);
}

}  // namespace detail
}  // namespace facegraph
