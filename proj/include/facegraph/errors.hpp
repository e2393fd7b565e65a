#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace facegraph {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input; line is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A requested grouping would put two faces from one image in one cluster.
class CannotLinkError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Optimistic-concurrency conflict or a target that no longer exists.
class StaleError : public Error {
 public:
  using Error::Error;
};

}  // namespace facegraph
