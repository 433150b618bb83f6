#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sail {

/// Malformed input file. `line` is 1-based, 0 when the error is not tied to a line.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Invalid configuration or argument; the CLI maps this to the validation exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sail
