#pragma once

#include <stdexcept>
#include <string>

namespace argreframe {

// Exception families map onto the CLI exit codes: config/usage -> 2,
// data/validation -> 3, backend failure -> 4.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string at_line(const std::string& what, std::size_t line) {
  return what + " (line " + std::to_string(line) + ")";
}

}  // namespace argreframe
