// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dab {

enum class ErrorKind {
  dimension,  // shapes or spans disagree
  domain,     // a value outside its admissible range
  config,     // an invalid configuration value
  data,       // malformed or insufficient input data
  invariant,  // an internal postcondition failed
};

const char* to_string(ErrorKind kind);

/// Base of every error this project throws. The kind survives across
/// library boundaries so callers can map it onto exit codes or foreign
/// exception types.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& m) : Error(ErrorKind::dimension, m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorKind::domain, m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorKind::config, m) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& m) : Error(ErrorKind::data, m) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& m) : Error(ErrorKind::invariant, m) {}
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::domain: return "domain";
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::invariant: return "invariant";
  }
  return "unknown";
}

}  // namespace dab
