#pragma once

#include <stdexcept>
#include <string>

namespace hopcap {

// Invalid WorldConfig, holdout fractions, CLI arguments and similar inputs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request that is well-formed but outside an operation's domain
// (unknown attribute, property used as a first hop, mismatched task/kind).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent file content.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HashMismatchError : public DataError {
 public:
  HashMismatchError(const std::string& file, const std::string& expected, const std::string& actual)
      : DataError("sha256 mismatch for " + file + ": manifest " + expected + ", file " + actual),
        file_(file) {}

  [[nodiscard]] const std::string& file() const noexcept { return file_; }

 private:
  std::string file_;
};

}  // namespace hopcap
