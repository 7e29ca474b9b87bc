#pragma once

#include <stdexcept>
#include <string>

namespace mks {

/// Configuration rejected during validation. `path` names the offending field
/// in dotted form, e.g. "mollifier.alpha".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::invalid_argument(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A sampler or solver could not complete its work.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mks
