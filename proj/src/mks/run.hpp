#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mks::run {

using nlohmann::json;

const char* artifact_version();

/// MKS_OUT_DIR if set, otherwise "runs".
std::filesystem::path default_out_root();

struct Options {
  std::filesystem::path out_root = "runs";
  /// 0 keeps the OpenMP default (logical cores).
  int threads = 0;
  std::optional<std::uint64_t> seed;
  /// Progress lines (verify criteria, warnings); may be empty.
  std::function<void(const std::string&)> log;
};

struct Result {
  std::filesystem::path dir;
  std::string config_digest;
  std::string summary_digest;
  /// False only for a verify run with a failing criterion.
  bool passed = true;
  std::vector<std::string> warnings;
  json summary;
};

/// Commands: simulate, solve-pde, converge, estimate-a0, verify. Writes the
/// run directory <out_root>/<command>-<digest prefix> with manifest.json,
/// config.canonical, data/ and report/. Throws ConfigError for invalid
/// configuration and other exceptions for runtime failures.
Result run_command(const std::string& command, const json& user_config, const Options& options);

}  // namespace mks::run
