#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mks::verify {

using nlohmann::json;

constexpr int kCriteria = 12;

struct Options {
  /// Criterion ids to run; empty runs all.
  std::vector<int> only;
  /// Kernel scale under test; the fixtures expect 1.
  double kernel_scale = 1.0;
  std::uint64_t seed = 0;
  /// Scratch directory for the determinism runs.
  std::filesystem::path scratch;
  /// Called after each criterion finishes.
  std::function<void(const struct Criterion&)> on_result;
};

struct Criterion {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  /// One-line outcome; names the failing property on failure.
  std::string detail;
  json metrics = json::object();
};

struct Report {
  std::vector<Criterion> criteria;
  bool passed() const;
};

const char* criterion_name(int id);

Report run_suite(const Options& options);

}  // namespace mks::verify
