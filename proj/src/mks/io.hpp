#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mks/grid.hpp"
#include "mks/particles.hpp"

namespace mks::io {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// Trajectory container, all little-endian:
///   "MKS1" | u64 N | f64 dt | u64 seed | u64 count | f64 times[count]
///   then per snapshot f64 x[N], f64 y[N].
struct TrajectoryFile {
  std::int64_t n = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<Snapshot> snapshots;
};

void write_trajectory(const std::filesystem::path& path, const TrajectoryFile& traj);
TrajectoryFile read_trajectory(const std::filesystem::path& path);
/// Columns t, particle, x, y.
void write_trajectory_csv(const std::filesystem::path& path, std::span<const Snapshot> snapshots);

/// Field container: "MKF1" | f64 half_extent | u64 n | f64 values[n*n] row-major.
void write_field(const std::filesystem::path& path, const Field& field);
Field read_field(const std::filesystem::path& path);
/// Columns x, y, value.
void write_field_csv(const std::filesystem::path& path, const Field& field);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

struct JUnitCase {
  std::string name;
  std::string classname;
  bool passed = true;
  double seconds = 0.0;
  std::string message;
};
std::string junit_xml(std::string_view suite, std::span<const JUnitCase> cases);

}  // namespace mks::io
