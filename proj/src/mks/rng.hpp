#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace mks {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
/// pure function of (key, counter), so each particle owns an independent
/// stream addressed by its index and results never depend on thread
/// scheduling.
class Philox {
 public:
  using Counter = std::array<std::uint32_t, 4>;

  explicit constexpr Philox(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  constexpr Counter operator()(Counter ctr) const noexcept {
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, k);
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    return ctr;
  }

  /// Counter built from two 64-bit coordinates (stream, index).
  static constexpr Counter counter(std::uint64_t stream, std::uint64_t index) noexcept {
    return {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
            static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  }

 private:
  static constexpr Counter single_round(Counter c, std::array<std::uint32_t, 2> k) noexcept {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  std::array<std::uint32_t, 2> key_;
};

/// Uniform double in (0, 1] from 64 random bits.
inline double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

/// Two uniforms in (0, 1] from one Philox block.
inline std::array<double, 2> uniform_pair(const Philox& gen, std::uint64_t stream, std::uint64_t index) noexcept {
  const auto r = gen(Philox::counter(stream, index));
  return {to_unit_open_closed(r[0], r[1]), to_unit_open_closed(r[2], r[3])};
}

/// Two independent standard normals (Box-Muller) from one Philox block.
inline std::array<double, 2> normal_pair(const Philox& gen, std::uint64_t stream, std::uint64_t index) noexcept {
  const auto u = uniform_pair(gen, stream, index);
  const double radius = std::sqrt(-2.0 * std::log(u[0]));
  const double angle = 2.0 * std::numbers::pi * u[1];
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// SplitMix64 finaliser, used to derive named substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seed of the substream `name` under a master seed.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::string_view name) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return splitmix64(master ^ splitmix64(h));
}

/// Seed of the i-th child of a substream (replicas, trials).
constexpr std::uint64_t child_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(parent + splitmix64(index + 0x632BE59BD9B4E019ull));
}

}  // namespace mks
