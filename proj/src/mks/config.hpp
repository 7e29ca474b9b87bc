#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mks/analysis.hpp"
#include "mks/particles.hpp"
#include "mks/pde.hpp"

namespace mks::config {

using nlohmann::json;

/// Parses YAML or JSON text into a JSON document. Throws ConfigError with an
/// empty path on syntax errors.
json parse_text(std::string_view text);
json load_file(const std::string& path);

/// Validates a user document against the schema and returns the canonical
/// document: every key present, defaults materialized, reals stored as
/// doubles. Unknown keys and type or range errors throw ConfigError naming
/// the dotted field path.
json canonicalize(const json& user);

/// Stable text of a canonical document (sorted keys, two-space indent).
std::string canonical_text(const json& canonical);
/// SHA-256 of canonical_text.
std::string digest(const json& canonical);

/// Fraction of the initial mass in the outer strip of width
/// min(L/10, 10 h) of the grid.
double initial_boundary_mass(const json& canonical);

/// Advisory messages (supercritical mass, boundary mass, dt policy).
std::vector<std::string> warnings(const json& canonical);

std::uint64_t seed(const json& c);
InitialDensity density(const json& c);
GridSpec grid(const json& c);
/// Particle parameters; `cutoff_level` replaces cutoff.A when the config
/// leaves it to be estimated.
SimParams sim_params(const json& c, std::optional<double> cutoff_level = std::nullopt);
std::vector<double> particle_observers(const json& c);
/// Uncut PDE configuration; `t_end` overrides pde.t_end.
PdeConfig pde_config(const json& c, std::optional<double> t_end = std::nullopt);
/// True when cutoff.A is null (estimate from the PDE).
bool cutoff_is_auto(const json& c);
ConvergenceConfig convergence_config(const json& c);

}  // namespace mks::config
