#include "mks/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "mks/density.hpp"
#include "mks/errors.hpp"
#include "mks/io.hpp"

namespace mks::config {

namespace {

constexpr double kPi = std::numbers::pi;

enum class Kind { real, integer, uint64, boolean, choice, real_list, int_list, vec2, components, optional_real,
                  optional_real_list, optional_bool };

struct Entry {
  Kind kind;
  json fallback;
  std::vector<std::string> options = {};
};

/// Dotted path -> field definition.
const std::map<std::string, Entry>& schema() {
  static const std::map<std::string, Entry> s = {
      {"seed", {Kind::uint64, 0}},
      {"kernel.kernel_scale", {Kind::real, 1.0}},
      {"mollifier.profile", {Kind::choice, "gaussian", {"gaussian", "bump"}}},
      {"mollifier.width", {Kind::real, 1.0}},
      {"mollifier.alpha", {Kind::real, 0.15}},
      {"cutoff.A", {Kind::optional_real, nullptr}},
      {"cutoff.margin", {Kind::real, 0.1}},
      {"density.kind", {Kind::choice, "gaussian", {"gaussian", "gaussian_mixture", "uniform_disk"}}},
      {"density.mass", {Kind::real, 4.0 * kPi}},
      {"density.mean", {Kind::vec2, json::array({0.0, 0.0})}},
      {"density.sigma", {Kind::real, 1.0}},
      {"density.components", {Kind::components, json::array()}},
      {"density.center", {Kind::vec2, json::array({0.0, 0.0})}},
      {"density.radius", {Kind::real, 1.0}},
      {"particles.n", {Kind::integer, 1000}},
      {"particles.dt", {Kind::real, 0.01}},
      {"particles.t_end", {Kind::real, 1.0}},
      {"particles.observers", {Kind::optional_real_list, nullptr}},
      {"particles.neighbor_mode", {Kind::choice, "direct", {"direct", "cell_list"}}},
      {"particles.cut_radius", {Kind::real, 0.0}},
      {"particles.diffusion", {Kind::real, 1.0}},
      {"particles.drift_scale", {Kind::real, 1.0}},
      {"particles.write_csv", {Kind::optional_bool, nullptr}},
      {"grid.half_extent", {Kind::real, 12.0}},
      {"grid.n", {Kind::integer, 256}},
      {"pde.dt", {Kind::real, 0.002}},
      {"pde.t_end", {Kind::real, 2.0}},
      {"pde.observers", {Kind::optional_real_list, nullptr}},
      {"pde.use_cutoff", {Kind::boolean, false}},
      {"pde.poisson_mode", {Kind::choice, "torus_spectral", {"torus_spectral", "free_space_padded"}}},
      {"pde.dealias", {Kind::boolean, true}},
      {"pde.blowup_linf_threshold", {Kind::real, 1e6}},
      {"pde.interaction", {Kind::boolean, true}},
      {"pde.write_csv", {Kind::boolean, false}},
      {"analysis.beta", {Kind::real, 1.5}},
      {"analysis.gamma", {Kind::real, 1.1}},
      {"analysis.local_radius", {Kind::real, 3.0}},
      {"convergence.n_ladder", {Kind::int_list, json::array({500, 2000, 8000})}},
      {"convergence.replicas", {Kind::integer, 8}},
      {"convergence.t_end", {Kind::real, 0.25}},
      {"convergence.n_observers", {Kind::integer, 5}},
      {"convergence.deposit", {Kind::choice, "direct", {"direct", "fast"}}},
      {"convergence.mckean_oracle", {Kind::boolean, false}},
      {"verify.only", {Kind::int_list, json::array()}},
  };
  return s;
}

bool is_section(const std::string& path) {
  const std::string prefix = path + ".";
  for (const auto& [key, entry] : schema())
    if (key.compare(0, prefix.size(), prefix) == 0) return true;
  return false;
}

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

json from_yaml(const YAML::Node& node, const std::string& path) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (std::size_t i = 0; i < node.size(); ++i) arr.push_back(from_yaml(node[i], path + "[" + std::to_string(i) + "]"));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (obj.contains(key)) throw ConfigError(join(path, key), "duplicate key");
        obj[key] = from_yaml(kv.second, join(path, key));
      }
      return obj;
    }
    case YAML::NodeType::Scalar: {
      const std::string& text = node.Scalar();
      if (node.Tag() == "!") return text;  // quoted
      if (text == "true" || text == "True" || text == "TRUE") return true;
      if (text == "false" || text == "False" || text == "FALSE") return false;
      if (text == "null" || text == "~" || text == "Null" || text == "NULL") return nullptr;
      try {
        std::size_t used = 0;
        if (!text.empty() && text[0] != '-' && text.find_first_not_of("0123456789") == std::string::npos) {
          const unsigned long long v = std::stoull(text, &used);
          if (used == text.size()) return static_cast<std::uint64_t>(v);
        }
        if (text.size() > 1 && text[0] == '-' && text.find_first_not_of("0123456789", 1) == std::string::npos) {
          const long long v = std::stoll(text, &used);
          if (used == text.size()) return static_cast<std::int64_t>(v);
        }
        const double d = std::stod(text, &used);
        if (used == text.size()) return d;
      } catch (const std::exception&) {
      }
      if (text == ".inf" || text == ".Inf") return std::numeric_limits<double>::infinity();
      return text;
    }
  }
  return nullptr;
}

std::string type_name(const json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string \"" + v.get<std::string>() + "\"";
  if (v.is_array()) return "list";
  return "mapping";
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number, got " + type_name(v));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) throw ConfigError(path, "integer out of range");
    return static_cast<std::int64_t>(u);
  }
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::fabs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  throw ConfigError(path, "expected an integer, got " + type_name(v));
}

json typed(const Entry& e, const json& v, const std::string& path) {
  switch (e.kind) {
    case Kind::real:
      return as_real(v, path);
    case Kind::optional_real:
      return v.is_null() ? json(nullptr) : json(as_real(v, path));
    case Kind::integer:
      return as_int(v, path);
    case Kind::uint64:
      if (v.is_number_unsigned()) return v.get<std::uint64_t>();
      if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
      throw ConfigError(path, "expected an unsigned 64-bit integer, got " + type_name(v));
    case Kind::boolean:
      if (!v.is_boolean()) throw ConfigError(path, "expected true or false, got " + type_name(v));
      return v;
    case Kind::optional_bool:
      if (!v.is_null() && !v.is_boolean()) throw ConfigError(path, "expected true, false or null, got " + type_name(v));
      return v;
    case Kind::choice: {
      if (!v.is_string()) throw ConfigError(path, "expected a string, got " + type_name(v));
      const auto s = v.get<std::string>();
      for (const auto& o : e.options)
        if (o == s) return s;
      std::string all;
      for (const auto& o : e.options) all += (all.empty() ? "" : ", ") + o;
      throw ConfigError(path, "unknown value \"" + s + "\" (expected one of: " + all + ")");
    }
    case Kind::optional_real_list:
      if (v.is_null()) return nullptr;
      [[fallthrough]];
    case Kind::real_list: {
      if (!v.is_array()) throw ConfigError(path, "expected a list of numbers, got " + type_name(v));
      json out = json::array();
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_real(v[i], path + "[" + std::to_string(i) + "]"));
      return out;
    }
    case Kind::int_list: {
      if (!v.is_array()) throw ConfigError(path, "expected a list of integers, got " + type_name(v));
      json out = json::array();
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], path + "[" + std::to_string(i) + "]"));
      return out;
    }
    case Kind::vec2: {
      if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected a list of two numbers");
      return json::array({as_real(v[0], path + "[0]"), as_real(v[1], path + "[1]")});
    }
    case Kind::components: {
      if (!v.is_array()) throw ConfigError(path, "expected a list of {weight, mean, sigma} mappings");
      json out = json::array();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!v[i].is_object()) throw ConfigError(p, "expected a mapping with weight, mean, sigma");
        for (const auto& [key, val] : v[i].items())
          if (key != "weight" && key != "mean" && key != "sigma") throw ConfigError(p + "." + key, "unknown key");
        for (const char* key : {"weight", "mean", "sigma"})
          if (!v[i].contains(key)) throw ConfigError(p + "." + key, "missing required key");
        json c;
        c["weight"] = as_real(v[i]["weight"], p + ".weight");
        c["mean"] = typed(Entry{Kind::vec2, nullptr}, v[i]["mean"], p + ".mean");
        c["sigma"] = as_real(v[i]["sigma"], p + ".sigma");
        out.push_back(c);
      }
      return out;
    }
  }
  return v;
}

json::json_pointer pointer(const std::string& path) {
  std::string p = "/" + path;
  for (char& c : p)
    if (c == '.') c = '/';
  return json::json_pointer(p);
}

void walk(const json& node, const std::string& path, json& out) {
  if (!node.is_object()) throw ConfigError(path, "expected a mapping, got " + type_name(node));
  for (const auto& [key, value] : node.items()) {
    const std::string p = join(path, key);
    const auto& s = schema();
    if (const auto it = s.find(p); it != s.end()) {
      out[pointer(p)] = typed(it->second, value, p);
    } else if (is_section(p)) {
      if (value.is_null()) continue;
      walk(value, p, out);
    } else {
      throw ConfigError(p, "unknown key");
    }
  }
}

const json& at(const json& c, const std::string& path) { return c.at(pointer(path)); }
double real(const json& c, const std::string& path) { return at(c, path).get<double>(); }
std::int64_t integer(const json& c, const std::string& path) { return at(c, path).get<std::int64_t>(); }
std::string text(const json& c, const std::string& path) { return at(c, path).get<std::string>(); }
bool flag(const json& c, const std::string& path) { return at(c, path).get<bool>(); }
Vec2 vec(const json& c, const std::string& path) { return {at(c, path)[0].get<double>(), at(c, path)[1].get<double>()}; }

std::vector<double> reals(const json& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.get<double>());
  return out;
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

void check_observers(const json& c, const std::string& path, double t_end) {
  const auto obs = reals(at(c, path));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    require(obs[i] >= 0.0 && obs[i] <= t_end, p, "must lie in [0, t_end]");
    require(i == 0 || obs[i] > obs[i - 1], p, "observers must be strictly increasing");
  }
}

template <class F>
void rethrow_as(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

void validate(const json& c) {
  require(real(c, "kernel.kernel_scale") > 0.0, "kernel.kernel_scale", "must be > 0");
  const double alpha = real(c, "mollifier.alpha");
  const double beta = real(c, "analysis.beta");
  const double gamma = real(c, "analysis.gamma");
  require(beta > 1.0, "analysis.beta", "must be > 1");
  require(gamma > 1.0 && gamma < beta, "analysis.gamma", "must satisfy 1 < gamma < beta");
  const double alpha_max = 1.0 / (2.0 + 2.0 * beta);
  require(alpha > 0.0 && alpha < alpha_max, "mollifier.alpha",
          "must satisfy 0 < alpha < 1/(2 + 2 beta) = " + io::format_double(alpha_max) +
              " for beta = " + io::format_double(beta) + " (mollifier scaling condition)");
  require(real(c, "mollifier.width") > 0.0, "mollifier.width", "must be > 0");
  if (!at(c, "cutoff.A").is_null()) require(real(c, "cutoff.A") > 0.0, "cutoff.A", "must be > 0");
  require(real(c, "cutoff.margin") >= 0.0, "cutoff.margin", "must be >= 0");

  require(real(c, "density.mass") > 0.0, "density.mass", "must be > 0");
  const std::string kind = text(c, "density.kind");
  if (kind == "gaussian") require(real(c, "density.sigma") > 0.0, "density.sigma", "must be > 0");
  if (kind == "uniform_disk") {
    require(real(c, "density.radius") > 0.0, "density.radius", "must be > 0");
    const Vec2 ctr = vec(c, "density.center");
    require(std::max(std::fabs(ctr.x), std::fabs(ctr.y)) + real(c, "density.radius") < real(c, "grid.half_extent"),
            "density.radius", "disk must lie inside the grid");
  }
  if (kind == "gaussian_mixture") {
    const json& comps = at(c, "density.components");
    require(!comps.empty(), "density.components", "gaussian_mixture needs at least one component");
    double total = 0.0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string p = "density.components[" + std::to_string(i) + "]";
      require(comps[i]["weight"].get<double>() > 0.0, p + ".weight", "must be > 0");
      require(comps[i]["sigma"].get<double>() > 0.0, p + ".sigma", "must be > 0");
      total += comps[i]["weight"].get<double>();
    }
    require(std::fabs(total - 1.0) <= 1e-9, "density.components", "weights must sum to 1");
  }

  require(real(c, "grid.half_extent") > 0.0, "grid.half_extent", "must be > 0");
  const std::int64_t n = integer(c, "grid.n");
  require(n >= 16 && (n & (n - 1)) == 0, "grid.n", "must be a power of two >= 16");
  require(integer(c, "particles.n") >= 1, "particles.n", "must be >= 1");
  require(real(c, "particles.dt") > 0.0, "particles.dt", "must be > 0");
  require(real(c, "particles.t_end") > real(c, "particles.dt"), "particles.t_end", "must be greater than particles.dt");
  check_observers(c, "particles.observers", real(c, "particles.t_end"));
  require(real(c, "particles.cut_radius") >= 0.0, "particles.cut_radius", "must be >= 0");
  require(real(c, "particles.diffusion") >= 0.0, "particles.diffusion", "must be >= 0");
  require(real(c, "particles.drift_scale") >= 0.0, "particles.drift_scale", "must be >= 0");
  rethrow_as("particles.cut_radius", [&] { sim_params(c, 1.0).validate(); });

  require(real(c, "pde.dt") > 0.0, "pde.dt", "must be > 0");
  require(real(c, "pde.t_end") > 0.0, "pde.t_end", "must be > 0");
  check_observers(c, "pde.observers", real(c, "pde.t_end"));
  require(real(c, "pde.blowup_linf_threshold") > 0.0, "pde.blowup_linf_threshold", "must be > 0");
  const double radius = real(c, "analysis.local_radius");
  require(radius > 0.0 && 1.2 * radius < real(c, "grid.half_extent"), "analysis.local_radius",
          "must satisfy 0 < 1.2 local_radius < grid.half_extent");

  const json& ladder = at(c, "convergence.n_ladder");
  require(!ladder.empty(), "convergence.n_ladder", "must not be empty");
  for (std::size_t i = 0; i < ladder.size(); ++i)
    require(ladder[i].get<std::int64_t>() >= 2, "convergence.n_ladder[" + std::to_string(i) + "]", "must be >= 2");
  require(integer(c, "convergence.replicas") >= 2, "convergence.replicas", "must be >= 2");
  require(real(c, "convergence.t_end") > 0.0, "convergence.t_end", "must be > 0");
  require(integer(c, "convergence.n_observers") >= 1, "convergence.n_observers", "must be >= 1");
  for (std::size_t i = 0; i < at(c, "verify.only").size(); ++i) {
    const auto id = at(c, "verify.only")[i].get<std::int64_t>();
    require(id >= 1 && id <= 12, "verify.only[" + std::to_string(i) + "]", "criterion ids run from 1 to 12");
  }
}

}  // namespace

json parse_text(std::string_view text) {
  try {
    const YAML::Node root = YAML::Load(std::string(text));
    json doc = from_yaml(root, "");
    if (doc.is_null()) return json::object();
    if (!doc.is_object()) throw ConfigError("", "top level must be a mapping");
    return doc;
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("parse error: ") + e.what());
  }
}

json load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

json canonicalize(const json& user) {
  json out = json::object();
  for (const auto& [path, entry] : schema()) out[pointer(path)] = entry.fallback;
  walk(user, "", out);

  // Derived defaults.
  if (at(out, "particles.observers").is_null())
    out[pointer("particles.observers")] = json::array({0.0, real(out, "particles.t_end")});
  if (at(out, "pde.observers").is_null()) {
    json obs = json::array();
    const double t = real(out, "pde.t_end");
    for (int i = 0; i <= 4; ++i) obs.push_back(i == 4 ? t : t * i / 4.0);
    out[pointer("pde.observers")] = obs;
  }
  if (at(out, "particles.write_csv").is_null())
    out[pointer("particles.write_csv")] = integer(out, "particles.n") <= 2000;
  validate(out);
  return out;
}

std::string canonical_text(const json& canonical) { return canonical.dump(2) + "\n"; }

std::string digest(const json& canonical) { return io::sha256_hex(canonical_text(canonical)); }

double initial_boundary_mass(const json& c) {
  const GridSpec g = grid(c);
  const Field rho = sample(g, [d = density(c)](Vec2 x) { return d.value(x); });
  return boundary_mass(rho, std::min(0.1 * g.half_extent, 10.0 * g.h())) / real(c, "density.mass");
}

std::vector<std::string> warnings(const json& c) {
  std::vector<std::string> w;
  const double mass = real(c, "density.mass");
  if (mass >= 8.0 * kPi)
    w.push_back("density.mass = " + io::format_double(mass) +
                " is at or above the critical mass 8 pi; finite-time blow-up is expected");
  const double bm = initial_boundary_mass(c);
  if (bm > 1e-8)
    w.push_back("initial mass near the grid boundary is a fraction " + io::format_double(bm) +
                " of the total (> 1e-8); increase grid.half_extent");
  return w;
}

std::uint64_t seed(const json& c) { return at(c, "seed").get<std::uint64_t>(); }

InitialDensity density(const json& c) {
  const std::string kind = text(c, "density.kind");
  const double mass = real(c, "density.mass");
  if (kind == "uniform_disk") return InitialDensity::uniform_disk(vec(c, "density.center"), real(c, "density.radius"), mass);
  if (kind == "gaussian_mixture") {
    std::vector<GaussianComponent> comps;
    for (const auto& e : at(c, "density.components"))
      comps.push_back({e["weight"].get<double>(), {e["mean"][0].get<double>(), e["mean"][1].get<double>()},
                       e["sigma"].get<double>()});
    return InitialDensity::mixture(std::move(comps), mass);
  }
  return InitialDensity::gaussian(vec(c, "density.mean"), real(c, "density.sigma"), mass);
}

GridSpec grid(const json& c) {
  const auto n = integer(c, "grid.n");
  if (n < 1 || n > (1 << 14)) throw ConfigError("grid.n", "must be a power of two in [16, 16384]");
  return {real(c, "grid.half_extent"), static_cast<int>(n)};
}

bool cutoff_is_auto(const json& c) { return at(c, "cutoff.A").is_null(); }

SimParams sim_params(const json& c, std::optional<double> cutoff_level) {
  SimParams p;
  p.mollifier.alpha = real(c, "mollifier.alpha");
  p.mollifier.n_particles = integer(c, "particles.n");
  p.mollifier.profile = text(c, "mollifier.profile") == "bump" ? ProfileKind::bump : ProfileKind::gaussian;
  p.mollifier.width = real(c, "mollifier.width");
  if (cutoff_level)
    p.cutoff.A = *cutoff_level;
  else if (!cutoff_is_auto(c))
    p.cutoff.A = real(c, "cutoff.A");
  else
    throw ConfigError("cutoff.A", "level not resolved (estimate it from the PDE first)");
  p.dt = real(c, "particles.dt");
  p.t_end = real(c, "particles.t_end");
  p.seed = seed(c);
  p.neighbor_mode = text(c, "particles.neighbor_mode") == "cell_list" ? NeighborMode::cell_list : NeighborMode::direct;
  p.cut_radius = real(c, "particles.cut_radius");
  p.mass = real(c, "density.mass");
  p.kernel_scale = real(c, "kernel.kernel_scale");
  p.drift_scale = real(c, "particles.drift_scale");
  p.diffusion = real(c, "particles.diffusion");
  return p;
}

std::vector<double> particle_observers(const json& c) { return reals(at(c, "particles.observers")); }

PdeConfig pde_config(const json& c, std::optional<double> t_end) {
  PdeConfig p;
  p.grid = grid(c);
  p.dt = real(c, "pde.dt");
  p.t_end = t_end.value_or(real(c, "pde.t_end"));
  p.poisson_mode =
      text(c, "pde.poisson_mode") == "free_space_padded" ? PoissonMode::free_space_padded : PoissonMode::torus_spectral;
  p.dealias = flag(c, "pde.dealias");
  p.blowup_linf_threshold = real(c, "pde.blowup_linf_threshold");
  p.kernel_scale = real(c, "kernel.kernel_scale");
  p.interaction = flag(c, "pde.interaction");
  if (!t_end) p.observers = reals(at(c, "pde.observers"));
  return p;
}

ConvergenceConfig convergence_config(const json& c) {
  ConvergenceConfig k;
  k.n_ladder.clear();
  for (const auto& n : at(c, "convergence.n_ladder")) k.n_ladder.push_back(n.get<std::int64_t>());
  k.replicas = integer(c, "convergence.replicas");
  k.alpha = real(c, "mollifier.alpha");
  k.beta = real(c, "analysis.beta");
  k.gamma = real(c, "analysis.gamma");
  k.local_radius = real(c, "analysis.local_radius");
  k.mass = real(c, "density.mass");
  k.cutoff_margin = real(c, "cutoff.margin");
  k.profile = text(c, "mollifier.profile") == "bump" ? ProfileKind::bump : ProfileKind::gaussian;
  k.mollifier_width = real(c, "mollifier.width");
  k.density = density(c);
  k.grid = grid(c);
  k.particle_dt = real(c, "particles.dt");
  k.pde_dt = real(c, "pde.dt");
  k.t_end = real(c, "convergence.t_end");
  k.n_observers = static_cast<int>(integer(c, "convergence.n_observers"));
  k.neighbor_mode = text(c, "particles.neighbor_mode") == "cell_list" ? NeighborMode::cell_list : NeighborMode::direct;
  k.deposit = text(c, "convergence.deposit") == "fast" ? DepositMethod::fast : DepositMethod::direct;
  k.kernel_scale = real(c, "kernel.kernel_scale");
  k.diffusion = real(c, "particles.diffusion");
  k.seed = seed(c);
  k.mckean_oracle = flag(c, "convergence.mckean_oracle");
  // Explicit cutoff levels are not used: the study derives A from the PDE.
  return k;
}

}  // namespace mks::config
