#include "mks/run.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>

#include "mks/analysis.hpp"
#include "mks/config.hpp"
#include "mks/density.hpp"
#include "mks/errors.hpp"
#include "mks/io.hpp"
#include "mks/verify.hpp"

#ifndef MKS_VERSION
#define MKS_VERSION "0.0.0"
#endif

namespace mks::run {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Context {
  const json& config;
  fs::path dir;
  const Options& options;
  json summary = json::object();
  json diagnostics = json::object();
  std::vector<std::string> warnings;
  bool passed = true;

  fs::path data(const std::string& name) const { return dir / "data" / name; }
  fs::path report(const std::string& name) const { return dir / "report" / name; }
  void log(const std::string& line) const {
    if (options.log) options.log(line);
  }
};

Field initial_field(const json& c) {
  const InitialDensity d = config::density(c);
  return sample(config::grid(c), [&](Vec2 x) { return d.value(x); });
}

json blowup_json(const BlowupReport& b) {
  return {{"blew_up", b.blew_up},
          {"t_detected", b.t_detected ? json(*b.t_detected) : json(nullptr)},
          {"trigger", to_string(b.trigger)}};
}

json pde_diagnostics_json(const PdeDiagnostics& d) {
  return {{"initial_mass", d.initial_mass},
          {"max_relative_mass_drift", d.max_relative_mass_drift},
          {"min_positivity_ratio", d.min_positivity_ratio},
          {"boundary_mass_initial", d.boundary_mass_initial},
          {"boundary_mass_final", d.boundary_mass_final},
          {"steps", d.steps},
          {"min_dt", d.min_dt},
          {"max_chemo_grad", d.max_chemo_grad}};
}

struct CutoffChoice {
  double level = 0.0;
  bool automatic = false;
  std::optional<double> a0_estimate;
};

/// Explicit cutoff.A, or (1 + margin) times the A0 estimate of an uncut
/// PDE solve to t_end.
CutoffChoice resolve_cutoff(Context& ctx, double t_end) {
  const json& c = ctx.config;
  if (!config::cutoff_is_auto(c)) return {c["cutoff"]["A"].get<double>(), false, std::nullopt};
  const PdeSolution ref = solve(config::pde_config(c, t_end), initial_field(c));
  if (ref.blowup.blew_up)
    throw ConfigError("cutoff.A", "automatic level needs a global uncut solution but it blew up at t = " +
                                      io::format_double(ref.blowup.t_detected.value_or(0.0)) + "; set cutoff.A");
  const double margin = c["cutoff"]["margin"].get<double>();
  return {(1.0 + margin) * ref.a0_estimate, true, ref.a0_estimate};
}

json cutoff_json(const CutoffChoice& k) {
  return {{"A", k.level},
          {"automatic", k.automatic},
          {"a0_estimate", k.a0_estimate ? json(*k.a0_estimate) : json(nullptr)}};
}

void cmd_simulate(Context& ctx) {
  const json& c = ctx.config;
  const double t_end = c["particles"]["t_end"].get<double>();
  const CutoffChoice cut = resolve_cutoff(ctx, t_end);
  const SimParams params = config::sim_params(c, cut.level);
  const InitialDensity density = config::density(c);
  const std::vector<double> observers = config::particle_observers(c);
  const Trajectory traj = simulate(params, density, observers);

  io::write_trajectory(ctx.data("trajectory.mks"), {traj.n_particles, params.dt, params.seed, traj.snapshots});
  if (c["particles"]["write_csv"].get<bool>()) io::write_trajectory_csv(ctx.data("trajectory.csv"), traj.snapshots);

  const double margin = config::grid(c).half_extent;
  json snaps = json::array();
  for (const auto& s : traj.snapshots) {
    Vec2 mean;
    double second = 0.0, max_r = 0.0;
    std::int64_t outside = 0;
    for (const Vec2& x : s.positions) {
      mean += x;
      second += x.norm2();
      max_r = std::max(max_r, x.norm());
      if (std::fabs(x.x) > margin || std::fabs(x.y) > margin) ++outside;
    }
    const double n = static_cast<double>(s.positions.size());
    snaps.push_back({{"t", s.t},
                     {"mean", {mean.x / n, mean.y / n}},
                     {"second_moment", second / n},
                     {"max_radius", max_r},
                     {"outside_grid", outside}});
  }
  double max_drift = 0.0;
  for (const auto& s : traj.steps) max_drift = std::max(max_drift, s.max_abs_drift);

  ctx.summary = {{"command", "simulate"},
                 {"n_particles", traj.n_particles},
                 {"seed", params.seed},
                 {"mass", params.mass},
                 {"mollifier_epsilon", params.mollifier.epsilon()},
                 {"cutoff", cutoff_json(cut)},
                 {"steps", traj.steps.size()},
                 {"gap_dt", traj.gap_dt},
                 {"max_abs_drift", max_drift},
                 {"snapshots", snaps},
                 {"trajectory_sha256", io::sha256_file(ctx.data("trajectory.mks"))}};
  ctx.diagnostics["dt_adjustments"] = traj.dt_adjustments;
  for (const auto& a : traj.dt_adjustments) ctx.warnings.push_back(a);
}

void cmd_solve_pde(Context& ctx) {
  const json& c = ctx.config;
  PdeConfig pc = config::pde_config(c);
  std::optional<CutoffChoice> cut;
  if (c["pde"]["use_cutoff"].get<bool>()) {
    cut = resolve_cutoff(ctx, pc.t_end);
    pc.cutoff = CutoffParams{cut->level};
  }
  const PdeSolution sol = solve(pc, initial_field(c));
  if (cut && cut->level < sol.a0_estimate)
    ctx.warnings.push_back("cutoff.A = " + io::format_double(cut->level) + " is below the A0 estimate " +
                           io::format_double(sol.a0_estimate) +
                           "; the premise A >= A0 fails and the cutoff solution need not solve the original equation");
  for (const auto& w : sol.diagnostics.warnings) ctx.warnings.push_back(w);
  if (sol.blowup.blew_up)
    ctx.warnings.push_back("blow-up detected at t = " + io::format_double(sol.blowup.t_detected.value_or(0.0)) + " (" +
                           to_string(sol.blowup.trigger) + ")");

  json snaps = json::array();
  for (std::size_t i = 0; i < sol.snapshots.size(); ++i) {
    const PdeState& s = sol.snapshots[i];
    char name[32];
    std::snprintf(name, sizeof name, "rho_%03zu", i);
    io::write_field(ctx.data(std::string(name) + ".mkf"), s.rho);
    if (c["pde"]["write_csv"].get<bool>()) io::write_field_csv(ctx.data(std::string(name) + ".csv"), s.rho);
    snaps.push_back({{"t", s.t},
                     {"file", std::string("data/") + name + ".mkf"},
                     {"mass", s.rho.integral()},
                     {"peak", s.rho.max()},
                     {"min", s.rho.min()},
                     {"sha256", io::sha256_file(ctx.data(std::string(name) + ".mkf"))}});
  }
  std::string history = "t,linf\n";
  for (const auto& [t, v] : sol.blowup.peak_linf_history)
    history += io::format_double(t) + "," + io::format_double(v) + "\n";
  io::write_text(ctx.report("peak_history.csv"), history);

  ctx.summary = {{"command", "solve-pde"},
                 {"blowup", blowup_json(sol.blowup)},
                 {"a0_estimate", sol.a0_estimate},
                 {"cutoff", cut ? cutoff_json(*cut) : json(nullptr)},
                 {"diagnostics", pde_diagnostics_json(sol.diagnostics)},
                 {"snapshots", snaps}};
  ctx.diagnostics["boundary_mass"] = {{"initial", sol.diagnostics.boundary_mass_initial},
                                      {"final", sol.diagnostics.boundary_mass_final}};
}

void cmd_estimate_a0(Context& ctx) {
  const json& c = ctx.config;
  const PdeConfig pc = config::pde_config(c);
  const PdeSolution sol = solve(pc, initial_field(c));
  const double margin = c["cutoff"]["margin"].get<double>();
  for (const auto& w : sol.diagnostics.warnings) ctx.warnings.push_back(w);
  if (sol.blowup.blew_up)
    ctx.warnings.push_back("the uncut solution blew up at t = " +
                           io::format_double(sol.blowup.t_detected.value_or(0.0)) +
                           "; sup ||grad c|| is unbounded and the estimate covers only the computed interval");
  std::string history = "t,linf\n";
  for (const auto& [t, v] : sol.blowup.peak_linf_history)
    history += io::format_double(t) + "," + io::format_double(v) + "\n";
  io::write_text(ctx.report("peak_history.csv"), history);
  ctx.summary = {{"command", "estimate-a0"},
                 {"t_end", pc.t_end},
                 {"a0_estimate", sol.a0_estimate},
                 {"margin", margin},
                 {"recommended_A", (1.0 + margin) * sol.a0_estimate},
                 {"blowup", blowup_json(sol.blowup)},
                 {"diagnostics", pde_diagnostics_json(sol.diagnostics)}};
  ctx.diagnostics["boundary_mass"] = {{"initial", sol.diagnostics.boundary_mass_initial},
                                      {"final", sol.diagnostics.boundary_mass_final}};
}

json stats_json(const SampleStats& s) { return {{"mean", s.mean}, {"stderr", s.stderr_}, {"count", s.count}}; }

void cmd_converge(Context& ctx) {
  const json& c = ctx.config;
  if (c["density"]["mass"].get<double>() >= 8.0 * std::numbers::pi)
    throw ConfigError("density.mass", "convergence study needs a subcritical mass < 8 pi");
  const ConvergenceConfig k = config::convergence_config(c);
  const ConvergenceReport r = convergence_study(k);
  for (const auto& w : r.warnings) ctx.warnings.push_back(w);

  std::string csv = "N,metric,mean,stderr\n";
  auto row = [&csv](std::int64_t n, const std::string& metric, const SampleStats& s) {
    csv += std::to_string(n) + "," + metric + "," + io::format_double(s.mean) + "," + io::format_double(s.stderr_) +
           "\n";
  };
  json rungs = json::array();
  std::vector<SampleStats> local, weak;
  const MomentGrowthCheck mg = moment_growth_check(r);
  for (std::size_t i = 0; i < r.rungs.size(); ++i) {
    const RungStats& g = r.rungs[i];
    row(g.n, "local_error", g.local_error);
    row(g.n, "weak_error", g.weak_error);
    row(g.n, "moment_max", g.moment_max);
    row(g.n, "moment_ratio", mg.ratios[i]);
    row(g.n, "initial_moment", g.initial_moment);
    row(g.n, "initial_weak_error", g.initial_weak_error);
    json per = json::object();
    for (std::size_t i = 0; i < g.weak_per_function.size(); ++i) {
      row(g.n, "weak_error." + r.battery[i], g.weak_per_function[i]);
      per[r.battery[i]] = stats_json(g.weak_per_function[i]);
    }
    local.push_back(g.local_error);
    weak.push_back(g.weak_error);
    rungs.push_back({{"n", g.n},
                     {"replicas", g.replicas},
                     {"local_error", stats_json(g.local_error)},
                     {"weak_error", stats_json(g.weak_error)},
                     {"weak_per_function", per},
                     {"moment_max", stats_json(g.moment_max)},
                     {"moment_reference", g.moment_reference},
                     {"moment_ratio", stats_json(mg.ratios[i])},
                     {"initial_moment", stats_json(g.initial_moment)},
                     {"initial_weak_error", stats_json(g.initial_weak_error)},
                     {"truncated_snapshots", g.truncated_snapshots}});
  }
  const json checks = {{"local_error_decreasing", decreases_within_stderr(local, 1.0)},
                       {"weak_error_decreasing", decreases_within_stderr(weak, 1.0)},
                       {"moment_raw_no_systematic_growth", mg.raw_no_growth},
                       {"moment_ratio_no_systematic_growth", mg.ratio_no_growth},
                       {"moment_bounded_by_limit", mg.bounded}};
  const json report = {{"observer_times", r.observer_times},
                       {"battery", r.battery},
                       {"a0_estimate", r.a0_estimate},
                       {"cutoff_level", r.cutoff_level},
                       {"limit_moment_max", r.limit_moment_max},
                       {"mckean_oracle", r.mckean_oracle},
                       {"rungs", rungs},
                       {"checks", checks}};
  io::write_text(ctx.report("convergence.json"), report.dump(2) + "\n");
  io::write_text(ctx.report("convergence.csv"), csv);
  ctx.summary = {{"command", "converge"},
                 {"a0_estimate", r.a0_estimate},
                 {"cutoff_level", r.cutoff_level},
                 {"rungs", rungs},
                 {"checks", checks}};
}

void cmd_verify(Context& ctx) {
  const json& c = ctx.config;
  verify::Options o;
  for (const auto& id : c["verify"]["only"]) o.only.push_back(static_cast<int>(id.get<std::int64_t>()));
  o.kernel_scale = c["kernel"]["kernel_scale"].get<double>();
  o.seed = config::seed(c);
  o.scratch = ctx.dir / "data" / "determinism";
  o.on_result = [&ctx](const verify::Criterion& r) {
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d %-32s %s (%.1f s)", r.id, r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.seconds);
    ctx.log(std::string(head) + ": " + r.detail);
  };
  const verify::Report rep = verify::run_suite(o);

  std::vector<io::JUnitCase> cases;
  std::string text;
  json crits = json::array();
  for (const auto& r : rep.criteria) {
    cases.push_back({std::to_string(r.id) + "_" + r.name, "mks.verify", r.passed, r.seconds, r.detail});
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d %-32s %s (%.1f s)", r.id, r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.seconds);
    text += std::string(head) + ": " + r.detail + "\n";
    crits.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"metrics", r.metrics}});
  }
  io::write_text(ctx.report("verify.xml"), io::junit_xml("mks.verify", cases));
  io::write_text(ctx.report("verify.txt"), text);
  ctx.passed = rep.passed();
  ctx.summary = {{"command", "verify"}, {"passed", ctx.passed}, {"criteria", crits}};
}

json list_outputs(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const char* sub : {"data", "report"})
    for (const auto& e : fs::recursive_directory_iterator(dir / sub))
      if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  json out = json::array();
  for (const auto& f : files)
    out.push_back({{"path", fs::relative(f, dir).generic_string()},
                   {"bytes", fs::file_size(f)},
                   {"sha256", io::sha256_file(f)}});
  return out;
}

void prepare_dir(const fs::path& dir) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir) || (!fs::is_empty(dir) && !fs::exists(dir / "manifest.json") &&
                                   !fs::exists(dir / "config.canonical")))
      throw RuntimeFailure("refusing to overwrite " + dir.string() + ": not a run directory");
    fs::remove_all(dir);
  }
  fs::create_directories(dir / "data");
  fs::create_directories(dir / "report");
}

class ThreadScope {
 public:
  explicit ThreadScope(int threads) : saved_(omp_get_max_threads()) {
    if (threads > 0) omp_set_num_threads(threads);
  }
  ~ThreadScope() { omp_set_num_threads(saved_); }

 private:
  int saved_;
};

}  // namespace

const char* artifact_version() { return MKS_VERSION; }

fs::path default_out_root() {
  const char* env = std::getenv("MKS_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path("runs");
}

Result run_command(const std::string& command, const json& user_config, const Options& options) {
  using Handler = void (*)(Context&);
  Handler handler = nullptr;
  if (command == "simulate") handler = cmd_simulate;
  else if (command == "solve-pde") handler = cmd_solve_pde;
  else if (command == "estimate-a0") handler = cmd_estimate_a0;
  else if (command == "converge") handler = cmd_converge;
  else if (command == "verify") handler = cmd_verify;
  else throw ConfigError("", "unknown command \"" + command + "\"");

  json user = user_config.is_null() ? json::object() : user_config;
  if (!user.is_object()) throw ConfigError("", "top level must be a mapping");
  if (options.seed) user["seed"] = *options.seed;
  const json canonical = config::canonicalize(user);
  const std::string digest = config::digest(canonical);

  const ThreadScope scope(options.threads);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();

  const fs::path dir = options.out_root / (command + "-" + digest.substr(0, 12));
  prepare_dir(dir);
  io::write_text(dir / "config.canonical", config::canonical_text(canonical));

  Context ctx{canonical, dir, options, json::object(), json::object(), {}, true};
  ctx.warnings = config::warnings(canonical);
  ctx.diagnostics["initial_boundary_mass"] = config::initial_boundary_mass(canonical);
  for (const auto& w : ctx.warnings) ctx.log("warning: " + w);
  const std::size_t config_warnings = ctx.warnings.size();
  handler(ctx);
  for (std::size_t i = config_warnings; i < ctx.warnings.size(); ++i) ctx.log("warning: " + ctx.warnings[i]);

  ctx.summary["config_digest"] = digest;
  ctx.summary["artifact_version"] = artifact_version();
  const std::string summary_text = ctx.summary.dump(2) + "\n";
  io::write_text(dir / "report" / "summary.json", summary_text);
  const std::string summary_digest = io::sha256_hex(summary_text);

  ctx.diagnostics["warnings"] = ctx.warnings;
  const json manifest = {
      {"artifact_version", artifact_version()},
      {"command", command},
      {"config_digest", digest},
      {"config_file", "config.canonical"},
      {"seed", config::seed(canonical)},
      {"started_utc", started},
      {"finished_utc", utc_now()},
      {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
      {"threads", omp_get_max_threads()},
      {"summary_digest", summary_digest},
      {"outputs", list_outputs(dir)},
      {"diagnostics", ctx.diagnostics},
  };
  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  return {dir, digest, summary_digest, ctx.passed, ctx.warnings, ctx.summary};
}

}  // namespace mks::run
