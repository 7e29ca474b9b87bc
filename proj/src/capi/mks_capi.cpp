#include "mks/mks.h"

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <system_error>
#include <vector>

#include "mks/config.hpp"
#include "mks/errors.hpp"
#include "mks/io.hpp"
#include "mks/kernel.hpp"
#include "mks/run.hpp"
#include "mks/verify.hpp"

struct mks_config {
  nlohmann::json user;
  nlohmann::json canonical;
  std::string text;
  std::string digest;
  std::vector<std::string> warnings;
};

struct mks_run {
  std::string dir;
  std::string config_digest;
  std::string summary_digest;
  std::string summary;
  bool passed = true;
  std::vector<std::string> warnings;
};

struct mks_field {
  mks::Field field;
};

struct mks_verify_report {
  mks::verify::Report report;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_path;

mks_status fail(mks_status status, const std::string& message, const std::string& path = "") {
  g_error = message;
  g_error_path = path;
  return status;
}

/// Runs f, mapping exceptions to status codes.
template <class F>
mks_status guarded(F&& f, mks_status runtime_status = MKS_ERR_RUNTIME) {
  try {
    f();
    return MKS_OK;
  } catch (const mks::ConfigError& e) {
    return fail(MKS_ERR_CONFIG, e.what(), e.path());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(MKS_ERR_IO, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(MKS_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(runtime_status, e.what());
  } catch (...) {
    return fail(MKS_ERR_RUNTIME, "unknown error");
  }
}

void canonicalize(mks_config& c) {
  c.canonical = mks::config::canonicalize(c.user);
  c.text = mks::config::canonical_text(c.canonical);
  c.digest = mks::config::digest(c.canonical);
  c.warnings = mks::config::warnings(c.canonical);
}

void make_config(nlohmann::json user, mks_config** out) {
  auto c = std::make_unique<mks_config>();
  c->user = std::move(user);
  canonicalize(*c);
  *out = c.release();
}

}  // namespace

extern "C" {

const char* mks_version(void) { return mks::run::artifact_version(); }

const char* mks_status_string(mks_status status) {
  switch (status) {
    case MKS_OK: return "ok";
    case MKS_ERR_CONFIG: return "config error";
    case MKS_ERR_RUNTIME: return "runtime error";
    case MKS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MKS_ERR_IO: return "i/o error";
  }
  return "unknown status";
}

const char* mks_last_error(void) { return g_error.c_str(); }
const char* mks_last_error_path(void) { return g_error_path.c_str(); }

mks_status mks_config_parse(const char* text, mks_config** out) {
  if (!text || !out) return fail(MKS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { make_config(mks::config::parse_text(text), out); }, MKS_ERR_CONFIG);
}

mks_status mks_config_load_file(const char* path, mks_config** out) {
  if (!path || !out) return fail(MKS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { make_config(mks::config::load_file(path), out); }, MKS_ERR_CONFIG);
}

mks_status mks_config_set_seed(mks_config* config, uint64_t seed) {
  if (!config) return fail(MKS_ERR_INVALID_ARGUMENT, "null config");
  return guarded(
      [&] {
        mks_config next = *config;
        next.user["seed"] = seed;
        canonicalize(next);
        *config = std::move(next);
      },
      MKS_ERR_CONFIG);
}

mks_status mks_config_set(mks_config* config, const char* path, const char* value) {
  if (!config || !path || !value) return fail(MKS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded(
      [&] {
        mks_config next = *config;
        std::string pointer = "/" + std::string(path);
        for (char& ch : pointer)
          if (ch == '.') ch = '/';
        const nlohmann::json parsed = mks::config::parse_text(std::string("v: ") + value);
        next.user[nlohmann::json::json_pointer(pointer)] = parsed.at("v");
        canonicalize(next);
        *config = std::move(next);
      },
      MKS_ERR_CONFIG);
}

const char* mks_config_canonical(const mks_config* config) { return config ? config->text.c_str() : ""; }
const char* mks_config_digest(const mks_config* config) { return config ? config->digest.c_str() : ""; }
size_t mks_config_warning_count(const mks_config* config) { return config ? config->warnings.size() : 0; }
const char* mks_config_warning(const mks_config* config, size_t index) {
  return config && index < config->warnings.size() ? config->warnings[index].c_str() : "";
}
void mks_config_free(mks_config* config) { delete config; }

void mks_run_options_init(mks_run_options* options) {
  if (options) *options = mks_run_options{nullptr, 0, 0, 0, nullptr, nullptr};
}

mks_status mks_run_execute(const char* command, const mks_config* config, const mks_run_options* options,
                           mks_run** out) {
  if (!command || !config || !out) return fail(MKS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  mks_run_options defaults;
  mks_run_options_init(&defaults);
  const mks_run_options& o = options ? *options : defaults;
  if (o.threads < 0) return fail(MKS_ERR_INVALID_ARGUMENT, "threads must be >= 0");
  return guarded([&] {
    mks::run::Options ro;
    ro.out_root = o.out_root ? std::filesystem::path(o.out_root) : mks::run::default_out_root();
    ro.threads = o.threads;
    if (o.has_seed) ro.seed = o.seed;
    if (o.log) ro.log = [fn = o.log, user = o.log_user](const std::string& line) { fn(line.c_str(), user); };
    const mks::run::Result r = mks::run::run_command(command, config->user, ro);
    auto handle = std::make_unique<mks_run>();
    handle->dir = r.dir.string();
    handle->config_digest = r.config_digest;
    handle->summary_digest = r.summary_digest;
    handle->summary = r.summary.dump(2);
    handle->passed = r.passed;
    handle->warnings = r.warnings;
    *out = handle.release();
  });
}

const char* mks_run_dir(const mks_run* run) { return run ? run->dir.c_str() : ""; }
const char* mks_run_config_digest(const mks_run* run) { return run ? run->config_digest.c_str() : ""; }
const char* mks_run_summary_digest(const mks_run* run) { return run ? run->summary_digest.c_str() : ""; }
const char* mks_run_summary_json(const mks_run* run) { return run ? run->summary.c_str() : ""; }
int mks_run_passed(const mks_run* run) { return run && run->passed ? 1 : 0; }
size_t mks_run_warning_count(const mks_run* run) { return run ? run->warnings.size() : 0; }
const char* mks_run_warning(const mks_run* run, size_t index) {
  return run && index < run->warnings.size() ? run->warnings[index].c_str() : "";
}
void mks_run_free(mks_run* run) { delete run; }

mks_status mks_field_read(const char* path, mks_field** out) {
  if (!path || !out) return fail(MKS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new mks_field{mks::io::read_field(path)}; }, MKS_ERR_IO);
}
int mks_field_n(const mks_field* field) { return field ? field->field.grid.n : 0; }
double mks_field_half_extent(const mks_field* field) { return field ? field->field.grid.half_extent : 0.0; }
const double* mks_field_values(const mks_field* field) { return field ? field->field.values.data() : nullptr; }
void mks_field_free(mks_field* field) { delete field; }

void mks_verify_options_init(mks_verify_options* options) {
  if (options) *options = mks_verify_options{nullptr, 0, 1.0, 0, nullptr, nullptr, nullptr};
}

mks_status mks_verify_run(const mks_verify_options* options, mks_verify_report** out) {
  if (!out) return fail(MKS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  mks_verify_options defaults;
  mks_verify_options_init(&defaults);
  const mks_verify_options& o = options ? *options : defaults;
  if (o.only_count > 0 && !o.only) return fail(MKS_ERR_INVALID_ARGUMENT, "only is null");
  for (size_t i = 0; i < o.only_count; ++i)
    if (o.only[i] < 1 || o.only[i] > mks::verify::kCriteria)
      return fail(MKS_ERR_INVALID_ARGUMENT, "criterion ids run from 1 to 12");
  return guarded([&] {
    mks::verify::Options vo;
    vo.only.assign(o.only, o.only + o.only_count);
    vo.kernel_scale = o.kernel_scale;
    vo.seed = o.seed;
    if (o.scratch_dir) vo.scratch = o.scratch_dir;
    if (o.log)
      vo.on_result = [fn = o.log, user = o.log_user](const mks::verify::Criterion& c) {
        char head[96];
        std::snprintf(head, sizeof head, "criterion %2d %-32s %s (%.1f s)", c.id, c.name.c_str(),
                      c.passed ? "PASS" : "FAIL", c.seconds);
        fn((std::string(head) + ": " + c.detail).c_str(), user);
      };
    *out = new mks_verify_report{mks::verify::run_suite(vo)};
  });
}

size_t mks_verify_count(const mks_verify_report* report) { return report ? report->report.criteria.size() : 0; }
int mks_verify_id(const mks_verify_report* report, size_t index) {
  return report && index < report->report.criteria.size() ? report->report.criteria[index].id : 0;
}
const char* mks_verify_name(const mks_verify_report* report, size_t index) {
  return report && index < report->report.criteria.size() ? report->report.criteria[index].name.c_str() : "";
}
int mks_verify_passed(const mks_verify_report* report, size_t index) {
  return report && index < report->report.criteria.size() && report->report.criteria[index].passed ? 1 : 0;
}
double mks_verify_seconds(const mks_verify_report* report, size_t index) {
  return report && index < report->report.criteria.size() ? report->report.criteria[index].seconds : 0.0;
}
const char* mks_verify_detail(const mks_verify_report* report, size_t index) {
  return report && index < report->report.criteria.size() ? report->report.criteria[index].detail.c_str() : "";
}
int mks_verify_all_passed(const mks_verify_report* report) { return report && report->report.passed() ? 1 : 0; }
void mks_verify_free(mks_verify_report* report) { delete report; }

mks_status mks_grad_green(double x, double y, double kernel_scale, double out[2]) {
  if (!out) return fail(MKS_ERR_INVALID_ARGUMENT, "null output");
  return guarded(
      [&] {
        const mks::Vec2 g = mks::grad_green({x, y}, kernel_scale);
        out[0] = g.x;
        out[1] = g.y;
      },
      MKS_ERR_INVALID_ARGUMENT);
}

mks_status mks_cutoff(double vx, double vy, double level, double out[2]) {
  if (!out) return fail(MKS_ERR_INVALID_ARGUMENT, "null output");
  return guarded(
      [&] {
        const mks::CutoffParams p{level};
        p.validate();
        const mks::Vec2 v = mks::cutoff({vx, vy}, p);
        out[0] = v.x;
        out[1] = v.y;
      },
      MKS_ERR_INVALID_ARGUMENT);
}

mks_status mks_mollified_grad_green(double x, double y, double alpha, int64_t n_particles, mks_profile profile,
                                    double width, double kernel_scale, double out[2]) {
  if (!out) return fail(MKS_ERR_INVALID_ARGUMENT, "null output");
  return guarded(
      [&] {
        mks::MollifierSpec spec;
        spec.alpha = alpha;
        spec.n_particles = n_particles;
        spec.profile = profile == MKS_PROFILE_BUMP ? mks::ProfileKind::bump : mks::ProfileKind::gaussian;
        spec.width = width;
        const mks::Vec2 k = mks::mollified_grad_green({x, y}, spec, kernel_scale);
        out[0] = k.x;
        out[1] = k.y;
      },
      MKS_ERR_INVALID_ARGUMENT);
}

}  // extern "C"
