#ifndef MKS_MKS_H
#define MKS_MKS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MKS_API __declspec(dllexport)
#else
#define MKS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mks_status {
  MKS_OK = 0,
  MKS_ERR_CONFIG = 1,           /* configuration rejected; see mks_last_error_path */
  MKS_ERR_RUNTIME = 2,          /* solver, sampler or verification machinery failed */
  MKS_ERR_INVALID_ARGUMENT = 3, /* bad pointer or out-of-domain input */
  MKS_ERR_IO = 4                /* file could not be read or written */
} mks_status;

typedef enum mks_profile { MKS_PROFILE_GAUSSIAN = 0, MKS_PROFILE_BUMP = 1 } mks_profile;

typedef struct mks_config mks_config;
typedef struct mks_run mks_run;
typedef struct mks_field mks_field;
typedef struct mks_verify_report mks_verify_report;

/* Library version string, e.g. "0.3.0". */
MKS_API const char* mks_version(void);
MKS_API const char* mks_status_string(mks_status status);
/* Message and dotted field path of the last failure on the calling thread.
   Valid until the next failing call on that thread; "" when none. */
MKS_API const char* mks_last_error(void);
MKS_API const char* mks_last_error_path(void);

/* Configuration (YAML or JSON text). Parsing validates the document and
   materializes every default. */
MKS_API mks_status mks_config_parse(const char* text, mks_config** out);
MKS_API mks_status mks_config_load_file(const char* path, mks_config** out);
/* Replaces the seed and re-canonicalizes. */
MKS_API mks_status mks_config_set_seed(mks_config* config, uint64_t seed);
/* Sets a dotted key (e.g. "verify.only") to a JSON or YAML value and
   re-canonicalizes; the config is unchanged on failure. */
MKS_API mks_status mks_config_set(mks_config* config, const char* path, const char* value);
/* Canonical text and its SHA-256 (hex); owned by the handle. */
MKS_API const char* mks_config_canonical(const mks_config* config);
MKS_API const char* mks_config_digest(const mks_config* config);
MKS_API size_t mks_config_warning_count(const mks_config* config);
MKS_API const char* mks_config_warning(const mks_config* config, size_t index);
MKS_API void mks_config_free(mks_config* config);

typedef void (*mks_log_fn)(const char* line, void* user);

typedef struct mks_run_options {
  const char* out_root; /* NULL: MKS_OUT_DIR or "runs" */
  int threads;          /* 0: all logical cores */
  int has_seed;
  uint64_t seed; /* overrides the config seed when has_seed != 0 */
  mks_log_fn log;
  void* log_user;
} mks_run_options;

MKS_API void mks_run_options_init(mks_run_options* options);

/* Runs "simulate", "solve-pde", "converge", "estimate-a0" or "verify" and
   writes the run directory. A verify run with failing criteria returns
   MKS_OK; query mks_run_passed. */
MKS_API mks_status mks_run_execute(const char* command, const mks_config* config, const mks_run_options* options,
                                   mks_run** out);
MKS_API const char* mks_run_dir(const mks_run* run);
MKS_API const char* mks_run_config_digest(const mks_run* run);
MKS_API const char* mks_run_summary_digest(const mks_run* run);
MKS_API const char* mks_run_summary_json(const mks_run* run);
MKS_API int mks_run_passed(const mks_run* run);
MKS_API size_t mks_run_warning_count(const mks_run* run);
MKS_API const char* mks_run_warning(const mks_run* run, size_t index);
MKS_API void mks_run_free(mks_run* run);

/* MKF1 field containers. Values are row-major, n * n. */
MKS_API mks_status mks_field_read(const char* path, mks_field** out);
MKS_API int mks_field_n(const mks_field* field);
MKS_API double mks_field_half_extent(const mks_field* field);
MKS_API const double* mks_field_values(const mks_field* field);
MKS_API void mks_field_free(mks_field* field);

/* Property suite. `only` lists criterion ids 1..12 (NULL or 0 count: all). */
typedef struct mks_verify_options {
  const int* only;
  size_t only_count;
  double kernel_scale; /* fixtures expect 1 */
  uint64_t seed;
  const char* scratch_dir; /* NULL: system temp directory */
  mks_log_fn log;          /* one line per finished criterion */
  void* log_user;
} mks_verify_options;

MKS_API void mks_verify_options_init(mks_verify_options* options);
MKS_API mks_status mks_verify_run(const mks_verify_options* options, mks_verify_report** out);
MKS_API size_t mks_verify_count(const mks_verify_report* report);
MKS_API int mks_verify_id(const mks_verify_report* report, size_t index);
MKS_API const char* mks_verify_name(const mks_verify_report* report, size_t index);
MKS_API int mks_verify_passed(const mks_verify_report* report, size_t index);
MKS_API double mks_verify_seconds(const mks_verify_report* report, size_t index);
MKS_API const char* mks_verify_detail(const mks_verify_report* report, size_t index);
MKS_API int mks_verify_all_passed(const mks_verify_report* report);
MKS_API void mks_verify_free(mks_verify_report* report);

/* Kernels. out receives two components. */
MKS_API mks_status mks_grad_green(double x, double y, double kernel_scale, double out[2]);
MKS_API mks_status mks_cutoff(double vx, double vy, double level, double out[2]);
MKS_API mks_status mks_mollified_grad_green(double x, double y, double alpha, int64_t n_particles, mks_profile profile,
                                            double width, double kernel_scale, double out[2]);

#ifdef __cplusplus
}
#endif

#endif
