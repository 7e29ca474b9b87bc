#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "mks/mks.h"

namespace fs = std::filesystem;

TEST_CASE("config handles") {
  mks_config* c = nullptr;
  REQUIRE(mks_config_parse("seed: 3\nparticles:\n  n: 50\n", &c) == MKS_OK);
  const std::string digest = mks_config_digest(c);
  CHECK(digest.size() == 64);
  CHECK(std::string(mks_config_canonical(c)).find("\"seed\": 3") != std::string::npos);
  REQUIRE(mks_config_set_seed(c, 4) == MKS_OK);
  CHECK(std::string(mks_config_digest(c)) != digest);
  CHECK(mks_config_set(c, "mollifier.alpha", "0.4") == MKS_ERR_CONFIG);
  CHECK(std::string(mks_last_error_path()) == "mollifier.alpha");
  CHECK(std::string(mks_config_canonical(c)).find("\"alpha\": 0.15") != std::string::npos);
  REQUIRE(mks_config_set(c, "density.mass", "40") == MKS_OK);
  CHECK(mks_config_warning_count(c) >= 1);
  mks_config_free(c);

  CHECK(mks_config_parse("bogus: 1\n", &c) == MKS_ERR_CONFIG);
  CHECK(c == nullptr);
  CHECK(std::string(mks_last_error_path()) == "bogus");
  CHECK(mks_config_parse(nullptr, &c) == MKS_ERR_INVALID_ARGUMENT);
  CHECK(std::string(mks_status_string(MKS_ERR_IO)) == "i/o error");
  CHECK(std::string(mks_version()).size() > 0);
}

TEST_CASE("kernel entry points") {
  double out[2];
  REQUIRE(mks_grad_green(1.0, 0.0, 1.0, out) == MKS_OK);
  CHECK(out[0] == doctest::Approx(-1.0 / M_PI));
  CHECK(out[1] == 0.0);
  REQUIRE(mks_cutoff(10.0, 0.0, 2.0, out) == MKS_OK);
  CHECK(std::hypot(out[0], out[1]) <= 2.0 * (1 + 1e-12));
  CHECK(mks_cutoff(1.0, 0.0, -1.0, out) == MKS_ERR_INVALID_ARGUMENT);
  REQUIRE(mks_mollified_grad_green(0.0, 0.0, 0.15, 100, MKS_PROFILE_BUMP, 1.0, 1.0, out) == MKS_OK);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("simulate run through the C API") {
  const fs::path root = fs::temp_directory_path() / "mks_capi_runs";
  fs::remove_all(root);
  mks_config* c = nullptr;
  REQUIRE(mks_config_parse("particles:\n  n: 100\n  t_end: 0.05\n  dt: 0.01\ngrid:\n  half_extent: 8\n  n: 64\n"
                           "cutoff:\n  A: 3.0\n",
                           &c) == MKS_OK);
  mks_run_options o;
  mks_run_options_init(&o);
  const std::string root_s = root.string();
  o.out_root = root_s.c_str();
  o.threads = 1;
  o.has_seed = 1;
  o.seed = 11;
  mks_run* r = nullptr;
  REQUIRE(mks_run_execute("simulate", c, &o, &r) == MKS_OK);
  const fs::path dir = mks_run_dir(r);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "config.canonical"));
  CHECK(fs::exists(dir / "data" / "trajectory.mks"));
  CHECK(fs::exists(dir / "report" / "summary.json"));
  CHECK(mks_run_passed(r) == 1);
  const std::string summary = mks_run_summary_digest(r);
  mks_run_free(r);

  REQUIRE(mks_run_execute("simulate", c, &o, &r) == MKS_OK);
  CHECK(std::string(mks_run_summary_digest(r)) == summary);
  mks_run_free(r);

  CHECK(mks_run_execute("bogus", c, &o, &r) != MKS_OK);
  mks_config_free(c);
}

TEST_CASE("verify report through the C API") {
  const int only[] = {1, 3};
  mks_verify_options o;
  mks_verify_options_init(&o);
  o.only = only;
  o.only_count = 2;
  mks_verify_report* r = nullptr;
  REQUIRE(mks_verify_run(&o, &r) == MKS_OK);
  REQUIRE(mks_verify_count(r) == 2);
  CHECK(mks_verify_id(r, 0) == 1);
  CHECK(std::string(mks_verify_name(r, 1)) == "spectral_parseval_monotonicity");
  CHECK(mks_verify_all_passed(r) == 1);
  mks_verify_free(r);

  const int bad[] = {13};
  o.only = bad;
  o.only_count = 1;
  CHECK(mks_verify_run(&o, &r) == MKS_ERR_INVALID_ARGUMENT);
}
