#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "mks/mks.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::vector<int> only;
  bool quiet = false;
};

int report_error(mks_status status) {
  std::fprintf(stderr, "error: %s\n", mks_last_error());
  return status == MKS_ERR_CONFIG ? kExitConfig : kExitRuntime;
}

void print_line(const char* line, void*) {
  std::fprintf(stderr, "%s\n", line);
  std::fflush(stderr);
}

int execute(const std::string& command, const Flags& flags) {
  mks_config* config = nullptr;
  mks_status st = flags.config.empty() ? mks_config_parse("{}", &config)
                                       : mks_config_load_file(flags.config.c_str(), &config);
  if (st != MKS_OK) return report_error(st);
  if (!flags.only.empty()) {
    std::string list = "[";
    for (std::size_t i = 0; i < flags.only.size(); ++i) list += (i ? "," : "") + std::to_string(flags.only[i]);
    list += "]";
    st = mks_config_set(config, "verify.only", list.c_str());
    if (st != MKS_OK) {
      mks_config_free(config);
      return report_error(st);
    }
  }

  mks_run_options options;
  mks_run_options_init(&options);
  if (!flags.out.empty()) options.out_root = flags.out.c_str();
  options.threads = flags.threads;
  if (flags.seed) {
    options.has_seed = 1;
    options.seed = *flags.seed;
  }
  if (!flags.quiet) options.log = print_line;

  mks_run* run = nullptr;
  st = mks_run_execute(command.c_str(), config, &options, &run);
  mks_config_free(config);
  if (st != MKS_OK) return report_error(st);

  std::printf("run_dir: %s\n", mks_run_dir(run));
  std::printf("config_digest: %s\n", mks_run_config_digest(run));
  std::printf("summary_digest: %s\n", mks_run_summary_digest(run));
  const bool passed = mks_run_passed(run) != 0;
  if (command == "verify") std::printf("verify: %s\n", passed ? "PASS" : "FAIL");
  mks_run_free(run);
  return passed ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moderately interacting particles and Keller-Segel PDE laboratory"};
  app.set_version_flag("--version", std::string(mks_version()));
  app.require_subcommand(1);

  Flags flags;
  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"simulate", "Simulate the particle system and write its trajectory"},
      {"solve-pde", "Solve the Keller-Segel PDE pseudo-spectrally"},
      {"converge", "Run the particle-to-PDE convergence ladder"},
      {"estimate-a0", "Estimate sup ||grad c|| along the uncut PDE solution"},
      {"verify", "Run the acceptance property suite"},
  };
  std::string chosen;
  for (const auto& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--config", flags.config, "YAML or JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output root (default: $MKS_OUT_DIR or ./runs)");
    sub->add_option("--seed", flags.seed, "Master seed (overrides the config)");
    sub->add_option("--threads", flags.threads, "Worker threads (default: logical cores)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", flags.quiet, "Suppress progress lines");
    if (std::string(spec.name) == "verify")
      sub->add_option("--only", flags.only, "Criterion ids to run (1-12)")->check(CLI::Range(1, 12))->delimiter(',');
    sub->callback([&chosen, name = spec.name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  return execute(chosen, flags);
}
