#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "mks/mks.h"

namespace {

void progress(const char* line, void*) {
  std::fprintf(stderr, "%s\n", line);
  std::fflush(stderr);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  mks_verify_options options;
  mks_verify_options_init(&options);
  options.only = only.empty() ? nullptr : only.data();
  options.only_count = only.size();
  options.log = progress;

  mks_verify_report* report = nullptr;
  if (mks_verify_run(&options, &report) != MKS_OK) {
    std::fprintf(stderr, "error: %s\n", mks_last_error());
    return 3;
  }
  for (std::size_t i = 0; i < mks_verify_count(report); ++i)
    std::printf("criterion %2d %-32s %s  %s\n", mks_verify_id(report, i), mks_verify_name(report, i),
                mks_verify_passed(report, i) ? "PASS" : "FAIL", mks_verify_detail(report, i));
  const bool passed = mks_verify_all_passed(report) != 0;
  std::printf("acceptance: %s\n", passed ? "PASS" : "FAIL");
  mks_verify_free(report);
  return passed ? 0 : 1;
}
