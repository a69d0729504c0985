// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <cstdio>

#include "CLI11.hpp"
#include "bsopt/validation.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bsopt acceptance suite"};
  bsopt::ValidationOptions opt;
  std::vector<int> only;
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "base seed");
  app.add_option("--only", only, "criterion ids to run")->delimiter(',')->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  opt.only.insert(only.begin(), only.end());
  opt.on_result = [](const bsopt::CriterionResult& r) {
    std::printf("%s\n", bsopt::format_result(r).c_str());
    std::fflush(stdout);
  };
  int failed = 0;
  for (const auto& r : bsopt::run_acceptance(opt)) failed += !r.pass;
  std::printf("%s: %d criterion(s) failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
