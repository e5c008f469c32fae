// Runs every acceptance criterion and prints one line per criterion.
#include <CLI11.hpp>

#include <iostream>

#include "pathid/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  pathid::HarnessConfig config;
  int only = 0;
  app.add_option("--data", config.data_dir, "data directory")->check(CLI::ExistingDirectory);
  app.add_option("--seed", config.seed, "random seed");
  app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, pathid::kCheckCount));
  CLI11_PARSE(app, argc, argv);

  std::vector<pathid::CheckResult> results;
  if (only > 0) {
    results.push_back(pathid::run_check(only, config));
    std::cout << pathid::summary_line(results.back()) << '\n';
  } else {
    results = pathid::run_acceptance(config, &std::cout);
  }
  bool all = true;
  for (const auto& r : results) {
    if (!r.passed) {
      all = false;
      for (const auto& d : r.details) std::cout << "  [" << r.number << "] " << d << '\n';
    }
  }
  std::cout << (all ? "all criteria passed" : "some criteria FAILED") << '\n';
  return all ? 0 : 1;
}
