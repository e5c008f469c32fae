#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pathid {

struct CheckResult {
  int number = 0;
  std::string title;
  bool passed = false;
  std::vector<std::string> details;
  double seconds = 0;
  double budget_seconds = 0;
  bool within_budget() const { return seconds <= budget_seconds; }
};

struct HarnessConfig {
  std::string data_dir = "data";
  std::uint64_t seed = 20240607;
};

inline constexpr int kCheckCount = 9;

CheckResult run_check(int number, const HarnessConfig& config);

// Runs every check in order, writing one line per check to `progress`.
std::vector<CheckResult> run_acceptance(const HarnessConfig& config, std::ostream* progress = nullptr);

std::string summary_line(const CheckResult& r);
std::string markdown_report(const std::vector<CheckResult>& results);
std::string json_report(const std::vector<CheckResult>& results);

}  // namespace pathid
