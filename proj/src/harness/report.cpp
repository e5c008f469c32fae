#include <json.hpp>

#include <cstdio>
#include <sstream>

#include "pathid/harness.hpp"

namespace pathid {

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string summary_line(const CheckResult& r) {
  return std::string(r.passed ? "PASS" : "FAIL") + "  criterion " + std::to_string(r.number) + ": " +
         r.title + "  (" + fixed2(r.seconds) + " s, budget " + fixed2(r.budget_seconds) + " s)";
}

std::string markdown_report(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  out << "# Reproduction report\n\n";
  out << "| # | Check | Result | Time (s) | Budget (s) |\n";
  out << "|---|-------|--------|----------|------------|\n";
  for (const auto& r : results) {
    out << "| " << r.number << " | " << r.title << " | " << (r.passed ? "pass" : "FAIL") << " | "
        << fixed2(r.seconds) << " | " << fixed2(r.budget_seconds) << " |\n";
  }
  for (const auto& r : results) {
    out << "\n## " << r.number << ". " << r.title << "\n\n";
    for (const auto& d : r.details) out << "- " << d << '\n';
  }
  return out.str();
}

std::string json_report(const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    checks.push_back({{"number", r.number},
                      {"title", r.title},
                      {"passed", r.passed},
                      {"seconds", r.seconds},
                      {"budget_seconds", r.budget_seconds},
                      {"details", r.details}});
    all = all && r.passed;
  }
  nlohmann::json doc{{"passed", all}, {"checks", checks}};
  return doc.dump(2) + "\n";
}

}  // namespace pathid
