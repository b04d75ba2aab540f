#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "btl/acceptance.hpp"

#ifndef BTL_SCENARIO_DIR
#define BTL_SCENARIO_DIR "scenarios"
#endif

using namespace btl;

namespace {

// The status each row must report for the suite to count as reproduced.
bool expected_pass(int id) {
  for (const auto& d : known_deviations())
    if (d.row == id) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  AcceptanceOptions o;
  const char* env = std::getenv("BTL_SCENARIO_DIR");
  o.scenario_dir = env ? env : BTL_SCENARIO_DIR;
  for (int i = 1; i < argc; ++i) o.only.push_back(std::atoi(argv[i]));

  const auto rows = run_acceptance(o);
  int mismatches = 0;
  for (const auto& r : rows) {
    const bool want = expected_pass(r.id);
    const bool match = r.pass == want;
    mismatches += !match;
    std::printf("%-4s row %2d %-26s %7.2fs  measured: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.measured.c_str());
    std::printf("                 expected: %s\n", r.expected.c_str());
    if (!r.note.empty()) std::printf("                 note: %s\n", r.note.c_str());
    if (!want) {
      for (const auto& d : known_deviations())
        if (d.row == r.id) std::printf("                 known deviation: %s\n", d.reason.c_str());
      std::printf("                 %s\n", match ? "fails as recorded" : "UNEXPECTED PASS: revisit the recorded deviation");
    } else if (!match) {
      std::printf("                 REGRESSION\n");
    }
  }
  int passed = 0;
  for (const auto& r : rows) passed += r.pass;
  std::printf("%d/%zu rows pass; %d rows differ from the recorded statuses\n", passed, rows.size(), mismatches);
  return mismatches == 0 ? 0 : 1;
}
