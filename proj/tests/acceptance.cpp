// One PASS/FAIL line per acceptance criterion.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "offo/verify.hpp"

#ifndef OFFO_UNIT_TEST_BINARY
#error "OFFO_UNIT_TEST_BINARY must name the unit test executable"
#endif

namespace {

offo::CheckResult unit_suite() {
  offo::CheckResult r;
  r.name = "analytical micro-suite";
  const std::string cmd = std::string("\"") + OFFO_UNIT_TEST_BINARY + "\" --minimal > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const int code = status == -1 ? -1 : WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.passed = code == 0;
  r.detail = "unit test binary exit code " + std::to_string(code);
  return r;
}

}  // namespace

int main() {
  using namespace offo;
  struct Item {
    int id;
    CheckResult (*run)();
  };
  const Item items[] = {
      {1, [] { return check_oracle_equivalence(200, 1); }},
      {2, [] { return check_feasibility(50, 16, 20, 3); }},
      {3, [] { return check_bound_coincidence(1000, 11); }},
      {4, [] { return check_ml_speedup(); }},
      {5, [] { return check_dd_trend(); }},
      {6, [] { return check_hybrid_trend(); }},
      {7, [] { return check_noise_stall_and_recover(10); }},
      {8, [] { return check_truncation(); }},
      {9, [] { return unit_suite(); }},
      {10, [] { return check_decay_slope(); }},
  };
  int failed = 0;
  for (const Item& it : items) {
    const CheckResult r = it.run();
    std::printf("%s criterion %d (%s, %.1fs): %s\n", r.passed ? "PASS" : "FAIL", it.id, r.name.c_str(),
                r.seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
