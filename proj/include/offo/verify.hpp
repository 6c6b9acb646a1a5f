#pragma once

// Invariant checks and the trend experiments used by the acceptance run.
// Each check returns a verdict and a one-line detail string.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "offo/config.hpp"
#include "offo/multilevel.hpp"
#include "offo/schwarz.hpp"

namespace offo {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Watches every iterate of every level: raw (pre-clamp) bound violations,
// feasibility of the accepted iterate and the entry radius bound.
class FeasibilityMonitor : public Observer {
 public:
  void on_iterate(const IterateEvent& e) override;
  void on_entry(const EntryEvent& e) override;

  std::size_t iterates() const { return iterates_; }
  std::size_t entries() const { return entries_; }
  double max_raw_violation() const { return max_raw_; }
  std::size_t infeasible_iterates() const { return infeasible_; }
  std::size_t radius_violations() const { return radius_; }
  std::map<int, std::size_t> iterates_per_level() const { return per_level_; }

 private:
  std::size_t iterates_ = 0;
  std::size_t entries_ = 0;
  double max_raw_ = 0.0;
  std::size_t infeasible_ = 0;
  std::size_t radius_ = 0;
  std::map<int, std::size_t> per_level_;
};

struct CoincidenceStats {
  std::size_t comparisons = 0;
  std::size_t mismatches = 0;  // not bitwise equal
  double max_relative_error = 0.0;
};

// Compares restrict_bounds(R_p, box) with the lower level bounds built from
// (P_p, sigma) at x0 = R_p x, on the components coupled through both P_p
// and R_p.
CoincidenceStats bound_coincidence(const Covering& covering, SchwarzVariant variant,
                                   const BoundBox& box, ConstSpan x);

// Random covering of n variables: a random restriction partition into M
// blocks, each block extended by random extra indices.
Covering random_covering(std::size_t n, int M, std::uint64_t seed);

// Applies CLI-style overrides on top of the defaults.
ExperimentConfig make_config(const std::map<std::string, std::string>& overrides);

CheckResult check_oracle_equivalence(int instances, std::uint64_t seed);
CheckResult check_feasibility(int runs_per_benchmark, int cells, std::size_t max_cycles,
                              std::uint64_t seed);
CheckResult check_bound_coincidence(int trials, std::uint64_t seed);
CheckResult check_kernel_equivalence(std::uint64_t seed);
CheckResult check_trace_roundtrip();
CheckResult check_objective_guard();

CheckResult check_ml_speedup();
CheckResult check_dd_trend();
CheckResult check_hybrid_trend();
CheckResult check_noise_stall_and_recover(int seeds);
CheckResult check_truncation();
CheckResult check_decay_slope();

// Least-squares slope of log(running min d^2) against log(fine gradient
// count) over the last decade of counts.
double decay_slope(const std::vector<double>& fine_counts, const std::vector<double>& d_norms);

// Fast invariants for `verify`; `quick` shrinks the randomized suites.
std::vector<CheckResult> run_invariant_suite(bool quick);

}  // namespace offo
