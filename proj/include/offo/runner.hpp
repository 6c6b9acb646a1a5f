#pragma once

// Runs one configured experiment and produces its trace.

#include <string>
#include <vector>

#include "offo/config.hpp"
#include "offo/multilevel.hpp"
#include "offo/trace.hpp"

namespace offo {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitBudget = 2;

struct RunOutcome {
  Trace trace;
  SolveResult result;
  int exit_code = kExitConverged;
};

// Noise streams: 0 for the finest level, 1 + p for subdomain p and
// kCoarseStreamBase + l for coarse level l.
inline constexpr std::uint64_t kCoarseStreamBase = 1u << 20;

// Validates the config, builds the problem and solver, runs it and fills the
// trace. Objective values are computed afterwards for reporting only.
RunOutcome run_experiment(const ExperimentConfig& config, Observer* observer = nullptr);

// Directory from OFFO_OUTPUT_ROOT (default "runs") joined with the config's
// output name, or with a name derived from the config hash.
std::string trace_base_path(const ExperimentConfig& config);

std::string git_revision();

}  // namespace offo
