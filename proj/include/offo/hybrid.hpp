#pragma once

// Two-level scheme combining one coarse correction with a block of
// decomposition iterations per cycle.

#include <cstdint>

#include "offo/multilevel.hpp"
#include "offo/schwarz.hpp"

namespace offo {

struct HybridOptions {
  DDOptions dd;                // params, variant, subdomain budget, noise, stop
  int coarse_iterations = 10;  // Taylor iterations per coarse visit; 0: fine Taylor instead
  bool coarse_first = true;    // order inside a cycle
  CoarseModel model = CoarseModel::tau_corrected;
  bool truncation = false;
};

// C_ML-DD = #_fine + (n_c / n) #_c + (n_max / n) max_p #^(p)
double cost_mldd(std::uint64_t fine_count, std::uint64_t coarse_count, std::size_t n,
                 std::size_t n_coarse, const std::vector<std::size_t>& subdomain_sizes,
                 const std::vector<std::uint64_t>& subdomain_counts, bool* unequal = nullptr);

// evaluations in the history are (fine, coarse, subdomain 0, ...), sizes
// likewise.
class HybridSolver {
 public:
  HybridSolver(const GradientOracle& fine, BoundBox box, const GradientOracle& coarse,
               TransferPair pair, Covering covering, HybridOptions options,
               Observer* observer = nullptr);

  SolveResult run(Vector x0, const CycleCallback& on_cycle = {});

 private:
  const GradientOracle& fine_;
  BoundBox box_;
  const GradientOracle& coarse_;
  TransferPair pair_;
  HybridOptions options_;
  Observer* observer_;
  DomainDecompositionSolver dd_;
};

}  // namespace offo
