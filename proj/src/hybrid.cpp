#include "offo/hybrid.hpp"

namespace offo {

double cost_mldd(std::uint64_t fine_count, std::uint64_t coarse_count, std::size_t n,
                 std::size_t n_coarse, const std::vector<std::size_t>& subdomain_sizes,
                 const std::vector<std::uint64_t>& subdomain_counts, bool* unequal) {
  return cost_dd(fine_count, n, subdomain_sizes, subdomain_counts, unequal) +
         static_cast<double>(n_coarse) / static_cast<double>(n) * static_cast<double>(coarse_count);
}

HybridSolver::HybridSolver(const GradientOracle& fine, BoundBox box, const GradientOracle& coarse,
                           TransferPair pair, Covering covering, HybridOptions options,
                           Observer* observer)
    : fine_(fine),
      box_(box),
      coarse_(coarse),
      pair_(std::move(pair)),
      options_(std::move(options)),
      observer_(observer),
      dd_(fine, std::move(box), std::move(covering), options_.dd, observer) {
  require_same_size(pair_.fine_size(), fine.dimension(), "HybridSolver");
  require_same_size(pair_.coarse_size(), coarse.dimension(), "HybridSolver");
  if (options_.coarse_iterations < 0) throw ContractError("HybridSolver: negative coarse budget");
}

SolveResult HybridSolver::run(Vector x0, const CycleCallback& on_cycle) {
  SolverScope scope;
  const Parameters& params = options_.dd.params;
  const std::size_t n = fine_.dimension();
  const std::size_t nc = coarse_.dimension();
  const std::uint64_t fine_base = fine_.evaluations();
  const std::uint64_t coarse_base = coarse_.evaluations();
  const std::uint64_t reassigned_base = dd_.reassigned_fine_gradients();
  const std::vector<std::uint64_t> sub_base = dd_.subdomain_counts();
  const std::vector<std::size_t> sub_sizes = dd_.subdomain_sizes();

  SolveResult result;
  result.sizes = {n, nc};
  result.sizes.insert(result.sizes.end(), sub_sizes.begin(), sub_sizes.end());

  LevelRun run(fine_, box_, params, 1, observer_);
  run.start(std::move(x0), Vector(n, params.varsigma * params.varsigma), ThetaContract::top(), true);
  const double d0 = norm(run.d());
  result.event_e = d0 * d0 >= params.varsigma;
  result.xi0 = exact_criticality(fine_, run.x(), box_);

  auto record = [&](std::size_t cycle, double dn, double xi) {
    CycleRecord rec;
    rec.cycle = cycle;
    rec.d_norm = dn;
    rec.xi_norm = xi;
    std::vector<std::uint64_t> sub = dd_.subdomain_counts();
    for (std::size_t p = 0; p < sub.size(); ++p) sub[p] -= sub_base[p];
    const std::uint64_t fc =
        fine_.evaluations() - fine_base - (dd_.reassigned_fine_gradients() - reassigned_base);
    const std::uint64_t cc = coarse_.evaluations() - coarse_base;
    bool unequal = false;
    rec.cost = cost_mldd(fc, cc, n, nc, sub_sizes, sub, &unequal);
    if (unequal) ++result.unequal_subdomain_counts;
    rec.evaluations = {fc, cc};
    rec.evaluations.insert(rec.evaluations.end(), sub.begin(), sub.end());
    result.history.push_back(rec);
    if (on_cycle) on_cycle(rec, run.x());
  };
  record(0, d0, result.xi0);

  const StopRule& stop = options_.dd.stop;
  auto converged = [&](double xi) {
    if (xi < stop.absolute) {
      result.stop_reason = "absolute";
      return true;
    }
    if (result.xi0 > 0.0 && xi / result.xi0 < stop.relative) {
      result.stop_reason = "relative";
      return true;
    }
    return false;
  };
  result.converged = converged(result.xi0);

  const CoarseSpace coarse{&pair_, &coarse_, 0};
  const int budget = options_.coarse_iterations;
  const auto descend = [&](LevelRun& r) {
    return recursive_step(r, coarse, options_.model, options_.truncation, observer_,
                          [budget](LevelRun& c) {
                            for (int i = 0; i < budget; ++i) {
                              if (!c.iterate(IterationType::taylor)) break;
                            }
                          });
  };
  const auto decompose = [this](LevelRun& r) { return dd_.decomposition_step(r); };
  auto coarse_block = [&] {
    if (budget == 0) {
      run.iterate(IterationType::taylor);
    } else {
      run.iterate(IterationType::recursive, descend);
    }
  };
  auto dd_block = [&] {
    for (int i = 0; i < options_.dd.decomposition_iterations; ++i) {
      run.iterate(IterationType::recursive, decompose);
    }
  };
  for (std::size_t cycle = 1; !result.converged && cycle <= stop.max_cycles; ++cycle) {
    if (options_.coarse_first) {
      coarse_block();
      dd_block();
    } else {
      dd_block();
      coarse_block();
    }
    const double xi = exact_criticality(fine_, run.x(), box_);
    record(cycle, norm(run.d()), xi);
    result.converged = converged(xi);
  }
  if (!result.converged) result.stop_reason = "budget";
  result.x = run.x();
  result.cost = result.history.back().cost;
  result.nonfinite_curvatures = run.nonfinite_curvatures();
  result.fallbacks = run.fallbacks();
  return result;
}

}  // namespace offo
