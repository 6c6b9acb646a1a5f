#include "offo/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>

#include "offo/hybrid.hpp"
#include "offo/noise.hpp"
#include "offo/problems.hpp"
#include "offo/schwarz.hpp"

#ifndef OFFO_GIT_REVISION
#define OFFO_GIT_REVISION "unknown"
#endif

namespace offo {

std::string git_revision() { return OFFO_GIT_REVISION; }

std::string trace_base_path(const ExperimentConfig& config) {
  const char* root = std::getenv("OFFO_OUTPUT_ROOT");
  const std::filesystem::path dir = root != nullptr && *root != '\0' ? root : "runs";
  const std::string name = config.output.empty()
                               ? config.problem + "-" + to_string(config.solver) + "-" + config.hash()
                               : config.output;
  return (dir / name).string();
}

namespace {

class Harness {
 public:
  explicit Harness(const ExperimentConfig& c) : c_(c), noise_(c.noise_schedule()) {}

  // Noisy view of `f` when noise is configured, otherwise `f` itself.
  const GradientOracle& view(const GradientOracle& f, std::uint64_t stream) {
    if (noise_.kind == NoiseSchedule::Kind::none) return f;
    wrappers_.push_back(wrap_noisy(f, noise_, c_.seed, stream));
    return *wrappers_.back();
  }

 private:
  const ExperimentConfig& c_;
  NoiseSchedule noise_;
  std::vector<std::unique_ptr<GradientOracle>> wrappers_;
};

std::string noise_label(const ExperimentConfig& c) {
  const NoiseSchedule s = c.noise_schedule();
  char buf[96];
  switch (s.kind) {
    case NoiseSchedule::Kind::none:
      return "none";
    case NoiseSchedule::Kind::constant:
      std::snprintf(buf, sizeof buf, "constant(%g)", s.variance);
      return buf;
    case NoiseSchedule::Kind::exponential:
      std::snprintf(buf, sizeof buf, "exponential(%g;%g)", s.variance, s.decay);
      return buf;
  }
  return "none";
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, Observer* observer) {
  config.validate();
  const ExperimentConfig& c = config;
  const ProblemOptions po = c.problem_options();
  const int depth = c.solver == SolverKind::ml     ? c.levels
                    : c.solver == SolverKind::mldd ? c.coarsening + 1
                                                   : 1;
  const Hierarchy h = build_hierarchy(c.problem, c.n, depth, po);
  const GridProblem& fine = h.finest();
  Harness harness(c);
  const GradientOracle& top = harness.view(*fine.objective, 0);

  RunOutcome out;
  TraceMeta& m = out.trace.meta;
  m.config_hash = c.hash();
  m.git_revision = git_revision();
  m.seed = c.seed;
  m.problem = c.problem;
  m.cells = c.n;
  m.dof = fine.size();
  m.solver = to_string(c.solver);
  m.levels = c.solver == SolverKind::ml ? c.levels : c.solver == SolverKind::mldd ? 2 : 1;
  m.noise = noise_label(c);
  if (c.solver == SolverKind::dd || c.solver == SolverKind::mldd) {
    m.subdomains = c.subdomains;
    m.overlap = c.overlap;
    m.variant = to_string(schwarz_variant_from_string(c.variant));
  }
  m.cost_kind = c.solver == SolverKind::dd     ? "C_DD"
                : c.solver == SolverKind::mldd ? "C_ML-DD"
                                               : "C_ML";

  const auto t0 = std::chrono::steady_clock::now();
  const double scale = po.scale;
  auto on_cycle = [&](const CycleRecord& rec, ConstSpan x) {
    TraceRecord r;
    r.cycle = rec.cycle;
    r.d_norm = rec.d_norm;
    r.xi_norm = rec.xi_norm;
    r.cost = rec.cost;
    r.evaluations = rec.evaluations;
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.report_f) {
      ReportingScope reporting;
      r.f = fine.objective->energy(x) / scale;  // unscaled energy
    }
    out.trace.records.push_back(std::move(r));
  };

  switch (c.solver) {
    case SolverKind::adagb2:
    case SolverKind::ml: {
      std::vector<LevelSpec> specs;
      for (std::size_t l = 0; l < h.levels.size(); ++l) {
        const GridProblem& g = h.levels[l];
        const GradientOracle& f =
            l + 1 == h.levels.size() ? top : harness.view(*g.objective, kCoarseStreamBase + l);
        specs.push_back({&f, g.box, g.size()});
      }
      MultilevelOptions o = c.multilevel_options();
      if (c.solver == SolverKind::adagb2) o.schedule = {};
      MultilevelSolver solver(std::move(specs), h.transfers, o, observer);
      out.result = solver.run(fine.initial, on_cycle);
      break;
    }
    case SolverKind::dd: {
      Covering cov = build_block_covering(fine.grid, c.subdomains, c.overlap);
      DomainDecompositionSolver solver(top, fine.box, std::move(cov), c.dd_options(), observer);
      out.result = solver.run(fine.initial, on_cycle);
      break;
    }
    case SolverKind::mldd: {
      TransferPair pair = h.transfers.back();
      for (std::size_t l = h.transfers.size() - 1; l-- > 0;) pair = compose(pair, h.transfers[l]);
      const GridProblem& coarse = h.levels.front();
      const GradientOracle& fc = harness.view(*coarse.objective, kCoarseStreamBase);
      Covering cov = build_block_covering(fine.grid, c.subdomains, c.overlap);
      HybridSolver solver(top, fine.box, fc, std::move(pair), std::move(cov), c.hybrid_options(),
                          observer);
      out.result = solver.run(fine.initial, on_cycle);
      break;
    }
  }

  m.sizes = out.result.sizes;
  if (c.solver == SolverKind::ml || c.solver == SolverKind::adagb2) {
    m.levels = static_cast<int>(out.result.sizes.size());
  }
  TraceSummary& s = out.trace.summary;
  s.converged = out.result.converged;
  s.stop_reason = out.result.stop_reason;
  s.cycles = out.result.cycles() - 1;
  s.final_xi = out.result.history.back().xi_norm;
  s.cost = out.result.cost;
  s.fallbacks = out.result.fallbacks;
  s.nonfinite_curvatures = out.result.nonfinite_curvatures;
  s.unequal_subdomain_counts = out.result.unequal_subdomain_counts;
  s.event_e = out.result.event_e;
  out.exit_code = out.result.converged ? kExitConverged : kExitBudget;
  return out;
}

}  // namespace offo
