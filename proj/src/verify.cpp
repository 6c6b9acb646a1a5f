#include "offo/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>

#include "offo/kernels.hpp"
#include "offo/noise.hpp"
#include "offo/problems.hpp"
#include "offo/runner.hpp"
#include "offo/trace.hpp"

namespace offo {

void FeasibilityMonitor::on_iterate(const IterateEvent& e) {
  ++iterates_;
  ++per_level_[e.level];
  max_raw_ = std::max(max_raw_, e.raw_violation);
  if (!e.box.contains(e.x)) ++infeasible_;
}

void FeasibilityMonitor::on_entry(const EntryEvent& e) {
  ++entries_;
  if (!e.nogain && !(e.delta_norm <= e.contract.theta2 * (1.0 + 1e-12))) ++radius_;
}

CoincidenceStats bound_coincidence(const Covering& covering, SchwarzVariant variant,
                                   const BoundBox& box, ConstSpan x) {
  CoincidenceStats st;
  const std::vector<SubdomainOperators> ops = build_operators(covering, variant);
  const Vector sigma = lemma_sigma(covering, variant);
  for (const SubdomainOperators& op : ops) {
    const Vector x0 = op.R.multiply(x);
    const BoundBox lower = lower_level_bounds(op.P, sigma, x, x0, box);
    const BoundBox restricted = restrict_bounds(op.R, box);
    const std::vector<bool> coupled = coupled_components(op);
    for (std::size_t j = 0; j < coupled.size(); ++j) {
      if (!coupled[j]) continue;
      const double pairs[2][2] = {{lower.lower()[j], restricted.lower()[j]},
                                  {lower.upper()[j], restricted.upper()[j]}};
      // The lower-level bound is x0 + offset; a zero bound from cancelling
      // terms is measured against |x0| rather than against zero.
      const double scale = std::max(std::abs(x0[j]), 1e-300);
      for (const auto& ab : pairs) {
        ++st.comparisons;
        if (ab[0] == ab[1]) continue;
        ++st.mismatches;
        const double rel = std::isfinite(ab[0]) && std::isfinite(ab[1])
                               ? std::abs(ab[0] - ab[1]) / std::max(std::abs(ab[1]), scale)
                               : kInf;
        st.max_relative_error = std::max(st.max_relative_error, rel);
      }
    }
  }
  return st;
}

Covering random_covering(std::size_t n, int M, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Covering c;
  c.n = n;
  c.domains.assign(static_cast<std::size_t>(M), {});
  c.partition.assign(static_cast<std::size_t>(M), {});
  // Every block gets at least one variable.
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_int_distribution<int> pick(0, M - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const int p = k < static_cast<std::size_t>(M) ? static_cast<int>(k) : pick(rng);
    c.partition[static_cast<std::size_t>(p)].push_back(perm[k]);
  }
  std::bernoulli_distribution extra(0.3);
  for (int p = 0; p < M; ++p) {
    auto& hat = c.partition[static_cast<std::size_t>(p)];
    std::sort(hat.begin(), hat.end());
    std::vector<std::size_t> D = hat;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::binary_search(hat.begin(), hat.end(), j) && extra(rng)) D.push_back(j);
    }
    std::sort(D.begin(), D.end());
    c.domains[static_cast<std::size_t>(p)] = std::move(D);
  }
  c.validate();
  return c;
}

ExperimentConfig make_config(const std::map<std::string, std::string>& overrides) {
  ExperimentConfig c;
  for (const auto& [k, v] : overrides) set_config_value(c, k, v);
  c.validate();
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <class F>
CheckResult timed(const std::string& name, F body) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = name;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

SolveResult run_quiet(const std::map<std::string, std::string>& overrides) {
  auto o = overrides;
  o.emplace("report_f", "false");
  return run_experiment(make_config(o)).result;
}

std::size_t fine_index(const SolveResult& r, const std::string& solver) {
  // ml/adagb2 list levels coarsest first; dd and ml-dd list the fine level first.
  return solver == "ml" || solver == "adagb2" ? r.sizes.size() - 1 : 0;
}

}  // namespace

CheckResult check_oracle_equivalence(int instances, std::uint64_t seed) {
  return timed("oracle equivalence", [&](CheckResult& r) {
    Parameters params;
    StopRule stop{1e-6, 0.0, 10000};
    int failures = 0;
    double worst_xi = 0.0, worst_err = 0.0;
    std::size_t worst_iters = 0;
    for (int i = 0; i < instances; ++i) {
      const std::size_t n = 1 + static_cast<std::size_t>(i % 10);
      const SyntheticInstance inst = synthetic_quadratic_obstacle(n, seed + static_cast<std::uint64_t>(i));
      const Vector xstar = kkt_enumeration_solution(*inst.objective, inst.problem.box);
      const SolveResult res =
          solve_adagb2(*inst.objective, inst.problem.box, inst.problem.initial, params, stop);
      const double xi = res.history.back().xi_norm;
      const double err = norm(subtract(res.x, xstar));
      worst_xi = std::max(worst_xi, xi);
      worst_err = std::max(worst_err, err);
      worst_iters = std::max(worst_iters, res.cycles() - 1);
      if (!(xi < 1e-6) || !(err < 1e-5)) ++failures;
    }
    r.passed = failures == 0;
    std::ostringstream os;
    os << instances << " instances, " << failures << " failures, max |Xi| " << fmt("%.2e", worst_xi)
       << ", max |x-x*| " << fmt("%.2e", worst_err) << ", max iterations " << worst_iters;
    r.detail = os.str();
  });
}

CheckResult check_feasibility(int runs_per_benchmark, int cells, std::size_t max_cycles,
                              std::uint64_t seed) {
  return timed("feasibility", [&](CheckResult& r) {
    std::size_t iterates = 0, infeasible = 0, radius = 0, runs = 0;
    double worst = 0.0;
    std::map<int, std::size_t> per_level;
    for (const std::string name : {"membrane", "minsurf", "poisson1d"}) {
      const int n = name == "poisson1d" ? 4 * cells : cells;
      ProblemOptions po;
      po.scale = n;
      const Hierarchy h = build_hierarchy(name, n, 3, po);
      for (int run = 0; run < runs_per_benchmark; ++run) {
        const std::uint64_t s = seed + 1000003ULL * static_cast<std::uint64_t>(run) + name.size();
        std::mt19937_64 rng(s);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        const GridProblem& fine = h.finest();
        Vector x0(fine.size());
        for (double& v : x0) v = U(rng);
        x0 = project_box(x0, fine.box);

        const bool noisy = run % 2 == 1;
        std::vector<std::unique_ptr<GradientOracle>> wrappers;
        std::vector<LevelSpec> specs;
        for (std::size_t l = 0; l < h.levels.size(); ++l) {
          const GridProblem& g = h.levels[l];
          const GradientOracle* f = g.objective.get();
          if (noisy) {
            wrappers.push_back(wrap_noisy(*f, NoiseSchedule::constant(1e-6), s, l));
            f = wrappers.back().get();
          }
          specs.push_back({f, g.box, g.size()});
        }
        MultilevelOptions o;
        o.model = run % 4 < 2 ? CoarseModel::tau_corrected : CoarseModel::galerkin;
        o.truncation = (run / 4) % 2 == 1;
        o.stop = {0.0, 0.0, max_cycles};
        FeasibilityMonitor mon;
        MultilevelSolver solver(std::move(specs), h.transfers, o, &mon);
        solver.run(x0);
        ++runs;
        iterates += mon.iterates();
        infeasible += mon.infeasible_iterates();
        radius += mon.radius_violations();
        worst = std::max(worst, mon.max_raw_violation());
        for (const auto& [lvl, k] : mon.iterates_per_level()) per_level[lvl] += k;
      }
    }
    r.passed = worst <= 1e-12 && infeasible == 0 && radius == 0 && per_level.size() == 3;
    std::ostringstream os;
    os << runs << " runs, " << iterates << " iterates (";
    for (const auto& [lvl, k] : per_level) os << "level " << lvl << ": " << k << (lvl == 2 ? "" : ", ");
    os << "), max raw violation " << fmt("%.2e", worst) << ", infeasible " << infeasible
       << ", radius violations " << radius;
    r.detail = os.str();
  });
}

CheckResult check_bound_coincidence(int trials, std::uint64_t seed) {
  return timed("bound coincidence", [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dim(2, 40), blocks(1, 6), grid(-512, 512), kind(0, 2);
    const SchwarzVariant all[] = {SchwarzVariant::as,  SchwarzVariant::ras,  SchwarzVariant::wras,
                                  SchwarzVariant::ash, SchwarzVariant::rash, SchwarzVariant::wash};
    std::map<SchwarzVariant, CoincidenceStats> total;
    for (int t = 0; t < trials; ++t) {
      const std::size_t n = static_cast<std::size_t>(dim(rng));
      const int M = std::min<int>(blocks(rng), static_cast<int>(n));
      const Covering cov = random_covering(n, M, rng());
      // Dyadic data keeps x + (l - x) exact in binary floating point.
      Vector l(n), u(n), x(n);
      for (std::size_t i = 0; i < n; ++i) {
        double a = grid(rng) / 64.0, b = grid(rng) / 64.0;
        if (a > b) std::swap(a, b);
        l[i] = kind(rng) == 0 ? -kInf : a;
        u[i] = kind(rng) == 0 ? kInf : b;
        const double lo = std::isfinite(l[i]) ? l[i] : std::isfinite(u[i]) ? u[i] - 8.0 : -8.0;
        const double hi = std::isfinite(u[i]) ? u[i] : lo + 16.0;
        const int steps = static_cast<int>((hi - lo) * 64.0);
        x[i] = lo + std::uniform_int_distribution<int>(0, std::max(steps, 0))(rng) / 64.0;
      }
      const BoundBox box(l, u);
      for (SchwarzVariant v : all) {
        const CoincidenceStats s = bound_coincidence(cov, v, box, x);
        CoincidenceStats& acc = total[v];
        acc.comparisons += s.comparisons;
        acc.mismatches += s.mismatches;
        acc.max_relative_error = std::max(acc.max_relative_error, s.max_relative_error);
      }
    }
    bool ok = true;
    std::ostringstream os;
    os << trials << " coverings;";
    for (SchwarzVariant v : all) {
      const CoincidenceStats& s = total[v];
      const bool pass = v == SchwarzVariant::wash ? s.max_relative_error < 1e-14 : s.mismatches == 0;
      ok = ok && pass && s.comparisons > 0;
      os << ' ' << to_string(v) << ": " << s.mismatches << "/" << s.comparisons << " inexact, max rel "
         << fmt("%.1e", s.max_relative_error) << ';';
    }
    r.passed = ok;
    r.detail = os.str();
  });
}

CheckResult check_kernel_equivalence(std::uint64_t seed) {
  return timed("kernel equivalence", [&](CheckResult& r) {
    const kernels::Table* simd = kernels::avx2_table();
    if (simd == nullptr) {
      r.passed = true;
      r.detail = "no SIMD variant on this host; scalar only";
      return;
    }
    const kernels::Table& ref = kernels::scalar_table();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::size_t elementwise_diffs = 0;
    double worst_rel = 0.0;
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 1001u}) {
      Vector x(n), g(n), lo(n), hi(n), w(n), d(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = N(rng);
        g[i] = N(rng);
        lo[i] = i % 5 == 0 ? -kInf : x[i] - std::abs(N(rng));
        hi[i] = i % 7 == 0 ? kInf : x[i] + std::abs(N(rng));
        w[i] = std::abs(N(rng)) + 0.1;
        d[i] = i % 3 == 0 ? 0.0 : N(rng);
      }
      auto same = [&](const Vector& a, const Vector& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) ++elementwise_diffs;
        }
      };
      auto rel = [&](double a, double b) {
        worst_rel = std::max(worst_rel, std::abs(a - b) / std::max(std::abs(b), 1e-300));
      };
      rel(simd->dot(x.data(), g.data(), n), ref.dot(x.data(), g.data(), n));
      rel(simd->weighted_square_sum(d.data(), w.data(), n), ref.weighted_square_sum(d.data(), w.data(), n));
      if (simd->max_abs(x.data(), n) != ref.max_abs(x.data(), n)) ++elementwise_diffs;
      Vector a(n), b(n), a2(n), b2(n);
      simd->clamp(g.data(), lo.data(), hi.data(), a.data(), n);
      ref.clamp(g.data(), lo.data(), hi.data(), b.data(), n);
      same(a, b);
      simd->projected_direction(x.data(), g.data(), lo.data(), hi.data(), a.data(), n);
      ref.projected_direction(x.data(), g.data(), lo.data(), hi.data(), b.data(), n);
      same(a, b);
      simd->accumulate_weights(w.data(), d.data(), 1e-12, a.data(), a2.data(), n);
      ref.accumulate_weights(w.data(), d.data(), 1e-12, b.data(), b2.data(), n);
      same(a, b);
      same(a2, b2);
      simd->box_step(x.data(), g.data(), w.data(), lo.data(), hi.data(), a.data(), n);
      ref.box_step(x.data(), g.data(), w.data(), lo.data(), hi.data(), b.data(), n);
      same(a, b);
      a = x;
      b = x;
      simd->axpy(0.37, g.data(), a.data(), n);
      ref.axpy(0.37, g.data(), b.data(), n);
      same(a, b);
    }
    r.passed = elementwise_diffs == 0 && worst_rel < 1e-13;
    r.detail = "elementwise differences " + std::to_string(elementwise_diffs) +
               ", worst reduction relative difference " + fmt("%.1e", worst_rel);
  });
}

CheckResult check_trace_roundtrip() {
  return timed("trace round trip", [&](CheckResult& r) {
    const ExperimentConfig c =
        make_config({{"problem", "poisson1d"}, {"n", "32"}, {"levels", "2"}, {"max_cycles", "5"}});
    Trace t = run_experiment(c).trace;
    t.records.back().xi_norm = 0.1 + 1e-17;  // a value with no short decimal form
    const bool same = parse_jsonl(to_jsonl(t)) == t;
    const bool hash = t.meta.config_hash == c.hash();
    r.passed = same && hash;
    r.detail = std::string("parse(write(trace)) ") + (same ? "==" : "!=") + " trace, config hash " +
               (hash ? "matches" : "differs");
  });
}

CheckResult check_objective_guard() {
  return timed("objective guard", [&](CheckResult& r) {
    const GridProblem p = poisson1d(8);
    bool thrown = false;
    {
      SolverScope scope;
      try {
        p.objective->energy(p.initial);
      } catch (const ContractError&) {
        thrown = true;
      }
    }
    bool reporting_ok = true;
    {
      SolverScope scope;
      ReportingScope reporting;
      try {
        p.objective->energy(p.initial);
      } catch (const ContractError&) {
        reporting_ok = false;
      }
    }
    r.passed = thrown && reporting_ok;
    r.detail = std::string("energy inside solver scope ") + (thrown ? "refused" : "allowed") +
               ", inside reporting scope " + (reporting_ok ? "allowed" : "refused");
  });
}

// ---------------------------------------------------------------------------
// Trend experiments at desk scale.

CheckResult check_ml_speedup() {
  return timed("multilevel speedup", [&](CheckResult& r) {
    const SolveResult single = run_quiet({{"problem", "membrane"}, {"n", "32"}, {"solver", "adagb2"}});
    const SolveResult ml =
        run_quiet({{"problem", "membrane"}, {"n", "32"}, {"solver", "ml"}, {"levels", "3"}});
    const double ratio = ml.cost / single.cost;
    r.passed = single.converged && ml.converged && ratio <= 0.5;
    std::ostringstream os;
    os << "C_ML " << fmt("%.1f", ml.cost) << " (" << ml.cycles() - 1 << " V-cycles) vs ADAGB2 "
       << fmt("%.1f", single.cost) << ", ratio " << fmt("%.3f", ratio);
    r.detail = os.str();
  });
}

namespace {

std::map<std::string, std::string> dd_config(int M, int overlap, const std::string& solver) {
  return {{"problem", "membrane"},
          {"n", "32"},
          {"solver", solver},
          {"subdomains", std::to_string(M)},
          {"overlap", std::to_string(overlap)},
          {"variant", "wras"}};
}

}  // namespace

CheckResult check_dd_trend() {
  return timed("decomposition cost trend", [&](CheckResult& r) {
    std::map<std::pair<int, int>, SolveResult> res;
    for (auto [M, o] : {std::pair{2, 2}, {4, 2}, {8, 2}, {8, 0}}) res[{M, o}] = run_quiet(dd_config(M, o, "dd"));
    bool converged = true;
    for (const auto& [k, v] : res) converged = converged && v.converged;
    const double c2 = res[{2, 2}].cost, c4 = res[{4, 2}].cost, c8 = res[{8, 2}].cost;
    const double c80 = res[{8, 0}].cost;
    const bool decreasing = c2 > c4 && c4 > c8;
    const bool overlap = c8 <= c80;
    r.passed = converged && decreasing && overlap;
    std::ostringstream os;
    os << "overlap 2: C_DD(M=2,4,8) = " << fmt("%.1f", c2) << ", " << fmt("%.1f", c4) << ", "
       << fmt("%.1f", c8) << (decreasing ? " (decreasing)" : " (NOT decreasing)")
       << "; M=8: overlap 2 " << fmt("%.1f", c8) << (overlap ? " <= " : " > ") << "overlap 0 "
       << fmt("%.1f", c80);
    r.detail = os.str();
  });
}

CheckResult check_hybrid_trend() {
  return timed("hybrid trend", [&](CheckResult& r) {
    bool cheaper = true, converged = true;
    std::ostringstream os;
    for (int M : {2, 4, 8}) {
      const SolveResult dd = run_quiet(dd_config(M, 2, "dd"));
      const SolveResult h = run_quiet(dd_config(M, 2, "ml-dd"));
      converged = converged && dd.converged && h.converged;
      cheaper = cheaper && h.cost < dd.cost;
      os << "M=" << M << ": C_ML-DD " << fmt("%.1f", h.cost) << " vs C_DD " << fmt("%.1f", dd.cost)
         << " (" << h.cycles() - 1 << " hybrid cycles); ";
    }
    const SolveResult h2 = run_quiet(dd_config(2, 2, "ml-dd"));
    const SolveResult h16 = run_quiet(dd_config(16, 2, "ml-dd"));
    converged = converged && h2.converged && h16.converged;
    const double c2 = static_cast<double>(h2.cycles() - 1), c16 = static_cast<double>(h16.cycles() - 1);
    const bool scalable = c16 <= 1.1 * c2;
    os << "hybrid cycles M=2: " << c2 << ", M=16: " << c16;
    r.passed = converged && cheaper && scalable;
    r.detail = os.str();
  });
}

CheckResult check_noise_stall_and_recover(int seeds) {
  return timed("noise stall and recover", [&](CheckResult& r) {
    double constant_xi = 0.0, exponential_xi = 0.0;
    int exp_converged = 0;
    for (int s = 0; s < seeds; ++s) {
      std::map<std::string, std::string> base = {{"problem", "minsurf"}, {"n", "32"},
                                                 {"solver", "ml"},       {"levels", "3"},
                                                 {"seed", std::to_string(s + 1)},
                                                 {"max_cycles", "2000"}};
      auto c = base;
      c["noise"] = "constant";
      c["noise_variance"] = "1e-7";
      const SolveResult rc = run_quiet(c);
      constant_xi += rc.history.back().xi_norm / seeds;
      auto e = base;
      e["noise"] = "exponential";
      e["noise_variance"] = "1e-7";
      e["noise_decay"] = "0.05";
      const SolveResult re = run_quiet(e);
      exponential_xi += re.history.back().xi_norm / seeds;
      if (re.history.back().xi_norm < 1e-7) ++exp_converged;
    }
    const bool stall = constant_xi >= 1e-5 && constant_xi <= 1e-2;
    const bool recover = exponential_xi < 1e-7;
    r.passed = stall && recover;
    std::ostringstream os;
    os << seeds << " seeds: constant noise mean final |Xi| " << fmt("%.2e", constant_xi)
       << (stall ? " (in [1e-5, 1e-2])" : " (outside [1e-5, 1e-2])")
       << "; exponential schedule mean final |Xi| " << fmt("%.2e", exponential_xi) << ", "
       << exp_converged << "/" << seeds << " below 1e-7";
    r.detail = os.str();
  });
}

CheckResult check_truncation() {
  return timed("active-set truncation", [&](CheckResult& r) {
    std::map<std::string, std::string> c = {{"problem", "membrane"}, {"n", "32"},
                                            {"solver", "ml"},        {"levels", "3"},
                                            {"coarse_model", "galerkin"}};
    const SolveResult plain = run_quiet(c);
    c["truncation"] = "true";
    const SolveResult trunc = run_quiet(c);
    const std::size_t a = trunc.cycles() - 1, b = plain.cycles() - 1;
    r.passed = plain.converged && trunc.converged && a <= b;
    std::ostringstream os;
    os << "Galerkin V-cycles with truncation " << a << ", without " << b << " (C_ML "
       << fmt("%.1f", trunc.cost) << " vs " << fmt("%.1f", plain.cost) << "); declined recursions "
       << trunc.fallbacks << " and " << plain.fallbacks;
    r.detail = os.str();
  });
}

double decay_slope(const std::vector<double>& counts, const std::vector<double>& d_norms) {
  require_same_size(counts.size(), d_norms.size(), "decay_slope");
  if (counts.empty()) return 0.0;
  const double last = counts.back();
  double running = kInf;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    running = std::min(running, d_norms[k] * d_norms[k]);
    if (counts[k] >= last / 10.0 && counts[k] > 0.0 && running > 0.0) {
      lx.push_back(std::log(counts[k]));
      ly.push_back(std::log(running));
    }
  }
  const double m = static_cast<double>(lx.size());
  if (m < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = m * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (m * sxy - sx * sy) / den;
}

CheckResult check_decay_slope() {
  return timed("decay rate", [&](CheckResult& r) {
    const std::map<std::string, std::string> c = {
        {"problem", "membrane"}, {"n", "32"}, {"solver", "ml"}, {"levels", "3"}};
    const SolveResult res = run_quiet(c);
    std::vector<double> counts, d;
    const std::size_t fi = fine_index(res, "ml");
    for (const CycleRecord& rec : res.history) {
      counts.push_back(static_cast<double>(rec.evaluations[fi]));
      d.push_back(rec.d_norm);
    }
    const double slope = decay_slope(counts, d);
    r.passed = res.converged && slope <= -0.8;
    r.detail = "log-log slope of min |d_r|^2 over the last decade of fine gradients: " +
               fmt("%.3f", slope) + " (" + std::to_string(res.cycles() - 1) + " V-cycles)";
  });
}

std::vector<CheckResult> run_invariant_suite(bool quick) {
  std::vector<CheckResult> out;
  out.push_back(check_kernel_equivalence(7));
  out.push_back(check_objective_guard());
  out.push_back(check_trace_roundtrip());
  out.push_back(check_bound_coincidence(quick ? 100 : 1000, 11));
  out.push_back(check_oracle_equivalence(quick ? 40 : 200, 1));
  out.push_back(check_feasibility(quick ? 4 : 50, 16, quick ? 5 : 20, 3));
  return out;
}

}  // namespace offo
