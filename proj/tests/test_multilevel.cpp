#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "offo/multilevel.hpp"
#include "offo/problems.hpp"
#include "offo/verify.hpp"
#include "reference.hpp"

using namespace offo;
using testing::check_vec;
using testing::close;

namespace {

// f = 1/2 ||x||^2, identity Hessian.
class HalfNorm : public GradientOracle {
 public:
  explicit HalfNorm(std::size_t n) : GradientOracle(n) {}
  bool has_analytic_hessian_vector() const override { return true; }

 protected:
  void compute_gradient(ConstSpan x, MutSpan g) const override { std::copy(x.begin(), x.end(), g.begin()); }
  void compute_hessian_vector(ConstSpan, ConstSpan v, MutSpan out) const override {
    std::copy(v.begin(), v.end(), out.begin());
  }
};

ref::Quadratic reference_of(const QuadraticObjective& q) {
  const std::size_t n = q.dimension();
  ref::Quadratic r{ref::dense(q.matrix().dense(), n, n), q.linear()};
  for (auto& row : r.A)
    for (double& v : row) v *= q.scale();
  for (double& v : r.b) v *= q.scale();
  return r;
}

std::vector<LevelSpec> specs(const Hierarchy& h) {
  std::vector<LevelSpec> out;
  for (const GridProblem& l : h.levels) out.push_back({l.objective.get(), l.box, l.size()});
  return out;
}

}  // namespace

TEST_CASE("contract values") {
  const ThetaContract c = ThetaContract::descent(0.2, 0.05, 0.95, 10.0);
  CHECK(close(c.theta1, 0.19));
  CHECK(close(c.theta2, 0.5));
  CHECK(ThetaContract::top().theta1 == 0.0);
  CHECK(ThetaContract::top().theta2 == kInf);
}

TEST_CASE("single level iterates match the hand-stepped reference") {
  for (double scale : {1.0, 16.0}) {
    const GridProblem p = poisson1d(8, {scale, false});
    const auto& q = dynamic_cast<const QuadraticObjective&>(*p.objective);
    const auto expected = ref::single_level(reference_of(q), {p.box.lower(), p.box.upper()}, p.initial, 12);
    std::vector<Vector> got;
    StopRule stop{0.0, 0.0, 12};
    const SolveResult r = solve_adagb2(q, p.box, p.initial, Parameters{}, stop, nullptr,
                                       [&](const CycleRecord& rec, ConstSpan x) {
                                         if (rec.cycle > 0) got.emplace_back(x.begin(), x.end());
                                       });
    REQUIRE(got.size() == expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) check_vec(got[k], expected[k], 1e-12);
    CHECK(r.stop_reason == "budget");
    CHECK_FALSE(r.converged);
  }
}

TEST_CASE("single level hierarchy is the plain loop") {
  const GridProblem p = poisson1d(16);
  MultilevelOptions o;
  o.stop.max_cycles = 30;
  MultilevelSolver s({LevelSpec{p.objective.get(), p.box, p.size()}}, {}, o);
  CHECK(s.schedule_for(0) == std::vector<IterationType>{IterationType::taylor});
  const SolveResult a = s.run(p.initial);
  const SolveResult b = solve_adagb2(*p.objective, p.box, p.initial, Parameters{}, o.stop);
  CHECK(a.x == b.x);
  CHECK(a.cycles() == b.cycles());
}

TEST_CASE("one two-level V-cycle matches the hand-stepped reference") {
  int recursions = 0;
  for (double scale : {1.0, 4.0, 8.0}) {
    const Hierarchy h = build_hierarchy("membrane", 8, 2, {scale, false});
    const auto& fine = dynamic_cast<const QuadraticObjective&>(*h.finest().objective);
    const auto& coarse = dynamic_cast<const QuadraticObjective&>(*h.levels[0].objective);
    const TransferPair& t = h.transfers[0];
    bool declined = true;
    const Vector expected = ref::two_level_cycle(
        reference_of(fine), reference_of(coarse), ref::dense(t.P.dense(), t.P.rows(), t.P.cols()),
        ref::dense(t.R.dense(), t.R.rows(), t.R.cols()), {h.finest().box.lower(), h.finest().box.upper()},
        h.finest().initial, 3, 5, 3, {}, &declined);
    recursions += declined ? 0 : 1;

    MultilevelOptions o;
    o.stop = {0.0, 0.0, 1};
    MultilevelSolver s(specs(h), h.transfers, o);
    const SolveResult r = s.run(h.finest().initial);
    INFO("scale " << scale << " declined " << declined);
    check_vec(r.x, expected, 1e-12);
    CHECK(r.fallbacks == (declined ? 1u : 0u));
  }
  CHECK(recursions > 0);
}

TEST_CASE("nogain at the first iteration of a lower level costs no gradient there") {
  const Hierarchy h = build_hierarchy("poisson1d", 16, 2, {16.0, false});
  const Objective& coarse = *h.levels[0].objective;
  Parameters params;
  params.kappa_1st = 1e8;  // no coarse problem can promise this much
  LevelRun fine(*h.finest().objective, h.finest().box, params, 1);
  REQUIRE(fine.start(h.finest().initial, Vector(h.finest().size(), 1e-4), ThetaContract::top(), true));
  const std::uint64_t before = coarse.evaluations();
  bool ran = false;
  const auto step = recursive_step(fine, {&h.transfers[0], &coarse, 0}, CoarseModel::tau_corrected, false,
                                   nullptr, [&](LevelRun&) { ran = true; });
  CHECK_FALSE(step.has_value());
  CHECK_FALSE(ran);
  CHECK(coarse.evaluations() == before);
}

TEST_CASE("a declined recursion without fallback is a skip") {
  const GridProblem p = poisson1d(16, {16.0, false});
  Parameters params;
  params.taylor_on_nogain = false;
  LevelRun run(*p.objective, p.box, params, 1);
  REQUIRE(run.start(p.initial, Vector(p.size(), 1e-4), ThetaContract::top(), true));
  const Vector x0 = run.x();
  REQUIRE(run.iterate(IterationType::recursive, [](LevelRun&) { return std::optional<Vector>(); }));
  CHECK(run.x() == x0);
  CHECK(run.fallbacks() == 0);

  params.taylor_on_nogain = true;
  LevelRun a(*p.objective, p.box, params, 1);
  LevelRun b(*p.objective, p.box, params, 1);
  a.start(p.initial, Vector(p.size(), 1e-4), ThetaContract::top(), true);
  b.start(p.initial, Vector(p.size(), 1e-4), ThetaContract::top(), true);
  a.iterate(IterationType::recursive, [](LevelRun&) { return std::optional<Vector>(); });
  b.iterate(IterationType::taylor);
  CHECK(a.x() == b.x());
  CHECK(a.fallbacks() == 1);
}

TEST_CASE("tau correction") {
  const Hierarchy h = build_hierarchy("minsurf", 16, 2, {4.0, false});
  const Objective& coarse = *h.levels[0].objective;
  const Vector y0 = h.levels[0].initial;
  Vector target(y0.size());
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = std::sin(1.0 + static_cast<double>(i));

  SUBCASE("gradient at x0 is the restricted fine gradient") {
    const auto m = tau_correct(coarse, target, y0);
    check_vec(m->gradient(y0), target, 1e-12);
    CHECK(m->evaluations() == 2);  // the shift and the call itself
  }
  SUBCASE("the Hessian is that of the coarse objective") {
    const auto m = tau_correct(coarse, target, y0);
    Vector y = y0;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.01 * static_cast<double>(i % 3);
    Vector a(y.size()), b(y.size());
    m->hessian_vector(y, target, a);
    coarse.hessian_vector(y, target, b);
    CHECK(a == b);
  }
}

TEST_CASE("tau-corrected minimiser is the linear coarse grid correction") {
  // 1D, 8 cells: seven fine unknowns, three coarse unknowns.
  const Hierarchy h = build_hierarchy("poisson1d", 8, 2);
  const auto& fine = dynamic_cast<const QuadraticObjective&>(*h.finest().objective);
  const auto& coarse = dynamic_cast<const QuadraticObjective&>(*h.levels[0].objective);
  const TransferPair& t = h.transfers[0];
  REQUIRE(t.coarse_size() == 3);
  const Vector x{0.01, -0.02, 0.03, 0.0, 0.05, 0.02, -0.01};
  const Vector g = fine.gradient(x);
  const Vector y0 = t.R.multiply(x);
  const Vector target = t.P.multiply_transpose(g);

  auto to_eigen = [](const CsrMatrix& m) {
    const std::vector<double> d = m.dense();
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = d[i * m.cols() + j];
    return e;
  };
  const Eigen::Map<const Eigen::VectorXd> rhs(target.data(), 3);
  // minimiser of the corrected model: A_c e = -P^T g
  const Eigen::VectorXd e = to_eigen(coarse.matrix()).ldlt().solve(-rhs) / coarse.scale();
  // linear multigrid: Galerkin operator P^T A P, residual -g
  const Eigen::MatrixXd P = to_eigen(t.P);
  const Eigen::VectorXd cgc = (P.transpose() * to_eigen(fine.matrix()) * P).ldlt().solve(-rhs) / fine.scale();
  CHECK((e - cgc).norm() <= 1e-12 * cgc.norm());

  const auto m = tau_correct(coarse, target, y0);
  const Vector gm = m->gradient(add(y0, Vector(e.data(), e.data() + 3)));
  CHECK(norm(gm) <= 1e-12 * norm(target));
}

TEST_CASE("Galerkin coarse model") {
  const std::size_t n = 7;
  HalfNorm f(n);
  TensorGrid grid{{Axis{8, true, true}}};
  const TransferPair t = build_linear_interpolation(grid, grid.coarsened());
  const Vector x(n, 0.25);
  Vector g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = 1.0 - 0.3 * static_cast<double>(i);
  const Vector y0 = t.R.multiply(x);

  SUBCASE("zero step: restricted gradient") {
    GalerkinModel m(f, x, t, g, y0);
    check_vec(m.gradient(y0), t.R.multiply(g));
  }
  SUBCASE("identity curvature: action R P s") {
    GalerkinModel m(f, x, t, g, y0);
    const Vector s{0.5, -1.0, 2.0};
    Vector hv(3);
    m.hessian_vector(y0, s, hv);
    check_vec(hv, t.R.multiply(t.P.multiply(s)));
    check_vec(m.gradient(add(y0, s)), add(t.R.multiply(g), t.R.multiply(t.P.multiply(s))));
  }
  SUBCASE("masked rows carry no influence") {
    std::vector<bool> mask(n, false);
    mask[2] = true;
    const TransferPair tt = truncate(t, {mask});
    Vector g2 = g;
    g2[2] += 100.0;
    GalerkinModel a(f, x, tt, g, y0), b(f, x, tt, g2, y0);
    const Vector s{0.1, 0.2, -0.3};
    CHECK(a.gradient(add(y0, s)) == b.gradient(add(y0, s)));
  }
}

TEST_CASE("two-level solve of the 1D obstacle problem converges (pinned cycle count)") {
  // At larger energy scales the coarse level declines in nearly every cycle.
  const Hierarchy h = build_hierarchy("poisson1d", 64, 2, {0.5, false});
  MultilevelOptions o;
  o.stop = {1e-7, 0.0, 5000};
  MultilevelSolver s(specs(h), h.transfers, o);
  const SolveResult r = s.run(h.finest().initial);
  CHECK(r.converged);
  CHECK(r.history.back().xi_norm < 1e-7);
  CHECK(r.stop_reason == "absolute");
  CHECK(r.cycles() - 1 == 145u);
  CHECK(r.fallbacks == 135u);
}

TEST_CASE("stop rule: absolute and relative thresholds") {
  const GridProblem p = poisson1d(32, {32.0, false});
  const SolveResult a = solve_adagb2(*p.objective, p.box, p.initial, Parameters{}, {1e-3, 0.0, 100000});
  CHECK(a.stop_reason == "absolute");
  CHECK(a.history.back().xi_norm < 1e-3);
  CHECK(a.history[a.cycles() - 2].xi_norm >= 1e-3);
  const SolveResult b = solve_adagb2(*p.objective, p.box, p.initial, Parameters{}, {0.0, 1e-2, 100000});
  CHECK(b.stop_reason == "relative");
  CHECK(b.history.back().xi_norm / b.xi0 < 1e-2);
  CHECK(b.history[b.cycles() - 2].xi_norm / b.xi0 >= 1e-2);
}

TEST_CASE("cost_ml weights counts by level size") {
  CHECK(cost_ml({10, 40, 160}, {100, 50, 20}) == doctest::Approx(10.0 / 160 * 100 + 40.0 / 160 * 50 + 20));
  CHECK(cost_ml({5}, {7}) == 7.0);
}

TEST_CASE("membrane desk scale: three levels cost less than one (pinned)") {
  const Hierarchy h = build_hierarchy("membrane", 32, 3, {32.0, false});
  MultilevelOptions o;
  MultilevelSolver ml(specs(h), h.transfers, o);
  const SolveResult r3 = ml.run(h.finest().initial);
  const GridProblem& top = h.finest();
  const SolveResult r1 = solve_adagb2(*top.objective, top.box, top.initial, o.params, o.stop);
  REQUIRE(r3.converged);
  REQUIRE(r1.converged);
  CHECK(r3.cost < r1.cost);
  CHECK(r3.cost == doctest::Approx(2649.8).epsilon(0.02));
  CHECK(r1.cost == doctest::Approx(10040.0).epsilon(0.02));
}

TEST_CASE("iterates stay feasible at every level") {
  // Galerkin with truncation declines almost every recursion, so level
  // coverage is checked over all runs together.
  std::map<int, std::size_t> visited;
  for (const char* name : {"minsurf", "membrane"}) {
    const Hierarchy h = build_hierarchy(name, 16, 3, {4.0, false});
    for (bool galerkin : {false, true}) {
      FeasibilityMonitor mon;
      MultilevelOptions o;
      o.model = galerkin ? CoarseModel::galerkin : CoarseModel::tau_corrected;
      o.truncation = galerkin;
      o.stop.max_cycles = 30;
      MultilevelSolver s(specs(h), h.transfers, o, &mon);
      s.run(h.finest().initial);
      INFO(name << (galerkin ? " galerkin" : " tau"));
      CHECK(mon.iterates() > 0);
      CHECK(mon.infeasible_iterates() == 0);
      CHECK(mon.radius_violations() == 0);
      CHECK(mon.max_raw_violation() <= 1e-12);
      for (const auto& [level, k] : mon.iterates_per_level()) visited[level] += k;
    }
  }
  CHECK(visited.size() == 3);
}
