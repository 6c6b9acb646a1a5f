#include "helpers.hpp"
#include "offo/hybrid.hpp"
#include "offo/problems.hpp"
#include "offo/verify.hpp"

using namespace offo;

namespace {

struct Setup {
  Hierarchy h;
  Covering covering;
};

Setup setup(const char* name, int cells, int M, int overlap, double scale) {
  Setup s{build_hierarchy(name, cells, 2, {scale, false}), {}};
  s.covering = build_block_covering(s.h.finest().grid, M, overlap);
  return s;
}

}  // namespace

TEST_CASE("cost_mldd adds the coarse term to the decomposition cost") {
  CHECK(cost_mldd(10, 40, 100, 25, {50, 50}, {8, 8}) == 10 + 10 + 4);
}

TEST_CASE("hybrid without decomposition iterations is the two-level method") {
  const Setup s = setup("minsurf", 16, 4, 1, 16.0);
  const GridProblem& top = s.h.finest();
  HybridOptions o;
  o.dd.decomposition_iterations = 0;
  o.dd.stop.max_cycles = 25;
  o.coarse_iterations = 4;
  HybridSolver hy(*top.objective, top.box, *s.h.levels[0].objective, s.h.transfers[0], s.covering, o);
  const SolveResult a = hy.run(top.initial);

  MultilevelOptions m;
  m.schedule = {0, 0, 4};
  m.stop.max_cycles = 25;
  MultilevelSolver ml({{s.h.levels[0].objective.get(), s.h.levels[0].box, s.h.levels[0].size()},
                       {top.objective.get(), top.box, top.size()}},
                      s.h.transfers, m);
  const SolveResult b = ml.run(top.initial);
  CHECK(a.x == b.x);
  REQUIRE(a.cycles() == b.cycles());
  // fine and coarse counts agree; no subdomain work
  CHECK(a.history.back().evaluations[0] == b.history.back().evaluations[1]);
  CHECK(a.history.back().evaluations[1] == b.history.back().evaluations[0]);
  for (std::size_t p = 2; p < a.history.back().evaluations.size(); ++p) {
    CHECK(a.history.back().evaluations[p] == 0);
  }
  CHECK(a.cost == doctest::Approx(b.cost).epsilon(1e-14));
}

TEST_CASE("hybrid without coarse iterations is the decomposition method") {
  const Setup s = setup("membrane", 16, 4, 2, 16.0);
  const GridProblem& top = s.h.finest();
  HybridOptions o;
  o.dd.decomposition_iterations = 3;
  o.dd.stop.max_cycles = 20;
  o.coarse_iterations = 0;
  o.coarse_first = false;
  HybridSolver hy(*top.objective, top.box, *s.h.levels[0].objective, s.h.transfers[0], s.covering, o);
  const SolveResult a = hy.run(top.initial);

  DDOptions d = o.dd;
  d.taylor_iterations = 1;
  DomainDecompositionSolver dd(*top.objective, top.box, s.covering, d);
  const SolveResult b = dd.run(top.initial);
  CHECK(a.x == b.x);
  CHECK(a.cost == b.cost);
  CHECK(a.history.back().evaluations[1] == 0);
}

TEST_CASE("hybrid iterates stay feasible") {
  const Setup s = setup("minsurf", 16, 4, 2, 16.0);
  const GridProblem& top = s.h.finest();
  FeasibilityMonitor mon;
  HybridOptions o;
  o.dd.stop.max_cycles = 10;
  HybridSolver hy(*top.objective, top.box, *s.h.levels[0].objective, s.h.transfers[0], s.covering, o,
                  &mon);
  const SolveResult r = hy.run(top.initial);
  CHECK(mon.infeasible_iterates() == 0);
  CHECK(mon.radius_violations() == 0);
  CHECK(mon.max_raw_violation() <= 1e-12);
  CHECK(r.sizes.size() == 2 + 4);
}

TEST_CASE("membrane desk scale: hybrid costs less than decomposition alone (pinned)") {
  const Setup s = setup("membrane", 16, 4, 2, 16.0);
  const GridProblem& top = s.h.finest();
  HybridOptions o;
  HybridSolver hy(*top.objective, top.box, *s.h.levels[0].objective, s.h.transfers[0], s.covering, o);
  const SolveResult a = hy.run(top.initial);
  DomainDecompositionSolver dd(*top.objective, top.box, s.covering, o.dd);
  const SolveResult b = dd.run(top.initial);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(a.cost < b.cost);
  CHECK(a.cost == doctest::Approx(816.757).epsilon(0.02));
}
