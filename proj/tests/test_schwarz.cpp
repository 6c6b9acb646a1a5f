#include <random>

#include "helpers.hpp"
#include "offo/problems.hpp"
#include "offo/schwarz.hpp"
#include "offo/verify.hpp"

using namespace offo;
using testing::check_vec;
using testing::close;

namespace {

const SchwarzVariant kVariants[] = {SchwarzVariant::as,  SchwarzVariant::ras,  SchwarzVariant::wras,
                                    SchwarzVariant::ash, SchwarzVariant::rash, SchwarzVariant::wash};

TensorGrid line(std::size_t unknowns) {
  return TensorGrid{{Axis{static_cast<int>(unknowns) + 1, true, true}}};
}

std::vector<std::size_t> range(std::size_t a, std::size_t b) {
  std::vector<std::size_t> r;
  for (std::size_t i = a; i < b; ++i) r.push_back(i);
  return r;
}

// Separable quadratic 1/2 sum a_i x_i^2 + b_i x_i.
std::shared_ptr<QuadraticObjective> diagonal(const Vector& a, const Vector& b) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < a.size(); ++i) t.push_back({i, i, a[i]});
  return std::make_shared<QuadraticObjective>(CsrMatrix::from_triplets(a.size(), a.size(), t), b);
}

}  // namespace

TEST_CASE("block covering of a line") {
  SUBCASE("one subdomain") {
    const Covering c = build_block_covering(line(8), 1, 2);
    REQUIRE(c.size() == 1);
    CHECK(c.domains[0] == range(0, 8));
    CHECK(c.partition[0] == range(0, 8));
  }
  SUBCASE("even split") {
    const Covering c = build_block_covering(line(8), 2, 0);
    CHECK(c.domains[0] == range(0, 4));
    CHECK(c.domains[1] == range(4, 8));
    CHECK(c.partition == c.domains);
  }
  SUBCASE("one layer of overlap") {
    const Covering c = build_block_covering(line(8), 2, 1);
    CHECK(c.domains[0] == range(0, 5));
    CHECK(c.domains[1] == range(3, 8));
    CHECK(c.partition[0] == range(0, 4));
    CHECK(c.partition[1] == range(4, 8));
    CHECK(c.multiplicity() == std::vector<int>{1, 1, 1, 2, 2, 1, 1, 1});
  }
  SUBCASE("too many subdomains") { CHECK_THROWS_AS(build_block_covering(line(3), 4, 0), ContractError); }
}

TEST_CASE("block covering of a square grid") {
  TensorGrid g{{Axis{9, true, true}, Axis{9, true, true}}};
  const Covering c = build_block_covering(g, 8, 1);
  CHECK(c.size() == 8);
  std::size_t total = 0;
  for (const auto& b : c.partition) total += b.size();
  CHECK(total == g.size());
  // 4 x 2 blocks of 2 x 4 unknowns, extended by one layer inwards
  CHECK(c.partition[0].size() == 8);
  CHECK(c.domains[0].size() == 3 * 5);
}

TEST_CASE("weighted injection uses the multiplicity") {
  const Covering c = build_block_covering(line(8), 2, 1);
  const CsrMatrix W = subdomain_weighted_injection(c, 0);
  // variables 3 and 4 belong to both subdomains
  CHECK(W.entry(3, 3) == 0.5);
  CHECK(W.entry(4, 4) == 0.5);
  CHECK(W.entry(2, 2) == 1.0);
}

TEST_CASE("without overlap every variant is plain injection") {
  const Covering c = build_block_covering(line(9), 3, 0);
  const auto as = build_operators(c, SchwarzVariant::as);
  for (SchwarzVariant v : kVariants) {
    const auto ops = build_operators(c, v);
    for (std::size_t p = 0; p < c.size(); ++p) {
      CHECK(ops[p].P == as[p].P);
      CHECK(ops[p].R == as[p].R);
    }
  }
}

TEST_CASE("additive Schwarz with overlap: sum of P R is diag(multiplicity)") {
  const Covering c = build_block_covering(line(12), 3, 2);
  const auto ops = build_operators(c, SchwarzVariant::as);
  std::vector<double> sum(c.n * c.n, 0.0);
  for (const auto& op : ops) {
    const std::vector<double> d = (op.P * op.R).dense();
    for (std::size_t k = 0; k < d.size(); ++k) sum[k] += d[k];
  }
  const std::vector<int> theta = c.multiplicity();
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = 0; j < c.n; ++j) CHECK(sum[i * c.n + j] == (i == j ? theta[i] : 0.0));
}

TEST_CASE("restricted and weighted variants sum to the identity") {
  const Covering c = random_covering(15, 4, 3);
  for (SchwarzVariant v : {SchwarzVariant::ras, SchwarzVariant::wras, SchwarzVariant::ash,
                           SchwarzVariant::rash, SchwarzVariant::wash}) {
    const auto ops = build_operators(c, v);
    const Vector x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
    Vector y(c.n, 0.0);
    for (const auto& op : ops) axpy(1.0, op.P.multiply(op.R.multiply(x)), y);
    INFO(to_string(v));
    check_vec(y, x, 1e-15);
  }
}

TEST_CASE("restrict_bounds extracts subvectors for injections") {
  Covering c;
  c.n = 6;
  c.domains = {{1, 4}, {0, 2, 3, 5}};
  c.partition = c.domains;
  const auto ops = build_operators(c, SchwarzVariant::as);
  const BoundBox box({0, -1, -2, -3, -4, -5}, {1, 2, 3, 4, 5, 6});
  const BoundBox b = restrict_bounds(ops[0].R, box);
  CHECK(b.lower() == Vector{-1, -4});
  CHECK(b.upper() == Vector{2, 5});
}

TEST_CASE("restrict_bounds for WASH divides by the multiplicity") {
  const Covering c = build_block_covering(line(8), 2, 1);
  const auto ops = build_operators(c, SchwarzVariant::wash);
  Vector l(8), u(8);
  for (std::size_t i = 0; i < 8; ++i) {
    l[i] = -1.0 - static_cast<double>(i);
    u[i] = 2.0 + static_cast<double>(i);
  }
  const BoundBox b = restrict_bounds(ops[1].R, BoundBox(l, u));
  // subdomain 1 is {3..7}; variables 3 and 4 have multiplicity 2
  CHECK(b.lower()[0] == l[3] / 2);
  CHECK(b.lower()[1] == l[4] / 2);
  CHECK(b.lower()[2] == l[5]);
  // the same numbers come out of the lower level bounds with sigma = multiplicity
  const Vector sigma = lemma_sigma(c, SchwarzVariant::wash);
  const Vector x(8, 0.0);
  const BoundBox viaP = lower_level_bounds(ops[1].P, sigma, x, ops[1].R.multiply(x), BoundBox(l, u));
  CHECK(viaP.lower()[0] == b.lower()[0]);
  CHECK(viaP.lower()[1] == b.lower()[1]);
}

TEST_CASE("restrict_bounds of an unbounded box") {
  const Covering c = build_block_covering(line(8), 2, 2);
  for (SchwarzVariant v : kVariants) {
    for (const auto& op : build_operators(c, v)) {
      const BoundBox b = restrict_bounds(op.R, BoundBox::unbounded(8));
      for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(b.lower()[i] == -kInf);
        CHECK(b.upper()[i] == kInf);
      }
    }
  }
}

TEST_CASE("restricted bounds coincide with the lower level bounds") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Covering c = random_covering(20, 1 + trial % 5, 100 + trial);
    Vector l(c.n), h(c.n), x(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
      l[i] = trial % 7 == 0 ? -kInf : -1.0 + 0.5 * u(rng);
      h[i] = 1.0 + 0.5 * u(rng);
      x[i] = 0.0;
    }
    for (SchwarzVariant v : kVariants) {
      const CoincidenceStats s = bound_coincidence(c, v, BoundBox(l, h), x);
      CHECK(s.comparisons > 0);
      CHECK(s.max_relative_error <= 1e-14);
    }
  }
}

TEST_CASE("a WASH bound that cancels to zero is measured against x0") {
  // Variable 0 lies in all three subdomains: theta = 3 and l = 0, so the
  // restricted bound is exactly 0 while x0 + (l - x) / 3 is a few ulps off.
  Covering c;
  c.n = 3;
  c.domains = {{0, 1}, {0, 2}, {0}};
  c.partition = {{1}, {2}, {0}};
  const BoundBox box(Vector{0.0, -kInf, -kInf}, Vector{kInf, kInf, kInf});
  const Vector x{2.9, 0.0, 0.0};
  const CoincidenceStats s = bound_coincidence(c, SchwarzVariant::wash, box, x);
  CHECK(s.mismatches > 0);
  CHECK(s.max_relative_error <= 1e-14);
}

TEST_CASE("subdomain objectives") {
  const GridProblem p = membrane(6);
  const auto& f = dynamic_cast<const QuadraticObjective&>(*p.objective);
  const std::size_t n = p.size();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 0.01 * static_cast<double>(i % 7) - 0.02;

  SUBCASE("the full domain reproduces the fine objective") {
    SubdomainObjective s(f, CsrMatrix::identity(n));
    s.rebase(x, x);
    Vector y = x;
    y[3] += 0.25;
    check_vec(s.gradient(y), f.gradient(y), 1e-15);
  }
  SUBCASE("quadratic with a frozen complement") {
    const Covering c = build_block_covering(p.grid, 4, 1);
    const CsrMatrix U = subdomain_injection(c, 2);
    SubdomainObjective s(f, U);
    const Vector y0 = U.multiply_transpose(x);
    s.rebase(x, y0);
    Vector y = y0;
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += 0.003 * static_cast<double>(k);
    // K (x + U (y - y0)) + b, restricted; frozen entries enter through K
    const std::vector<double> K = f.matrix().dense();
    Vector z = x;
    const auto& D = c.domains[2];
    for (std::size_t k = 0; k < D.size(); ++k) z[D[k]] += y[k] - y0[k];
    Vector expected(D.size());
    for (std::size_t k = 0; k < D.size(); ++k) {
      double acc = f.linear()[D[k]];
      for (std::size_t j = 0; j < n; ++j) acc += K[D[k] * n + j] * z[j];
      expected[k] = acc;
    }
    check_vec(s.gradient(y), expected, 1e-13);
  }
  SUBCASE("spliced gradient matches finite differences") {
    const GridProblem m = minsurf(8, {1.0, true});
    const Covering c = build_block_covering(m.grid, 4, 2);
    const CsrMatrix U = subdomain_injection(c, 1);
    SubdomainObjective s(*m.objective, U);
    const Vector xm = m.initial;
    const Vector y0 = U.multiply_transpose(xm);
    s.rebase(xm, y0);
    Vector y = y0;
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += 0.01 * std::sin(static_cast<double>(k));
    const Vector g = s.gradient(y);
    double err = 0.0, mag = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      Vector a = y, b = y;
      a[k] += 1e-6;
      b[k] -= 1e-6;
      const Vector za = add(xm, U.multiply(subtract(a, y0)));
      const Vector zb = add(xm, U.multiply(subtract(b, y0)));
      const double fd = (m.objective->energy(za) - m.objective->energy(zb)) / 2e-6;
      err += (fd - g[k]) * (fd - g[k]);
      mag += g[k] * g[k];
    }
    CHECK(std::sqrt(err / mag) < 1e-6);
  }
}

TEST_CASE("cost_dd") {
  CHECK(cost_dd(40, 100, {100}, {60}) == 100.0);
  const double full = cost_dd(10, 100, {50, 40}, {30, 30});
  const double half = cost_dd(10, 100, {25, 20}, {30, 30});
  CHECK(full - 10 == 2 * (half - 10));
  bool unequal = false;
  CHECK(cost_dd(0, 10, {5, 5}, {3, 4}, &unequal) == 2.0);
  CHECK(unequal);
  cost_dd(0, 10, {5, 5}, {4, 4}, &unequal);
  CHECK_FALSE(unequal);
}

TEST_CASE("decomposition iteration where every subdomain declines") {
  const GridProblem p = membrane(8, {8.0, false});
  DDOptions o;
  o.params.kappa_1st = 1e12;
  o.divide_kappa_1st = false;
  DomainDecompositionSolver dd(*p.objective, p.box, build_block_covering(p.grid, 4, 1), o);
  LevelRun fine(*p.objective, p.box, o.params, 0);
  REQUIRE(fine.start(p.initial, Vector(p.size(), 1e-4), ThetaContract::top(), true));
  CHECK_FALSE(dd.decomposition_step(fine).has_value());
  const Vector x0 = fine.x();
  o.params.taylor_on_nogain = false;
  LevelRun skip(*p.objective, p.box, o.params, 0);
  skip.start(p.initial, Vector(p.size(), 1e-4), ThetaContract::top(), true);
  skip.iterate(IterationType::recursive, [&](LevelRun& r) { return dd.decomposition_step(r); });
  CHECK(skip.x() == x0);
}

TEST_CASE("one subdomain under AS is a recursive call with identity transfers") {
  const GridProblem p = minsurf(8, {8.0, false});
  const std::size_t n = p.size();
  DDOptions o;
  o.variant = SchwarzVariant::as;
  o.subdomain_iterations = 3;
  DomainDecompositionSolver dd(*p.objective, p.box, build_block_covering(p.grid, 1, 0), o);
  const TransferPair ident = TransferPair::from_operators(CsrMatrix::identity(n), CsrMatrix::identity(n));

  LevelRun a(*p.objective, p.box, o.params, 1), b(*p.objective, p.box, o.params, 1);
  a.start(p.initial, Vector(n, 1e-4), ThetaContract::top(), true);
  b.start(p.initial, Vector(n, 1e-4), ThetaContract::top(), true);
  // Early on the weights are close to |d| and every lower level declines.
  for (int k = 0; k < 20; ++k) {
    a.iterate(IterationType::taylor);
    b.iterate(IterationType::taylor);
  }
  a.prepare();
  b.prepare();
  const auto sa = dd.decomposition_step(a);
  const auto sb = recursive_step(b, {&ident, p.objective.get(), 0}, CoarseModel::tau_corrected, false,
                                 nullptr, [](LevelRun& c) {
                                   for (int i = 0; i < 3; ++i)
                                     if (!c.iterate(IterationType::taylor)) break;
                                 });
  REQUIRE(sa.has_value() == sb.has_value());
  REQUIRE(sa.has_value());
  check_vec(*sa, *sb, 1e-13);
}

TEST_CASE("separable problem: one decomposition iteration is M independent solves") {
  const std::size_t n = 12;
  Vector a(n), b(n), l(n), u(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = 1.0 + 0.5 * static_cast<double>(i);
    b[i] = (i % 2 ? 1.0 : -1.0) * (0.5 + 0.1 * static_cast<double>(i));
    l[i] = i % 3 == 0 ? 0.0 : -kInf;
    u[i] = i % 4 == 1 ? 0.1 : kInf;
  }
  const auto f = diagonal(a, b);
  const BoundBox box(l, u);
  const Covering c = build_block_covering(line(n), 3, 0);
  DDOptions o;
  o.subdomain_iterations = 4;
  o.threads = 3;
  DomainDecompositionSolver dd(*f, box, c, o);

  LevelRun fine(*f, box, o.params, 1);
  fine.start(Vector(n, 0.0), Vector(n, 1e-4), ThetaContract::top(), true);
  for (int k = 0; k < 20; ++k) fine.iterate(IterationType::taylor);
  fine.prepare();
  const auto step = dd.decomposition_step(fine);
  REQUIRE(step.has_value());

  const ThetaContract contract = ThetaContract::descent(fine.first_order(), norm(fine.linear()),
                                                        o.params.kappa_1st / 3, o.params.kappa_2nd);
  Vector expected(n, 0.0);
  for (std::size_t p = 0; p < 3; ++p) {
    const auto& D = c.domains[p];
    Vector ap, bp, lp, up, x0, w0, g0;
    for (std::size_t i : D) {
      ap.push_back(a[i]);
      bp.push_back(b[i]);
      lp.push_back(l[i]);
      up.push_back(u[i]);
      x0.push_back(fine.x()[i]);
      w0.push_back(fine.w()[i]);
      g0.push_back(fine.g()[i]);
    }
    const auto fp = diagonal(ap, bp);
    LevelRun run(*fp, BoundBox(lp, up), o.params, 1);
    if (!run.start(x0, w0, contract, false, &g0)) continue;
    for (int k = 0; k < 4; ++k)
      if (!run.iterate(IterationType::taylor)) break;
    for (std::size_t k = 0; k < D.size(); ++k) expected[D[k]] = run.x()[k] - x0[k];
  }
  check_vec(*step, expected, 1e-15);
}

TEST_CASE("decomposition runs do not depend on the thread count") {
  const GridProblem p = membrane(16, {16.0, false});
  auto run = [&](unsigned threads) {
    DDOptions o;
    o.threads = threads;
    o.stop.max_cycles = 15;
    DomainDecompositionSolver dd(*p.objective, p.box, build_block_covering(p.grid, 4, 2), o);
    return dd.run(p.initial);
  };
  const SolveResult a = run(1), b = run(4);
  CHECK(a.x == b.x);
  CHECK(a.cost == b.cost);
}

TEST_CASE("decomposition iterates stay feasible for every variant") {
  const GridProblem p = minsurf(16, {16.0, false});
  for (SchwarzVariant v : kVariants) {
    FeasibilityMonitor mon;
    DDOptions o;
    o.variant = v;
    o.stop.max_cycles = 10;
    DomainDecompositionSolver dd(*p.objective, p.box, build_block_covering(p.grid, 4, 2), o, &mon);
    const SolveResult r = dd.run(p.initial);
    INFO(to_string(v));
    CHECK(mon.infeasible_iterates() == 0);
    CHECK(mon.radius_violations() == 0);
    CHECK(mon.max_raw_violation() <= 1e-12);
    CHECK(p.box.contains(r.x));
    REQUIRE(r.sizes.size() == 5);
    CHECK(r.sizes[0] == p.size());
  }
}

TEST_CASE("membrane desk scale: decomposition cost falls with the subdomain count (pinned)") {
  const GridProblem p = membrane(16, {16.0, false});
  std::vector<double> cost;
  for (int M : {2, 4, 8}) {
    DDOptions o;
    DomainDecompositionSolver dd(*p.objective, p.box, build_block_covering(p.grid, M, 2), o);
    const SolveResult r = dd.run(p.initial);
    REQUIRE(r.converged);
    cost.push_back(r.cost);
  }
  CHECK(cost[1] < cost[0]);
  CHECK(cost[2] < cost[1]);
  CHECK(cost[0] == doctest::Approx(1595.75).epsilon(0.02));
  CHECK(cost[1] == doctest::Approx(1119.79).epsilon(0.02));
  CHECK(cost[2] == doctest::Approx(940.235).epsilon(0.02));
}

TEST_CASE("variant names") {
  for (SchwarzVariant v : kVariants) CHECK(schwarz_variant_from_string(to_string(v)) == v);
  CHECK(schwarz_variant_from_string("wras") == SchwarzVariant::wras);
  CHECK_THROWS_AS(schwarz_variant_from_string("xyz"), ContractError);
}
