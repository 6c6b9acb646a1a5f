#include <random>

#include "helpers.hpp"
#include "offo/core.hpp"
#include "offo/problems.hpp"

using namespace offo;
using testing::check_vec;

namespace {

BoundBox random_box(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::bernoulli_distribution open(0.25);
  Vector l(n), h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u(rng), b = u(rng);
    l[i] = open(rng) ? -kInf : std::min(a, b);
    h[i] = open(rng) ? kInf : std::max(a, b);
  }
  return BoundBox(l, h);
}

Vector random_vector(std::mt19937_64& rng, std::size_t n, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("project_box clamps componentwise") {
  BoundBox box({-1, -1, -1}, {1, 1, 1});
  check_vec(project_box(Vector{2, -3, 0.5}, box), Vector{1, -1, 0.5});
}

TEST_CASE("project_box leaves feasible points unchanged") {
  BoundBox box({-1, 0, -kInf}, {1, 2, 5});
  const Vector x{0.25, 2.0, -100.0};
  CHECK(project_box(x, box) == x);
}

TEST_CASE("project_box with a one-sided bound") {
  BoundBox box({-kInf}, {0.3});
  CHECK(project_box(Vector{0.7}, box) == Vector{0.3});
}

TEST_CASE("criticality_d unconstrained is the negative gradient") {
  CHECK(criticality_d(Vector{0, 0}, Vector{1, -2}, BoundBox::unbounded(2)) == Vector{-1, 2});
}

TEST_CASE("criticality_d with an active upper bound") {
  BoundBox box({-kInf}, {0.5});
  CHECK(criticality_d(Vector{0}, Vector{-1}, box) == Vector{0.5});
}

TEST_CASE("criticality_d vanishes for a zero gradient") {
  BoundBox box({-1, -1}, {1, 1});
  CHECK(criticality_d(Vector{0.3, 1.0}, Vector{0, 0}, box) == Vector{0, 0});
}

TEST_CASE("criticality_d rejects infeasible iterates") {
  BoundBox box({0}, {1});
  CHECK_THROWS_AS(criticality_d(Vector{2}, Vector{0}, box), ContractError);
}

TEST_CASE("criticality_xi unconstrained equals the gradient norm") {
  const Vector G{3, -4, 12};
  CHECK(criticality_xi(Vector{1, 2, 3}, G, BoundBox::unbounded(3)) == doctest::Approx(13.0).epsilon(1e-15));
}

TEST_CASE("criticality_xi at the interior minimiser of a 1D quadratic") {
  // f = (x - 0.2)^2, minimiser 0.2 inside [-1, 1]
  const double x = 0.2;
  CHECK(criticality_xi(Vector{x}, Vector{2 * (x - 0.2)}, BoundBox({-1}, {1})) == 0.0);
}

TEST_CASE("criticality_xi with an active upper bound") {
  CHECK(criticality_xi(Vector{0}, Vector{-1}, BoundBox({-kInf}, {0.5})) == 0.5);
}

TEST_CASE("projection properties on random boxes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const BoundBox box = random_box(rng, n);
    const Vector a = random_vector(rng, n, 5.0);
    const Vector b = random_vector(rng, n, 5.0);
    const Vector pa = project_box(a, box);
    const Vector pb = project_box(b, box);
    CHECK(box.contains(pa));
    CHECK(project_box(pa, box) == pa);
    CHECK(norm(subtract(pa, pb)) <= norm(subtract(a, b)) * (1 + 1e-15));
  }
}

TEST_CASE("projected direction is a descent direction") {
  // g^T d <= -||d||^2 for x feasible (variational inequality of the projection)
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const BoundBox box = random_box(rng, n);
    const Vector x = project_box(random_vector(rng, n), box);
    const Vector g = random_vector(rng, n);
    const Vector d = criticality_d(x, g, box);
    CHECK(dot(g, d) <= -dot(d, d) + 1e-12);
    CHECK(box.contains(add(x, d), 1e-12));
    CHECK(criticality_xi(x, g, box) == doctest::Approx(norm(d)).epsilon(1e-15));
  }
}

TEST_CASE("BoundBox validation and violation") {
  CHECK_THROWS_AS(BoundBox({1}, {0}), ContractError);
  CHECK_THROWS_AS(BoundBox({0, 0}, {1}), ContractError);
  BoundBox box({0, -kInf}, {1, 2});
  CHECK(box.max_violation(Vector{1.5, -1e300}) == 0.5);
  CHECK(box.max_violation(Vector{0.5, 3.25}) == 1.25);
  CHECK(box.max_violation(Vector{0.5, 0.0}) == 0.0);
}

TEST_CASE("gradient oracle charges one evaluation per gradient") {
  auto p = poisson1d(8);
  const GradientOracle& f = *p.objective;
  const std::uint64_t before = f.evaluations();
  f.gradient(p.initial);
  f.gradient(p.initial);
  Vector out(p.size());
  f.gradient_uncounted(p.initial, out);
  CHECK(f.evaluations() - before == 2);
  f.hessian_vector(p.initial, Vector(p.size(), 1.0), out);
  CHECK(f.evaluations() - before == 3);  // analytic: one
  f.hessian_vector_fd(p.initial, Vector(p.size(), 1.0), out);
  CHECK(f.evaluations() - before == 5);  // central differences: two
}

TEST_CASE("objective values are refused inside solver code") {
  auto p = poisson1d(8);
  CHECK_NOTHROW(p.objective->energy(p.initial));
  SolverScope scope;
  CHECK_THROWS_AS(p.objective->energy(p.initial), ContractError);
  {
    ReportingScope reporting;
    CHECK_NOTHROW(p.objective->energy(p.initial));
  }
  CHECK_THROWS_AS(p.objective->energy(p.initial), ContractError);
}
