#include <cmath>

#include "helpers.hpp"
#include "offo/noise.hpp"
#include "offo/problems.hpp"

using namespace offo;

TEST_CASE("no noise returns the exact gradient") {
  const GridProblem p = minsurf(8);
  const auto w = wrap_noisy(*p.objective, NoiseSchedule::none(), 1);
  CHECK(w->gradient(p.initial) == p.objective->gradient(p.initial));
  CHECK(&w->exact() == p.objective.get());
}

TEST_CASE("constant schedule: sample variance per component") {
  const GridProblem p = poisson1d(5);  // four unknowns
  const auto w = wrap_noisy(*p.objective, NoiseSchedule::constant(1e-7), 42, 3);
  const Vector exact = p.objective->gradient(p.initial);
  const int calls = 100000;
  Vector sum(p.size(), 0.0), sq(p.size(), 0.0);
  for (int k = 0; k < calls; ++k) {
    const Vector g = w->gradient(p.initial);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double e = g[i] - exact[i];
      sum[i] += e;
      sq[i] += e * e;
    }
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double mean = sum[i] / calls;
    const double var = sq[i] / calls - mean * mean;
    INFO("component " << i << " variance " << var);
    CHECK(std::fabs(var - 1e-7) <= 0.05 * 1e-7);
    CHECK(std::fabs(mean) <= 5.0 * std::sqrt(1e-7 / calls));
  }
}

TEST_CASE("exponential schedule") {
  const NoiseSchedule s = NoiseSchedule::exponential(1e-7, 5e-2);
  CHECK(testing::close(s.variance_at(20), 1e-7 * std::exp(-1.0), 1e-12));
  CHECK(s.variance_at(0) == 1e-7);
  CHECK(NoiseSchedule::constant(3e-5).variance_at(1000) == 3e-5);
  CHECK(NoiseSchedule::none().variance_at(0) == 0.0);
}

TEST_CASE("schedule validation and names") {
  CHECK_THROWS(NoiseSchedule::constant(-1.0).validate());
  CHECK_THROWS(NoiseSchedule::exponential(1e-7, -0.1).validate());
  for (auto k : {NoiseSchedule::Kind::none, NoiseSchedule::Kind::constant, NoiseSchedule::Kind::exponential}) {
    CHECK(noise_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS(noise_kind_from_string("pink"));
}

TEST_CASE("noise streams are reproducible and independent") {
  const GridProblem p = minsurf(8);
  const NoiseSchedule s = NoiseSchedule::constant(1e-4);
  const auto a = wrap_noisy(*p.objective, s, 7, 0);
  const auto b = wrap_noisy(*p.objective, s, 7, 0);
  const auto c = wrap_noisy(*p.objective, s, 7, 1);
  const auto d = wrap_noisy(*p.objective, s, 8, 0);
  for (int k = 0; k < 5; ++k) {
    const Vector ga = a->gradient(p.initial);
    CHECK(ga == b->gradient(p.initial));
    CHECK(ga != c->gradient(p.initial));
    CHECK(ga != d->gradient(p.initial));
  }
  CHECK(mix_key(1, 2, 3) != mix_key(1, 3, 2));
}

TEST_CASE("curvature products are noiseless and evaluations are counted once") {
  const GridProblem p = minsurf(8);
  const auto w = wrap_noisy(*p.objective, NoiseSchedule::constant(1e-2), 1);
  const Vector v(p.size(), 1.0);
  Vector a(p.size()), b(p.size());
  w->hessian_vector(p.initial, v, a);
  p.objective->hessian_vector(p.initial, v, b);
  CHECK(a == b);
  const std::uint64_t inner = p.objective->evaluations();
  w->gradient(p.initial);
  CHECK(w->evaluations() == 2);
  CHECK(p.objective->evaluations() == inner);
}
