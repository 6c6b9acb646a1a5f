#pragma once

// Additive Gaussian gradient noise.

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "offo/core.hpp"

namespace offo {

struct NoiseSchedule {
  enum class Kind { none, constant, exponential };

  Kind kind = Kind::none;
  double variance = 0.0;  // sigma^2, or sigma_0^2 for the exponential schedule
  double decay = 0.0;     // lambda

  static NoiseSchedule none() { return {}; }
  static NoiseSchedule constant(double variance);
  static NoiseSchedule exponential(double variance0, double decay);

  // sigma_k^2 for the k-th call (k counted from 0).
  double variance_at(std::uint64_t k) const;
  void validate() const;
};

std::string to_string(NoiseSchedule::Kind kind);
NoiseSchedule::Kind noise_kind_from_string(const std::string& s);

// Adds i.i.d. N(0, sigma_k^2) noise to every component of the wrapped
// oracle's gradient. The draw for call k depends only on (seed, stream, k),
// so separate wrappers for separate levels or subdomains give reproducible
// streams regardless of thread scheduling. Curvature products are taken from
// the wrapped oracle without noise.
class NoisyOracle : public GradientOracle {
 public:
  NoisyOracle(const GradientOracle& inner, NoiseSchedule schedule, std::uint64_t seed,
              std::uint64_t stream = 0);

  bool has_analytic_hessian_vector() const override { return inner_.has_analytic_hessian_vector(); }
  const GradientOracle& exact() const override { return inner_.exact(); }
  const NoiseSchedule& schedule() const { return schedule_; }
  std::uint64_t calls() const { return calls_.load(); }

 protected:
  void compute_gradient(ConstSpan x, MutSpan g) const override;
  void compute_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const override;

 private:
  const GradientOracle& inner_;
  NoiseSchedule schedule_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

std::unique_ptr<GradientOracle> wrap_noisy(const GradientOracle& oracle, const NoiseSchedule& schedule,
                                           std::uint64_t seed, std::uint64_t stream = 0);

// Key mixing used to seed the per-call generator.
std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t call);

}  // namespace offo
