#include "offo/noise.hpp"

#include <cmath>
#include <random>

namespace offo {

NoiseSchedule NoiseSchedule::constant(double variance) {
  NoiseSchedule s{Kind::constant, variance, 0.0};
  s.validate();
  return s;
}

NoiseSchedule NoiseSchedule::exponential(double variance0, double decay) {
  NoiseSchedule s{Kind::exponential, variance0, decay};
  s.validate();
  return s;
}

double NoiseSchedule::variance_at(std::uint64_t k) const {
  switch (kind) {
    case Kind::none:
      return 0.0;
    case Kind::constant:
      return variance;
    case Kind::exponential:
      return variance * std::exp(-decay * static_cast<double>(k));
  }
  return 0.0;
}

void NoiseSchedule::validate() const {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw ContractError("noise schedule: variance must be finite and nonnegative");
  }
  if (!(decay >= 0.0) || !std::isfinite(decay)) {
    throw ContractError("noise schedule: decay rate must be finite and nonnegative");
  }
}

std::string to_string(NoiseSchedule::Kind kind) {
  switch (kind) {
    case NoiseSchedule::Kind::none:
      return "none";
    case NoiseSchedule::Kind::constant:
      return "constant";
    case NoiseSchedule::Kind::exponential:
      return "exponential";
  }
  return "none";
}

NoiseSchedule::Kind noise_kind_from_string(const std::string& s) {
  if (s == "none") return NoiseSchedule::Kind::none;
  if (s == "constant") return NoiseSchedule::Kind::constant;
  if (s == "exponential") return NoiseSchedule::Kind::exponential;
  throw ContractError("unknown noise schedule '" + s + "'");
}

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t call) {
  // splitmix64 finalizer applied to a running combination of the key parts.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ call);
}

NoisyOracle::NoisyOracle(const GradientOracle& inner, NoiseSchedule schedule, std::uint64_t seed,
                         std::uint64_t stream)
    : GradientOracle(inner.dimension()),
      inner_(inner),
      schedule_(schedule),
      seed_(seed),
      stream_(stream) {
  schedule_.validate();
}

void NoisyOracle::compute_gradient(ConstSpan x, MutSpan g) const {
  inner_.gradient_uncounted(x, g);
  const std::uint64_t k = calls_.fetch_add(1);
  const double var = schedule_.variance_at(k);
  if (var == 0.0) return;
  std::mt19937_64 rng(mix_key(seed_, stream_, k));
  std::normal_distribution<double> normal(0.0, std::sqrt(var));
  for (double& v : g) v += normal(rng);
}

void NoisyOracle::compute_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const {
  inner_.hessian_vector_uncounted(x, v, out);
}

std::unique_ptr<GradientOracle> wrap_noisy(const GradientOracle& oracle, const NoiseSchedule& schedule,
                                           std::uint64_t seed, std::uint64_t stream) {
  return std::make_unique<NoisyOracle>(oracle, schedule, seed, stream);
}

}  // namespace offo
