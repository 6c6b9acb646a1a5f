#include "offo/adagb2.hpp"

#include <algorithm>
#include <cmath>

#include "offo/kernels.hpp"

namespace offo {

WeightUpdate update_weights(ConstSpan prev_w, ConstSpan d, double floor) {
  require_same_size(prev_w.size(), d.size(), "update_weights");
  WeightUpdate out{Vector(d.size()), Vector(d.size())};
  kernels::active().accumulate_weights(prev_w.data(), d.data(), floor, out.w.data(),
                                       out.delta.data(), d.size());
  return out;
}

double readjust_level_entry(Vector& w, Vector& delta, double theta2) {
  require_same_size(w.size(), delta.size(), "readjust_level_entry");
  if (!(theta2 > 0.0)) throw ContractError("readjust_level_entry: theta2 must be positive");
  const double dn = norm(delta);
  if (dn == 0.0 || dn <= theta2) return 1.0;
  const double factor = dn / theta2;
  const double shrink = theta2 / dn;
  for (double& v : w) v *= factor;
  for (double& v : delta) v *= shrink;
  return factor;
}

double first_order_measure(ConstSpan d, ConstSpan delta) {
  require_same_size(d.size(), delta.size(), "first_order_measure");
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) acc += std::fabs(d[i]) * delta[i];
  return acc;
}

bool nogain_check(ConstSpan d0, ConstSpan delta0, double theta1) {
  return first_order_measure(d0, delta0) < theta1;
}

Vector linear_step(ConstSpan x, ConstSpan g, ConstSpan delta, const BoundBox& box) {
  require_same_size(x.size(), box.size(), "linear_step");
  require_same_size(g.size(), box.size(), "linear_step");
  require_same_size(delta.size(), box.size(), "linear_step");
  Vector s(x.size());
  kernels::active().box_step(x.data(), g.data(), delta.data(), box.lower().data(),
                             box.upper().data(), s.data(), x.size());
  return s;
}

namespace {

double cauchy_scaling_from(double slope, double curv) {
  if (!std::isfinite(curv) || curv <= 0.0) return 1.0;
  return std::min(1.0, -slope / curv);
}

}  // namespace

double cauchy_scaling(ConstSpan g, ConstSpan sL, double curv, bool* nonfinite) {
  if (nonfinite != nullptr) *nonfinite = !std::isfinite(curv);
  return cauchy_scaling_from(dot(g, sL), curv);
}

void cauchy_point(ConstSpan x, ConstSpan g, const CurvatureOracle& curvature,
                  const StepOptions& options, StepBundle& step) {
  const std::size_t n = step.sL.size();
  step.s.assign(n, 0.0);
  step.curvature = 0.0;
  step.slope = 0.0;
  step.curvature_nonfinite = false;
  if (max_abs(step.sL) == 0.0) {
    step.gamma = 1.0;
    return;
  }
  if (options.first_order) {
    step.gamma = options.learning_rate;
    step.slope = dot(g, step.sL);
    for (std::size_t i = 0; i < n; ++i) {
      const double cap = options.kappa_s * step.delta[i];
      step.s[i] = std::clamp(options.learning_rate * step.sL[i], -cap, cap);
    }
    return;
  }
  step.slope = dot(g, step.sL);
  step.curvature = curvature.is_zero() ? 0.0 : curvature(x, step.sL);
  step.curvature_nonfinite = !std::isfinite(step.curvature);
  step.gamma = cauchy_scaling_from(step.slope, step.curvature);
  for (std::size_t i = 0; i < n; ++i) step.s[i] = step.gamma * step.sL[i];
}

StepBundle taylor_step(ConstSpan x, ConstSpan g, ConstSpan delta, const BoundBox& box,
                       const CurvatureOracle& curvature, const StepOptions& options) {
  StepBundle step;
  step.d = criticality_d(x, g, box);
  step.delta.assign(delta.begin(), delta.end());
  step.first_order = first_order_measure(step.d, step.delta);
  step.sL = linear_step(x, g, delta, box);
  cauchy_point(x, g, curvature, options, step);
  return step;
}

bool satisfies_step_conditions(ConstSpan x, const StepBundle& step, const BoundBox& box,
                               const StepOptions& options, double tol) {
  const Vector next = add(x, step.s);
  if (!box.contains(next, tol)) return false;
  for (std::size_t i = 0; i < step.s.size(); ++i) {
    if (std::fabs(step.s[i]) > options.kappa_s * step.delta[i] + tol) return false;
  }
  if (options.first_order) return true;
  // Along the ray of sL the model is q(t) = t slope + t^2 curv / 2; its
  // minimiser on [0, 1] gives the decrease of s^Q.
  const double q = [&](double t) { return t * step.slope + 0.5 * t * t * step.curvature; }(step.gamma);
  const double best = cauchy_scaling_from(step.slope, step.curvature);
  const double qbest = best * step.slope + 0.5 * best * best * step.curvature;
  return q <= options.tau * qbest + tol * std::max(1.0, std::fabs(qbest));
}

}  // namespace offo
