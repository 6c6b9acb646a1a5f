#pragma once

// Single-level step engine: AdaGrad-like weights, the scaled box around the
// iterate, the projected linear step and its Cauchy scaling. The same
// functions are used at every level of a hierarchy and inside every subdomain.

#include "offo/core.hpp"

namespace offo {

// Weights that would vanish (restricted from an all-zero row) are lifted to
// this floor so that delta = |d| / w stays defined.
inline constexpr double kWeightFloor = 1e-12;

struct WeightUpdate {
  Vector w;
  Vector delta;
};

// w_i = sqrt(prev_w_i^2 + d_i^2), delta_i = |d_i| / w_i (delta_i in [0, 1]).
WeightUpdate update_weights(ConstSpan prev_w, ConstSpan d, double floor = kWeightFloor);

// Entry readjustment below the top level: caps ||delta|| at theta2 by
// inflating the weights. Returns the factor applied to w (1 when unchanged).
double readjust_level_entry(Vector& w, Vector& delta, double theta2);

// |d|^T delta = sum_i d_i^2 / w_i. Non-negative by construction.
double first_order_measure(ConstSpan d, ConstSpan delta);

// True when the lower level cannot promise the requested first-order gain.
bool nogain_check(ConstSpan d0, ConstSpan delta0, double theta1);

// s^L = P_{F n B}(x - g) - x with B the box |y_i - x_i| <= delta_i.
Vector linear_step(ConstSpan x, ConstSpan g, ConstSpan delta, const BoundBox& box);

// gamma = min(1, -g^T sL / curv) for curv > 0, else 1. A non-finite curvature
// takes the second branch and sets *nonfinite.
double cauchy_scaling(ConstSpan g, ConstSpan sL, double curv, bool* nonfinite = nullptr);

struct StepOptions {
  double kappa_s = 1.0;
  double tau = 1.0;
  // First-order mode: skip curvature and take s = learning_rate * sL.
  bool first_order = false;
  double learning_rate = 1e-2;
};

struct StepBundle {
  Vector d;
  Vector delta;
  Vector sL;
  double gamma = 1.0;
  Vector s;
  double first_order = 0.0;   // |d|^T delta
  double slope = 0.0;         // g^T sL
  double curvature = 0.0;     // sL^T B sL
  bool curvature_nonfinite = false;
};

// Scales an already computed linear step into the Taylor step s = gamma * sL.
void cauchy_point(ConstSpan x, ConstSpan g, const CurvatureOracle& curvature,
                  const StepOptions& options, StepBundle& step);

// Full Taylor iteration from (x, g, delta): d, sL, gamma, s.
StepBundle taylor_step(ConstSpan x, ConstSpan g, ConstSpan delta, const BoundBox& box,
                       const CurvatureOracle& curvature, const StepOptions& options = {});

// Checks the three step conditions: x + s feasible (to tol), |s_i| <= kappa_s
// delta_i, and model decrease no worse than tau times that of s^Q.
bool satisfies_step_conditions(ConstSpan x, const StepBundle& step, const BoundBox& box,
                               const StepOptions& options, double tol = 1e-12);

}  // namespace offo
