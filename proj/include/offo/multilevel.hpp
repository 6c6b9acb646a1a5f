#pragma once

// Level engine shared by every driver, and the recursive multilevel driver.
//
// A LevelRun holds the state of one level instance (iterate, weights, first
// gradient and step). Drivers decide the type of each iteration; recursive
// and decomposition iterations are supplied as callbacks that return the
// prolongated step, or nothing when the lower problem declined (nogain).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "offo/adagb2.hpp"
#include "offo/core.hpp"
#include "offo/problems.hpp"
#include "offo/transfer.hpp"

namespace offo {

struct Parameters {
  double varsigma = 0.01;  // top-level weights start at varsigma^2
  double kappa_1st = 0.95;
  double kappa_2nd = 10.0;
  double kappa_gs = 1.0;
  StepOptions step;
  CurvatureOracle::Mode curvature = CurvatureOracle::Mode::automatic;
  double weight_floor = kWeightFloor;
  // Replace a declined recursive or decomposition iteration by a Taylor
  // iteration that reuses the gradient already computed.
  bool taylor_on_nogain = true;

  void validate() const;
};

struct ThetaContract {
  double theta1 = 0.0;
  double theta2 = kInf;

  static ThetaContract top() { return {}; }
  static ThetaContract descent(double first_order, double linear_step_norm, double kappa_1st,
                               double kappa_2nd);
};

enum class IterationType { taylor, recursive };

struct IterateEvent {
  int level;
  int subdomain;  // -1 outside decomposition solves
  std::size_t k;
  IterationType type;
  bool fallback;  // recursive iteration replaced by a Taylor iteration
  ConstSpan x;    // accepted iterate x_{k+1}
  const BoundBox& box;
  double raw_violation;  // before the final clamp into the box
  double d_norm;
};

struct EntryEvent {
  int level;
  int subdomain;
  ThetaContract contract;
  double first_order;
  double delta_norm;  // after readjustment
  bool nogain;
};

class Observer {
 public:
  virtual ~Observer() = default;
  virtual void on_iterate(const IterateEvent&) {}
  virtual void on_entry(const EntryEvent&) {}
};

class LevelRun {
 public:
  using Recursion = std::function<std::optional<Vector>(LevelRun&)>;

  LevelRun(const GradientOracle& model, BoundBox box, const Parameters& params, int level,
           Observer* observer = nullptr, int subdomain = -1);

  // Iteration 0 up to the choice of step: gradient (or the one handed down),
  // weights, and below the top the readjustment and the nogain test. Returns
  // false when nogain fired; x() then stays at x0.
  bool start(Vector x0, Vector w_init, ThetaContract contract, bool top,
             const Vector* initial_gradient = nullptr);

  // One iteration. Returns false when the slope condition rejected x_{k+1};
  // the level must then return x().
  bool iterate(IterationType type, const Recursion& recurse = {});

  const Vector& x() const { return x_; }
  const Vector& x0() const { return x0_; }
  const Vector& w() const { return w_; }
  const Vector& delta() const { return delta_; }
  const Vector& g() const { return g_; }
  const Vector& d() const { return d_; }
  const Vector& linear() const { return sL_; }
  const BoundBox& box() const { return box_; }
  const Parameters& params() const { return params_; }
  const GradientOracle& model() const { return model_; }
  std::size_t k() const { return k_; }
  int level() const { return level_; }
  int subdomain() const { return subdomain_; }
  bool is_top() const { return top_; }
  bool stopped() const { return stopped_; }
  double first_order() const;
  std::size_t nonfinite_curvatures() const { return nonfinite_curvatures_; }
  std::size_t fallbacks() const { return fallbacks_; }

  // Prepares the gradient-dependent quantities of the next iteration
  // without stepping. Called by iterate(); exposed for drivers that need
  // the current d before choosing the iteration type.
  void prepare();

 private:
  void refresh_direction();

  const GradientOracle& model_;
  BoundBox box_;
  Parameters params_;
  CurvatureOracle curvature_;
  int level_;
  int subdomain_;
  Observer* observer_;

  bool top_ = true;
  bool prepared_ = false;
  bool stopped_ = false;
  std::size_t k_ = 0;
  Vector x0_, x_, w_, delta_, g_, d_, sL_;
  Vector g0_;
  double g0s0_ = 0.0;
  std::size_t nonfinite_curvatures_ = 0;
  std::size_t fallbacks_ = 0;
};

// ---------------------------------------------------------------------------
// Coarse models.

// h(x) = (target - g_c(x0))^T (x - x0) + f_c(x). The shift needs one coarse
// gradient at x0, evaluated on first use and counted with the model's calls.
// The wrapped oracle is called through its uncounted path; callers transfer
// evaluations() to the level's counter.
class TauCorrectedModel : public GradientOracle {
 public:
  TauCorrectedModel(const GradientOracle& coarse, Vector target, Vector x0);

  bool has_analytic_hessian_vector() const override { return coarse_.has_analytic_hessian_vector(); }

 protected:
  void compute_gradient(ConstSpan x, MutSpan g) const override;
  void compute_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const override;

 private:
  const GradientOracle& coarse_;
  Vector target_;
  Vector x0_;
  mutable std::optional<Vector> shift_;
};

std::unique_ptr<GradientOracle> tau_correct(const GradientOracle& coarse, Vector target, Vector x0);

// h(y) = (R g)^T s + 1/2 s^T (R B P) s with s = y - y0, B the curvature of
// the fine model at x_fine. The fine products are not charged; each call of
// the model itself counts as one coarse evaluation.
class GalerkinModel : public GradientOracle {
 public:
  GalerkinModel(const GradientOracle& fine, Vector x_fine, const TransferPair& pair,
                ConstSpan g_fine, Vector y0);

  bool has_analytic_hessian_vector() const override { return true; }
  const Vector& restricted_gradient() const { return rg_; }

 protected:
  void compute_gradient(ConstSpan y, MutSpan g) const override;
  void compute_hessian_vector(ConstSpan y, ConstSpan v, MutSpan out) const override;

 private:
  Vector apply(ConstSpan v) const;  // R B P v

  const GradientOracle& fine_;
  Vector x_fine_;
  const TransferPair& pair_;
  Vector rg_;
  Vector y0_;
};

enum class CoarseModel { tau_corrected, galerkin };

std::string to_string(CoarseModel m);
CoarseModel coarse_model_from_string(const std::string& s);

// What a recursive iteration needs to know about the level below.
struct CoarseSpace {
  const TransferPair* pair = nullptr;
  const GradientOracle* oracle = nullptr;  // f at the coarse level (counts its evaluations)
  int level = 0;
};

// Step 3 of a recursive iteration at `fine`: restricts the state, builds the
// coarse bounds and model, runs `run_coarse` on the started coarse level and
// returns the prolongated correction. Returns nothing on nogain.
std::optional<Vector> recursive_step(LevelRun& fine, const CoarseSpace& coarse, CoarseModel model,
                                     bool truncation, Observer* observer,
                                     const std::function<void(LevelRun&)>& run_coarse);

// ---------------------------------------------------------------------------
// Cost accounting and the top-level loop.

// sum_l (n_l / n_r) #_l
double cost_ml(const std::vector<std::size_t>& sizes, const std::vector<std::uint64_t>& counts);

struct StopRule {
  double absolute = 1e-7;
  double relative = 1e-9;
  std::size_t max_cycles = 100000;
};

struct CycleRecord {
  std::size_t cycle = 0;
  double d_norm = 0.0;
  double xi_norm = 0.0;
  double cost = 0.0;
  std::vector<std::uint64_t> evaluations;
};

struct SolveResult {
  Vector x;
  double xi0 = 0.0;
  bool converged = false;
  std::string stop_reason;
  std::vector<CycleRecord> history;
  std::vector<std::size_t> sizes;  // per level or per subdomain, matching evaluations
  double cost = 0.0;
  bool event_e = false;  // ||d_{r,0}||^2 >= varsigma
  std::size_t nonfinite_curvatures = 0;
  std::size_t fallbacks = 0;
  std::size_t unequal_subdomain_counts = 0;

  std::size_t cycles() const { return history.size(); }
};

using CycleCallback = std::function<void(const CycleRecord&, ConstSpan x)>;

// ||P_F(x - G) - x|| with the exact gradient, not charged.
double exact_criticality(const GradientOracle& oracle, ConstSpan x, const BoundBox& box);

struct VCycleSchedule {
  int pre = 3;
  int post = 3;
  int coarsest = 5;
};

struct MultilevelOptions {
  Parameters params;
  VCycleSchedule schedule;
  CoarseModel model = CoarseModel::tau_corrected;
  bool truncation = false;
  StopRule stop;
};

struct LevelSpec {
  const GradientOracle* oracle = nullptr;  // model at this level, counts evaluations
  BoundBox box;                            // used at the top level only
  std::size_t size = 0;
};

// levels[0] coarsest, levels.back() finest; transfers[l - 1] links l and l - 1.
// With a single level this is the plain single-level method, one iteration
// per cycle.
class MultilevelSolver {
 public:
  MultilevelSolver(std::vector<LevelSpec> levels, std::vector<TransferPair> transfers,
                   MultilevelOptions options, Observer* observer = nullptr);

  SolveResult run(Vector x0, const CycleCallback& on_cycle = {});

  // Iteration types at one level for one visit (top: per cycle).
  std::vector<IterationType> schedule_for(int level) const;

 private:
  void run_level(LevelRun& run);
  std::optional<Vector> descend(LevelRun& fine);
  std::vector<std::uint64_t> counts() const;

  std::vector<LevelSpec> levels_;
  std::vector<TransferPair> transfers_;
  MultilevelOptions options_;
  Observer* observer_;
  std::vector<std::uint64_t> baseline_;
};

// Convenience for a single objective and box.
SolveResult solve_adagb2(const GradientOracle& oracle, const BoundBox& box, Vector x0,
                         const Parameters& params, const StopRule& stop, Observer* observer = nullptr,
                         const CycleCallback& on_cycle = {});

}  // namespace offo
