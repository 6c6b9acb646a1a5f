#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace offo {

using Vector = std::vector<double>;
using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Thrown for violated preconditions that indicate a programming error
// (dimension mismatch, infeasible iterate handed to the solver, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Thrown when a gradient or curvature evaluation produced NaN/Inf.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_same_size(std::size_t a, std::size_t b, const char* what);

// ---------------------------------------------------------------------------
// Small vector helpers routed through the active SIMD kernel table.

double dot(ConstSpan a, ConstSpan b);
double norm(ConstSpan a);
double max_abs(ConstSpan a);
void axpy(double a, ConstSpan x, MutSpan y);
Vector add(ConstSpan a, ConstSpan b);
Vector subtract(ConstSpan a, ConstSpan b);
Vector scaled(double a, ConstSpan x);
bool all_finite(ConstSpan a);

// ---------------------------------------------------------------------------

// Per-variable bounds [lower_i, upper_i]; either side may be infinite.
class BoundBox {
 public:
  BoundBox() = default;
  BoundBox(Vector lower, Vector upper);

  static BoundBox unbounded(std::size_t n);

  std::size_t size() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(ConstSpan x, double tol = 0.0) const;

  // Largest amount by which x leaves the box (0 when feasible).
  double max_violation(ConstSpan x) const;

  friend bool operator==(const BoundBox&, const BoundBox&) = default;

 private:
  Vector lower_;
  Vector upper_;
};

Vector project_box(ConstSpan x, const BoundBox& box);

// d = P_F(x - g) - x. Throws ContractError if x is outside the box.
Vector criticality_d(ConstSpan x, ConstSpan g, const BoundBox& box);

// ||P_F(x - G) - x|| for the exact gradient G.
double criticality_xi(ConstSpan x, ConstSpan exact_g, const BoundBox& box);

// ---------------------------------------------------------------------------

// Approximate-gradient source for one objective. Values of the objective are
// never requested by the solvers.
//
// Every gradient() call counts as one evaluation. Hessian-vector products
// count as one evaluation when the oracle overrides them analytically and as
// two gradient evaluations when the central-difference fallback is used.
// Counters are atomic so one oracle may be shared by concurrent subdomain
// solves.
class GradientOracle {
 public:
  explicit GradientOracle(std::size_t n) : n_(n) {}
  GradientOracle(const GradientOracle&) = delete;
  GradientOracle& operator=(const GradientOracle&) = delete;
  virtual ~GradientOracle() = default;

  std::size_t dimension() const { return n_; }

  void gradient(ConstSpan x, MutSpan g) const;
  Vector gradient(ConstSpan x) const;

  // Reporting path: no charge. Solvers must not use it.
  void gradient_uncounted(ConstSpan x, MutSpan g) const;

  // H(x) v, analytic when available, otherwise central differences of the
  // gradient with step sqrt(eps) * max(1, ||x||) along v/||v||.
  void hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const;
  void hessian_vector_uncounted(ConstSpan x, ConstSpan v, MutSpan out) const;
  // Always the central-difference estimate, charged as two evaluations.
  void hessian_vector_fd(ConstSpan x, ConstSpan v, MutSpan out) const;

  virtual bool has_analytic_hessian_vector() const { return false; }

  // The noiseless oracle behind this one (itself unless wrapped).
  virtual const GradientOracle& exact() const { return *this; }

  std::uint64_t evaluations() const { return evaluations_.load(std::memory_order_relaxed); }
  void charge(std::uint64_t k) const { evaluations_.fetch_add(k, std::memory_order_relaxed); }
  void reset_evaluations() { evaluations_.store(0, std::memory_order_relaxed); }

 protected:
  virtual void compute_gradient(ConstSpan x, MutSpan g) const = 0;
  virtual void compute_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const;

 private:
  void finite_difference_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out,
                                        bool counted) const;

  std::size_t n_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
};

// Estimates s^T B s for the Cauchy scaling.
class CurvatureOracle {
 public:
  enum class Mode {
    automatic,          // analytic Hessian-vector product if available, else central FD
    finite_difference,  // always central FD of the gradient
    zero,               // B = 0 (first-order mode)
  };

  CurvatureOracle() = default;
  CurvatureOracle(const GradientOracle& f, Mode mode = Mode::automatic) : f_(&f), mode_(mode) {}

  Mode mode() const { return mode_; }
  bool is_zero() const { return mode_ == Mode::zero || f_ == nullptr; }

  double operator()(ConstSpan x, ConstSpan s) const;

 private:
  const GradientOracle* f_ = nullptr;
  Mode mode_ = Mode::zero;
};

// Marks the current thread as running solver code. Objective values may not
// be requested while a scope is open; reporting code opens a ReportingScope
// to lift the guard for its own evaluations.
class SolverScope {
 public:
  SolverScope();
  ~SolverScope();
  SolverScope(const SolverScope&) = delete;
  SolverScope& operator=(const SolverScope&) = delete;

  static bool active();

 private:
  int saved_;
};

class ReportingScope {
 public:
  ReportingScope();
  ~ReportingScope();
  ReportingScope(const ReportingScope&) = delete;
  ReportingScope& operator=(const ReportingScope&) = delete;

 private:
  int saved_;
};

}  // namespace offo
