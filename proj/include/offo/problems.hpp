#pragma once

// Benchmark energies. Every objective exposes its gradient through the
// GradientOracle interface; objective values are available for reporting
// only and are refused while a SolverScope is open.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "offo/core.hpp"
#include "offo/sparse.hpp"
#include "offo/transfer.hpp"

namespace offo {

class Objective : public GradientOracle {
 public:
  using GradientOracle::GradientOracle;

  // Throws ContractError when called from solver code.
  double energy(ConstSpan x) const;

 protected:
  virtual double compute_energy(ConstSpan x) const = 0;
};

// f(x) = scale * (1/2 x^T K x + b^T x) + c with K symmetric.
class QuadraticObjective : public Objective {
 public:
  QuadraticObjective(CsrMatrix K, Vector b, double constant = 0.0, double scale = 1.0);

  bool has_analytic_hessian_vector() const override { return true; }
  const CsrMatrix& matrix() const { return K_; }
  const Vector& linear() const { return b_; }
  double scale() const { return scale_; }

 protected:
  void compute_gradient(ConstSpan x, MutSpan g) const override;
  void compute_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const override;
  double compute_energy(ConstSpan x) const override;

 private:
  CsrMatrix K_;
  Vector b_;
  double constant_;
  double scale_;
};

struct ProblemOptions {
  // Constant factor applied to the energy on every level.
  double scale = 1.0;
  // MinSurf integrand sqrt(1 + |grad z|^2) instead of 1 + |grad z|^2.
  bool minsurf_sqrt = false;
};

struct GridProblem {
  std::string name;
  int cells = 0;
  TensorGrid grid;
  BoundBox box;
  Vector initial;
  std::shared_ptr<const Objective> objective;

  std::size_t size() const { return box.size(); }
};

// Lower obstacle on the right edge of the membrane.
double membrane_lower_bound(double x2);

GridProblem membrane(int cells, const ProblemOptions& options = {});

double minsurf_lower(double x1, double x2);
double minsurf_upper(double x1, double x2);
double minsurf_boundary(double x1, double x2);

GridProblem minsurf(int cells, const ProblemOptions& options = {});

// -z'' = 1 on (0, 1) with z(0) = z(1) = 0 (P1 elements) and the obstacle
// z >= -0.1. Small convex test case with a 1D grid hierarchy.
GridProblem poisson1d(int cells, const ProblemOptions& options = {});

// Dense random obstacle problem 1/2 x^T A x - b^T x on a random box.
class SyntheticObstacle : public Objective {
 public:
  SyntheticObstacle(std::vector<double> A, Vector b);

  bool has_analytic_hessian_vector() const override { return true; }
  const std::vector<double>& matrix() const { return A_; }  // row-major n x n
  const Vector& rhs() const { return b_; }

 protected:
  void compute_gradient(ConstSpan x, MutSpan g) const override;
  void compute_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const override;
  double compute_energy(ConstSpan x) const override;

 private:
  std::vector<double> A_;
  Vector b_;
};

struct SyntheticInstance {
  GridProblem problem;
  std::shared_ptr<const SyntheticObstacle> objective;
};

// A has eigenvalues in [1, 10]; roughly a third of the bounds are infinite.
SyntheticInstance synthetic_quadratic_obstacle(std::size_t n, std::uint64_t seed);

// Brute force over every free/lower/upper pattern. Requires n <= 12.
Vector kkt_enumeration_solution(const SyntheticObstacle& f, const BoundBox& box);

// Builds a problem by name ("membrane", "minsurf", "poisson1d").
GridProblem make_problem(const std::string& name, int cells, const ProblemOptions& options = {});

// levels[0] is the coarsest; transfers[l - 1] links levels l and l - 1.
struct Hierarchy {
  std::vector<GridProblem> levels;
  std::vector<TransferPair> transfers;

  const GridProblem& finest() const { return levels.back(); }
};

Hierarchy build_hierarchy(const std::string& name, int cells, int num_levels,
                          const ProblemOptions& options = {});

}  // namespace offo
