#include "offo/problems.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace offo {

double Objective::energy(ConstSpan x) const {
  if (SolverScope::active()) {
    throw ContractError("objective value requested from solver code");
  }
  require_same_size(x.size(), dimension(), "Objective::energy");
  return compute_energy(x);
}

// ---------------------------------------------------------------------------

QuadraticObjective::QuadraticObjective(CsrMatrix K, Vector b, double constant, double scale)
    : Objective(b.size()), K_(std::move(K)), b_(std::move(b)), constant_(constant), scale_(scale) {
  require_same_size(K_.rows(), b_.size(), "QuadraticObjective");
  require_same_size(K_.cols(), b_.size(), "QuadraticObjective");
}

void QuadraticObjective::compute_gradient(ConstSpan x, MutSpan g) const {
  K_.multiply(x, g);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = scale_ * (g[i] + b_[i]);
}

void QuadraticObjective::compute_hessian_vector(ConstSpan, ConstSpan v, MutSpan out) const {
  K_.multiply(v, out);
  for (double& o : out) o *= scale_;
}

double QuadraticObjective::compute_energy(ConstSpan x) const {
  const Vector kx = K_.multiply(x);
  return scale_ * (0.5 * dot(x, kx) + dot(b_, x) + constant_);
}

// ---------------------------------------------------------------------------

double membrane_lower_bound(double x2) {
  const double c = 2.6;
  return (-c + std::sqrt(c * c - 4.0 * ((x2 - 0.5) * (x2 - 0.5) - 1.0 + 1.3 * 1.3))) / 2.0;
}

GridProblem membrane(int cells, const ProblemOptions& options) {
  if (cells < 4) throw ContractError("membrane: need at least 4 cells per direction");
  const int N = cells;
  const double h = 1.0 / N;
  GridProblem p;
  p.name = "membrane";
  p.cells = N;
  // z = 0 on x1 = 0 only; the other three sides are natural boundaries.
  p.grid.axes = {Axis{N, true, false}, Axis{N, false, false}};
  const std::size_t n = p.grid.size();

  static constexpr double ke[4][4] = {{4, -1, -2, -1}, {-1, 4, -1, -2}, {-2, -1, 4, -1}, {-1, -2, -1, 4}};
  std::vector<Triplet> entries;
  Vector b(n, 0.0);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const std::array<std::array<int, 2>, 4> nodes{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
      for (int a = 0; a < 4; ++a) {
        if (nodes[a][0] == 0) continue;
        const std::size_t ra = p.grid.index(nodes[a][0], nodes[a][1]);
        b[ra] += h * h / 4.0;
        for (int c = 0; c < 4; ++c) {
          if (nodes[c][0] == 0) continue;
          entries.push_back({ra, p.grid.index(nodes[c][0], nodes[c][1]), ke[a][c] / 6.0});
        }
      }
    }
  }
  Vector lower(n, -kInf);
  for (int j = 0; j <= N; ++j) lower[p.grid.index(N, j)] = membrane_lower_bound(j * h);
  p.box = BoundBox(std::move(lower), Vector(n, kInf));
  p.initial.assign(n, 0.0);
  p.objective = std::make_shared<QuadraticObjective>(
      CsrMatrix::from_triplets(n, n, std::move(entries)), std::move(b), 0.0, options.scale);
  return p;
}

// ---------------------------------------------------------------------------

double minsurf_lower(double x1, double x2) {
  return 0.25 - 8.0 * (x1 - 0.70) * (x1 - 0.70) - 8.0 * (x2 - 0.70) * (x2 - 0.70);
}

double minsurf_upper(double x1, double x2) {
  return -(0.4 - 8.0 * (x1 - 0.3) * (x1 - 0.3) - 8.0 * (x2 - 0.3) * (x2 - 0.3));
}

double minsurf_boundary(double x1, double x2) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (x1 == 0.0) return -0.3 * std::sin(two_pi * x2);
  if (x1 == 1.0) return 0.3 * std::sin(two_pi * x2);
  if (x2 == 0.0) return -0.3 * std::sin(two_pi * x1);
  if (x2 == 1.0) return 0.3 * std::sin(two_pi * x1);
  throw ContractError("minsurf_boundary: point is not on the boundary");
}

namespace {

// P1 surface energy over two right triangles per cell. The gradient of a P1
// function is constant per triangle, so the centroid rule is exact for both
// integrands.
class MinSurfObjective : public Objective {
 public:
  MinSurfObjective(int cells, bool sqrt_variant, double scale)
      : Objective(static_cast<std::size_t>((cells - 1) * (cells - 1))),
        N_(cells),
        sqrt_(sqrt_variant),
        scale_(scale),
        full_(static_cast<std::size_t>((cells + 1) * (cells + 1)), 0.0) {
    const double h = 1.0 / N_;
    for (int j = 0; j <= N_; ++j) {
      for (int i = 0; i <= N_; ++i) {
        if (i == 0 || j == 0 || i == N_ || j == N_) full_[node(i, j)] = minsurf_boundary(i * h, j * h);
      }
    }
    for (int j = 0; j < N_; ++j) {
      for (int i = 0; i < N_; ++i) {
        triangles_.push_back({{node(i, j), node(i + 1, j), node(i, j + 1)},
                              {{{-1.0 / h, -1.0 / h}, {1.0 / h, 0.0}, {0.0, 1.0 / h}}}});
        triangles_.push_back({{node(i + 1, j + 1), node(i, j + 1), node(i + 1, j)},
                              {{{1.0 / h, 1.0 / h}, {-1.0 / h, 0.0}, {0.0, -1.0 / h}}}});
      }
    }
    area_ = 0.5 * h * h;
  }

  bool has_analytic_hessian_vector() const override { return true; }

 protected:
  void compute_gradient(ConstSpan x, MutSpan g) const override {
    const Vector z = expand(x);
    Vector full_g(full_.size(), 0.0);
    for (const Triangle& t : triangles_) {
      const auto gz = grad(t, z);
      const double q = sqrt_ ? area_ / std::sqrt(1.0 + gz[0] * gz[0] + gz[1] * gz[1]) : 2.0 * area_;
      for (int a = 0; a < 3; ++a) {
        full_g[t.node[a]] += q * (gz[0] * t.dphi[a][0] + gz[1] * t.dphi[a][1]);
      }
    }
    gather(full_g, g);
  }

  void compute_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const override {
    const Vector z = expand(x);
    Vector vf(full_.size(), 0.0);
    scatter(v, vf);
    Vector full_hv(full_.size(), 0.0);
    for (const Triangle& t : triangles_) {
      const auto gv = grad(t, vf);
      std::array<double, 2> flux{};
      if (sqrt_) {
        const auto gz = grad(t, z);
        const double q2 = 1.0 + gz[0] * gz[0] + gz[1] * gz[1];
        const double q = std::sqrt(q2);
        const double zv = gz[0] * gv[0] + gz[1] * gv[1];
        for (int c = 0; c < 2; ++c) flux[c] = area_ * (gv[c] / q - zv * gz[c] / (q2 * q));
      } else {
        for (int c = 0; c < 2; ++c) flux[c] = 2.0 * area_ * gv[c];
      }
      for (int a = 0; a < 3; ++a) {
        full_hv[t.node[a]] += flux[0] * t.dphi[a][0] + flux[1] * t.dphi[a][1];
      }
    }
    gather(full_hv, out);
  }

  double compute_energy(ConstSpan x) const override {
    const Vector z = expand(x);
    double e = 0.0;
    for (const Triangle& t : triangles_) {
      const auto gz = grad(t, z);
      const double s = 1.0 + gz[0] * gz[0] + gz[1] * gz[1];
      e += area_ * (sqrt_ ? std::sqrt(s) : s);
    }
    return scale_ * e;
  }

 private:
  struct Triangle {
    std::array<std::size_t, 3> node;
    std::array<std::array<double, 2>, 3> dphi;
  };

  std::size_t node(int i, int j) const { return static_cast<std::size_t>(j * (N_ + 1) + i); }

  static std::array<double, 2> grad(const Triangle& t, const Vector& z) {
    std::array<double, 2> r{0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
      r[0] += z[t.node[a]] * t.dphi[a][0];
      r[1] += z[t.node[a]] * t.dphi[a][1];
    }
    return r;
  }

  Vector expand(ConstSpan x) const {
    Vector z = full_;
    scatter(x, z);
    return z;
  }

  void scatter(ConstSpan x, Vector& z) const {
    std::size_t k = 0;
    for (int j = 1; j < N_; ++j) {
      for (int i = 1; i < N_; ++i) z[node(i, j)] = x[k++];
    }
  }

  void gather(const Vector& full, MutSpan g) const {
    std::size_t k = 0;
    for (int j = 1; j < N_; ++j) {
      for (int i = 1; i < N_; ++i) g[k++] = scale_ * full[node(i, j)];
    }
  }

  int N_;
  bool sqrt_;
  double scale_;
  double area_ = 0.0;
  Vector full_;
  std::vector<Triangle> triangles_;
};

}  // namespace

GridProblem minsurf(int cells, const ProblemOptions& options) {
  if (cells < 4) throw ContractError("minsurf: need at least 4 cells per direction");
  const int N = cells;
  const double h = 1.0 / N;
  GridProblem p;
  p.name = "minsurf";
  p.cells = N;
  p.grid.axes = {Axis{N, true, true}, Axis{N, true, true}};
  const std::size_t n = p.grid.size();
  Vector lower(n);
  Vector upper(n);
  for (int j = 1; j < N; ++j) {
    for (int i = 1; i < N; ++i) {
      const std::size_t k = p.grid.index(i, j);
      lower[k] = minsurf_lower(i * h, j * h);
      upper[k] = minsurf_upper(i * h, j * h);
      if (lower[k] > upper[k]) {
        std::ostringstream os;
        os << "minsurf: obstacle above ceiling at node (" << i << ", " << j << ")";
        throw ContractError(os.str());
      }
    }
  }
  p.box = BoundBox(std::move(lower), std::move(upper));
  p.initial = project_box(Vector(n, 0.0), p.box);
  p.objective = std::make_shared<MinSurfObjective>(N, options.minsurf_sqrt, options.scale);
  return p;
}

// ---------------------------------------------------------------------------

GridProblem poisson1d(int cells, const ProblemOptions& options) {
  if (cells < 4) throw ContractError("poisson1d: need at least 4 cells");
  const double h = 1.0 / cells;
  GridProblem p;
  p.name = "poisson1d";
  p.cells = cells;
  p.grid.axes = {Axis{cells, true, true}};
  const std::size_t n = p.grid.size();
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back({i, i, 2.0 / h});
    if (i > 0) entries.push_back({i, i - 1, -1.0 / h});
    if (i + 1 < n) entries.push_back({i, i + 1, -1.0 / h});
  }
  p.box = BoundBox(Vector(n, -kInf), Vector(n, 0.1));
  p.initial.assign(n, 0.0);
  p.objective = std::make_shared<QuadraticObjective>(CsrMatrix::from_triplets(n, n, std::move(entries)),
                                                     Vector(n, -h), 0.0, options.scale);
  return p;
}

// ---------------------------------------------------------------------------

SyntheticObstacle::SyntheticObstacle(std::vector<double> A, Vector b)
    : Objective(b.size()), A_(std::move(A)), b_(std::move(b)) {
  require_same_size(A_.size(), b_.size() * b_.size(), "SyntheticObstacle");
}

void SyntheticObstacle::compute_gradient(ConstSpan x, MutSpan g) const {
  const std::size_t n = b_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += A_[i * n + j] * x[j];
    g[i] = acc - b_[i];
  }
}

void SyntheticObstacle::compute_hessian_vector(ConstSpan, ConstSpan v, MutSpan out) const {
  const std::size_t n = b_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += A_[i * n + j] * v[j];
    out[i] = acc;
  }
}

double SyntheticObstacle::compute_energy(ConstSpan x) const {
  const std::size_t n = b_.size();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += A_[i * n + j] * x[j];
    e += 0.5 * x[i] * acc - b_[i] * x[i];
  }
  return e;
}

SyntheticInstance synthetic_quadratic_obstacle(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ContractError("synthetic_quadratic_obstacle: n must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::MatrixXd G(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) G(i, j) = normal(rng);
  }
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  Eigen::VectorXd lambda(n);
  for (std::size_t i = 0; i < n; ++i) lambda(i) = 1.0 + 9.0 * unit(rng);
  const Eigen::MatrixXd A = Q * lambda.asDiagonal() * Q.transpose();

  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = 0.5 * (A(i, j) + A(j, i));
  }
  Vector b(n);
  for (double& v : b) v = 2.0 * normal(rng);
  Vector lower(n);
  Vector upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = unit(rng) < 1.0 / 3.0 ? -kInf : -1.5 * unit(rng);
    upper[i] = unit(rng) < 1.0 / 3.0 ? kInf : 1.5 * unit(rng);
  }

  SyntheticInstance inst;
  inst.objective = std::make_shared<SyntheticObstacle>(std::move(a), std::move(b));
  inst.problem.name = "synthetic";
  inst.problem.cells = static_cast<int>(n) + 1;
  inst.problem.grid.axes = {Axis{static_cast<int>(n) + 1, true, true}};
  inst.problem.box = BoundBox(std::move(lower), std::move(upper));
  inst.problem.initial.assign(n, 0.0);
  inst.problem.objective = inst.objective;
  return inst;
}

Vector kkt_enumeration_solution(const SyntheticObstacle& f, const BoundBox& box) {
  const std::size_t n = f.dimension();
  if (n > 12) throw ContractError("kkt_enumeration_solution: n too large for enumeration");
  const std::vector<double>& a = f.matrix();
  const Vector& b = f.rhs();
  const double tol = 1e-10;

  std::vector<int> state(n, 0);  // 0 free, 1 lower, 2 upper
  std::size_t patterns = 1;
  for (std::size_t i = 0; i < n; ++i) patterns *= 3;
  for (std::size_t code = 0; code < patterns; ++code) {
    std::size_t c = code;
    bool usable = true;
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if ((state[i] == 1 && !std::isfinite(box.lower()[i])) ||
          (state[i] == 2 && !std::isfinite(box.upper()[i]))) {
        usable = false;
      }
    }
    if (!usable) continue;

    Vector x(n, 0.0);
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == 0) free.push_back(i);
      if (state[i] == 1) x[i] = box.lower()[i];
      if (state[i] == 2) x[i] = box.upper()[i];
    }
    if (!free.empty()) {
      const auto m = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd Aff(m, m);
      Eigen::VectorXd rhs(m);
      for (Eigen::Index r = 0; r < m; ++r) {
        const std::size_t i = free[static_cast<std::size_t>(r)];
        double acc = b[i];
        for (std::size_t j = 0; j < n; ++j) {
          if (state[j] != 0) acc -= a[i * n + j] * x[j];
        }
        rhs(r) = acc;
        for (Eigen::Index q = 0; q < m; ++q) Aff(r, q) = a[i * n + free[static_cast<std::size_t>(q)]];
      }
      const Eigen::VectorXd xf = Aff.llt().solve(rhs);
      for (Eigen::Index r = 0; r < m; ++r) x[free[static_cast<std::size_t>(r)]] = xf(r);
    }

    bool kkt = true;
    for (std::size_t i = 0; i < n && kkt; ++i) {
      double g = -b[i];
      for (std::size_t j = 0; j < n; ++j) g += a[i * n + j] * x[j];
      if (state[i] == 0) kkt = x[i] >= box.lower()[i] - tol && x[i] <= box.upper()[i] + tol;
      if (state[i] == 1) kkt = g >= -tol;
      if (state[i] == 2) kkt = g <= tol;
    }
    if (kkt) return project_box(x, box);
  }
  throw NumericalError("kkt_enumeration_solution: no pattern satisfied the KKT conditions");
}

// ---------------------------------------------------------------------------

GridProblem make_problem(const std::string& name, int cells, const ProblemOptions& options) {
  if (name == "membrane") return membrane(cells, options);
  if (name == "minsurf") return minsurf(cells, options);
  if (name == "poisson1d") return poisson1d(cells, options);
  throw ContractError("unknown problem '" + name + "'");
}

Hierarchy build_hierarchy(const std::string& name, int cells, int num_levels,
                          const ProblemOptions& options) {
  if (num_levels < 1) throw ContractError("build_hierarchy: need at least one level");
  Hierarchy h;
  std::vector<int> sizes(static_cast<std::size_t>(num_levels));
  int c = cells;
  for (int l = num_levels - 1; l >= 0; --l) {
    sizes[static_cast<std::size_t>(l)] = c;
    if (l > 0) {
      if (c % 2 != 0) throw ContractError("build_hierarchy: mesh cannot be coarsened that often");
      c /= 2;
    }
  }
  for (int s : sizes) h.levels.push_back(make_problem(name, s, options));
  for (std::size_t l = 1; l < h.levels.size(); ++l) {
    h.transfers.push_back(build_linear_interpolation(h.levels[l].grid, h.levels[l - 1].grid));
  }
  return h;
}

}  // namespace offo
