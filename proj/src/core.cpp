#include "offo/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "offo/kernels.hpp"

namespace offo {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ContractError(os.str());
  }
}

double dot(ConstSpan a, ConstSpan b) {
  require_same_size(a.size(), b.size(), "dot");
  return kernels::active().dot(a.data(), b.data(), a.size());
}

double norm(ConstSpan a) { return std::sqrt(dot(a, a)); }

double max_abs(ConstSpan a) { return kernels::active().max_abs(a.data(), a.size()); }

void axpy(double a, ConstSpan x, MutSpan y) {
  require_same_size(x.size(), y.size(), "axpy");
  kernels::active().axpy(a, x.data(), y.data(), x.size());
}

Vector add(ConstSpan a, ConstSpan b) {
  require_same_size(a.size(), b.size(), "add");
  Vector r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Vector subtract(ConstSpan a, ConstSpan b) {
  require_same_size(a.size(), b.size(), "subtract");
  Vector r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Vector scaled(double a, ConstSpan x) {
  Vector r(x.begin(), x.end());
  for (double& v : r) v *= a;
  return r;
}

bool all_finite(ConstSpan a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------

BoundBox::BoundBox(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  require_same_size(lower_.size(), upper_.size(), "BoundBox");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || lower_[i] > upper_[i]) {
      std::ostringstream os;
      os << "BoundBox: invalid bounds at index " << i << " [" << lower_[i] << ", " << upper_[i]
         << "]";
      throw ContractError(os.str());
    }
  }
}

BoundBox BoundBox::unbounded(std::size_t n) { return BoundBox(Vector(n, -kInf), Vector(n, kInf)); }

bool BoundBox::contains(ConstSpan x, double tol) const {
  if (x.size() != size()) return false;
  return max_violation(x) <= tol;
}

double BoundBox::max_violation(ConstSpan x) const {
  require_same_size(x.size(), size(), "BoundBox::max_violation");
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i])) return kInf;
    v = std::max({v, lower_[i] - x[i], x[i] - upper_[i]});
  }
  return v;
}

Vector project_box(ConstSpan x, const BoundBox& box) {
  require_same_size(x.size(), box.size(), "project_box");
  Vector out(x.size());
  kernels::active().clamp(x.data(), box.lower().data(), box.upper().data(), out.data(), x.size());
  return out;
}

Vector criticality_d(ConstSpan x, ConstSpan g, const BoundBox& box) {
  require_same_size(x.size(), box.size(), "criticality_d");
  require_same_size(g.size(), box.size(), "criticality_d");
  if (!box.contains(x)) {
    std::ostringstream os;
    os << "criticality_d: iterate violates its bounds by " << box.max_violation(x);
    throw ContractError(os.str());
  }
  Vector d(x.size());
  kernels::active().projected_direction(x.data(), g.data(), box.lower().data(),
                                        box.upper().data(), d.data(), x.size());
  return d;
}

double criticality_xi(ConstSpan x, ConstSpan exact_g, const BoundBox& box) {
  return norm(criticality_d(x, exact_g, box));
}

// ---------------------------------------------------------------------------

void GradientOracle::gradient(ConstSpan x, MutSpan g) const {
  require_same_size(x.size(), n_, "GradientOracle::gradient");
  require_same_size(g.size(), n_, "GradientOracle::gradient");
  charge(1);
  compute_gradient(x, g);
}

Vector GradientOracle::gradient(ConstSpan x) const {
  Vector g(n_);
  gradient(x, g);
  return g;
}

void GradientOracle::gradient_uncounted(ConstSpan x, MutSpan g) const {
  require_same_size(x.size(), n_, "GradientOracle::gradient_uncounted");
  compute_gradient(x, g);
}

void GradientOracle::hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const {
  if (has_analytic_hessian_vector()) {
    charge(1);
    compute_hessian_vector(x, v, out);
  } else {
    finite_difference_hessian_vector(x, v, out, true);
  }
}

void GradientOracle::hessian_vector_uncounted(ConstSpan x, ConstSpan v, MutSpan out) const {
  if (has_analytic_hessian_vector()) {
    compute_hessian_vector(x, v, out);
  } else {
    finite_difference_hessian_vector(x, v, out, false);
  }
}

void GradientOracle::hessian_vector_fd(ConstSpan x, ConstSpan v, MutSpan out) const {
  finite_difference_hessian_vector(x, v, out, true);
}

void GradientOracle::compute_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const {
  finite_difference_hessian_vector(x, v, out, false);
}

void GradientOracle::finite_difference_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out,
                                                      bool counted) const {
  require_same_size(x.size(), n_, "hessian_vector");
  require_same_size(v.size(), n_, "hessian_vector");
  require_same_size(out.size(), n_, "hessian_vector");
  const double vn = norm(v);
  if (vn == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double h = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, norm(x));
  Vector xp(x.begin(), x.end());
  Vector xm(x.begin(), x.end());
  for (std::size_t i = 0; i < n_; ++i) {
    xp[i] += h * v[i] / vn;
    xm[i] -= h * v[i] / vn;
  }
  Vector gp(n_);
  Vector gm(n_);
  if (counted) {
    gradient(xp, gp);
    gradient(xm, gm);
  } else {
    compute_gradient(xp, gp);
    compute_gradient(xm, gm);
  }
  const double scale = vn / (2.0 * h);
  for (std::size_t i = 0; i < n_; ++i) out[i] = (gp[i] - gm[i]) * scale;
}

double CurvatureOracle::operator()(ConstSpan x, ConstSpan s) const {
  if (is_zero()) return 0.0;
  Vector hs(s.size());
  if (mode_ == Mode::finite_difference) {
    f_->hessian_vector_fd(x, s, hs);
  } else {
    f_->hessian_vector(x, s, hs);
  }
  return dot(s, hs);
}

namespace {
thread_local int solver_depth = 0;
}  // namespace

SolverScope::SolverScope() : saved_(solver_depth) { ++solver_depth; }
SolverScope::~SolverScope() { solver_depth = saved_; }
bool SolverScope::active() { return solver_depth > 0; }

ReportingScope::ReportingScope() : saved_(solver_depth) { solver_depth = 0; }
ReportingScope::~ReportingScope() { solver_depth = saved_; }

}  // namespace offo
