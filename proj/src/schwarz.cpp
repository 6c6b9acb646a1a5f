#include "offo/schwarz.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace offo {

void Covering::validate() const {
  if (domains.empty()) throw ContractError("covering: no subdomains");
  if (partition.size() != domains.size()) {
    throw ContractError("covering: need one partition block per subdomain");
  }
  std::vector<int> owner(n, 0);
  std::vector<bool> covered(n, false);
  for (std::size_t p = 0; p < domains.size(); ++p) {
    const auto& D = domains[p];
    if (D.empty()) throw ContractError("covering: empty subdomain");
    if (!std::is_sorted(D.begin(), D.end()) || std::adjacent_find(D.begin(), D.end()) != D.end()) {
      throw ContractError("covering: subdomain indices must be sorted and unique");
    }
    if (D.back() >= n) throw ContractError("covering: index out of range");
    for (std::size_t j : D) covered[j] = true;
    for (std::size_t j : partition[p]) {
      if (!std::binary_search(D.begin(), D.end(), j)) {
        throw ContractError("covering: partition block leaves its subdomain");
      }
      ++owner[j];
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!covered[j]) throw ContractError("covering: variable not covered");
    if (owner[j] != 1) throw ContractError("covering: partition blocks must be disjoint and exhaustive");
  }
}

std::vector<int> Covering::multiplicity() const {
  std::vector<int> theta(n, 0);
  for (const auto& D : domains) {
    for (std::size_t j : D) ++theta[j];
  }
  return theta;
}

namespace {

// [begin, end) of part q of `len` items split into `parts`, first remainders
// one longer.
std::pair<int, int> split(int len, int parts, int q) {
  const int base = len / parts;
  const int extra = len % parts;
  const int begin = q * base + std::min(q, extra);
  return {begin, begin + base + (q < extra ? 1 : 0)};
}

}  // namespace

Covering build_block_covering(const TensorGrid& grid, int num_subdomains, int overlap) {
  if (num_subdomains < 1) throw ContractError("block covering: need at least one subdomain");
  if (overlap < 0) throw ContractError("block covering: overlap must be nonnegative");
  if (grid.dimension() < 1 || grid.dimension() > 2) {
    throw ContractError("block covering: grid must be 1D or 2D");
  }
  int px = num_subdomains;
  int py = 1;
  if (grid.dimension() == 2) {
    for (int d = 1; d * d <= num_subdomains; ++d) {
      if (num_subdomains % d == 0) py = d;
    }
    px = num_subdomains / py;
  }
  const int nx = static_cast<int>(grid.axes[0].size());
  const int ny = grid.dimension() == 2 ? static_cast<int>(grid.axes[1].size()) : 1;
  if (px > nx || py > ny) {
    std::ostringstream os;
    os << "block covering: " << num_subdomains << " subdomains do not fit a " << nx << "x" << ny
       << " grid";
    throw ContractError(os.str());
  }

  Covering c;
  c.n = grid.size();
  for (int qy = 0; qy < py; ++qy) {
    for (int qx = 0; qx < px; ++qx) {
      const auto [x0, x1] = split(nx, px, qx);
      const auto [y0, y1] = split(ny, py, qy);
      const int ex0 = std::max(0, x0 - overlap), ex1 = std::min(nx, x1 + overlap);
      const int ey0 = std::max(0, y0 - overlap), ey1 = std::min(ny, y1 + overlap);
      std::vector<std::size_t> D, hatD;
      for (int j = ey0; j < ey1; ++j) {
        for (int i = ex0; i < ex1; ++i) {
          const std::size_t idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                                  static_cast<std::size_t>(i);
          D.push_back(idx);
          if (i >= x0 && i < x1 && j >= y0 && j < y1) hatD.push_back(idx);
        }
      }
      c.domains.push_back(std::move(D));
      c.partition.push_back(std::move(hatD));
    }
  }
  c.validate();
  return c;
}

std::string to_string(SchwarzVariant v) {
  switch (v) {
    case SchwarzVariant::as:
      return "AS";
    case SchwarzVariant::ras:
      return "RAS";
    case SchwarzVariant::wras:
      return "WRAS";
    case SchwarzVariant::ash:
      return "ASH";
    case SchwarzVariant::rash:
      return "RASH";
    case SchwarzVariant::wash:
      return "WASH";
  }
  return "AS";
}

SchwarzVariant schwarz_variant_from_string(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char ch) { return std::toupper(ch); });
  for (SchwarzVariant v : {SchwarzVariant::as, SchwarzVariant::ras, SchwarzVariant::wras,
                           SchwarzVariant::ash, SchwarzVariant::rash, SchwarzVariant::wash}) {
    if (to_string(v) == u) return v;
  }
  throw ContractError("unknown Schwarz variant '" + s + "'");
}

namespace {

// n x n_p matrix with column k = value(j) e_j for j = D_p[k], skipped when
// value(j) is zero.
template <class F>
CsrMatrix injection_like(const Covering& c, std::size_t p, F value) {
  if (p >= c.size()) throw ContractError("subdomain index out of range");
  const auto& D = c.domains[p];
  std::vector<Triplet> t;
  t.reserve(D.size());
  for (std::size_t k = 0; k < D.size(); ++k) {
    const double v = value(D[k]);
    if (v != 0.0) t.push_back({D[k], k, v});
  }
  return CsrMatrix::from_triplets(c.n, D.size(), std::move(t));
}

}  // namespace

CsrMatrix subdomain_injection(const Covering& c, std::size_t p) {
  return injection_like(c, p, [](std::size_t) { return 1.0; });
}

CsrMatrix subdomain_restricted_injection(const Covering& c, std::size_t p) {
  const auto& hat = c.partition.at(p);
  return injection_like(c, p, [&](std::size_t j) {
    return std::binary_search(hat.begin(), hat.end(), j) ? 1.0 : 0.0;
  });
}

CsrMatrix subdomain_weighted_injection(const Covering& c, std::size_t p) {
  const std::vector<int> theta = c.multiplicity();
  return injection_like(c, p, [&](std::size_t j) { return 1.0 / theta[j]; });
}

std::vector<SubdomainOperators> build_operators(const Covering& c, SchwarzVariant variant) {
  c.validate();
  std::vector<SubdomainOperators> ops;
  for (std::size_t p = 0; p < c.size(); ++p) {
    CsrMatrix U = subdomain_injection(c, p);
    SubdomainOperators op;
    switch (variant) {
      case SchwarzVariant::as:
        op.P = U;
        op.R = U.transpose();
        break;
      case SchwarzVariant::ras:
        op.P = subdomain_restricted_injection(c, p);
        op.R = U.transpose();
        break;
      case SchwarzVariant::wras:
        op.P = subdomain_weighted_injection(c, p);
        op.R = U.transpose();
        break;
      case SchwarzVariant::ash:
        op.P = U;
        op.R = subdomain_restricted_injection(c, p).transpose();
        break;
      case SchwarzVariant::rash: {
        CsrMatrix hat = subdomain_restricted_injection(c, p);
        op.R = hat.transpose();
        op.P = std::move(hat);
        break;
      }
      case SchwarzVariant::wash:
        op.P = U;
        op.R = subdomain_weighted_injection(c, p).transpose();
        break;
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

BoundBox restrict_bounds(const CsrMatrix& R, const BoundBox& box) {
  require_same_size(R.cols(), box.size(), "restrict_bounds");
  Vector lo(R.rows(), -kInf), hi(R.rows(), kInf);
  for (std::size_t r = 0; r < R.rows(); ++r) {
    const std::size_t begin = R.row_begin()[r], end = R.row_begin()[r + 1];
    if (begin == end) continue;
    double a = 0.0, b = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const double v = R.values()[k];
      const std::size_t j = R.col_index()[k];
      a += v * (v > 0.0 ? box.lower()[j] : box.upper()[j]);
      b += v * (v > 0.0 ? box.upper()[j] : box.lower()[j]);
    }
    lo[r] = a;
    hi[r] = b;
  }
  return BoundBox(std::move(lo), std::move(hi));
}

Vector lemma_sigma(const Covering& c, SchwarzVariant variant) {
  Vector s(c.n, 1.0);
  if (variant == SchwarzVariant::wash) {
    const std::vector<int> theta = c.multiplicity();
    for (std::size_t i = 0; i < c.n; ++i) s[i] = theta[i];
  }
  return s;
}

Vector stacked_sigma(const std::vector<SubdomainOperators>& ops, std::size_t n) {
  Vector s(n, 0.0);
  for (const auto& op : ops) {
    require_same_size(op.P.rows(), n, "stacked_sigma");
    const Vector r = op.P.row_sums();
    for (std::size_t i = 0; i < n; ++i) s[i] += r[i];
  }
  for (double& v : s) {
    if (v == 0.0) v = 1.0;
  }
  return s;
}

std::vector<bool> coupled_components(const SubdomainOperators& op) {
  const std::size_t np = op.P.cols();
  require_same_size(op.R.rows(), np, "coupled_components");
  std::vector<bool> column(np, false), both(np, false);
  for (std::size_t k = 0; k < op.P.nonzeros(); ++k) column[op.P.col_index()[k]] = true;
  for (std::size_t r = 0; r < np; ++r) {
    both[r] = column[r] && op.R.row_begin()[r] != op.R.row_begin()[r + 1];
  }
  return both;
}

// ---------------------------------------------------------------------------

SubdomainObjective::SubdomainObjective(const GradientOracle& fine, CsrMatrix U)
    : GradientOracle(U.cols()), fine_(fine), U_(std::move(U)), Ut_(U_.transpose()) {
  require_same_size(U_.rows(), fine.dimension(), "SubdomainObjective");
  x_.assign(U_.rows(), 0.0);
  y0_.assign(U_.cols(), 0.0);
}

void SubdomainObjective::rebase(Vector x, Vector y0) {
  require_same_size(x.size(), U_.rows(), "SubdomainObjective::rebase");
  require_same_size(y0.size(), U_.cols(), "SubdomainObjective::rebase");
  x_ = std::move(x);
  y0_ = std::move(y0);
}

Vector SubdomainObjective::splice(ConstSpan y) const {
  Vector z = x_;
  const Vector dz = U_.multiply(subtract(y, y0_));
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += dz[i];
  return z;
}

void SubdomainObjective::compute_gradient(ConstSpan y, MutSpan g) const {
  Vector G(x_.size());
  fine_.gradient_uncounted(splice(y), G);
  Ut_.multiply(G, g);
}

void SubdomainObjective::compute_hessian_vector(ConstSpan y, ConstSpan v, MutSpan out) const {
  Vector hv(x_.size());
  fine_.hessian_vector_uncounted(splice(y), U_.multiply(v), hv);
  Ut_.multiply(hv, out);
}

double cost_dd(std::uint64_t fine_count, std::size_t n, const std::vector<std::size_t>& sizes,
               const std::vector<std::uint64_t>& counts, bool* unequal) {
  require_same_size(sizes.size(), counts.size(), "cost_dd");
  if (n == 0) throw ContractError("cost_dd: empty problem");
  const std::size_t nmax = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  const std::uint64_t cmax = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  if (unequal != nullptr) {
    *unequal = !counts.empty() &&
               *std::min_element(counts.begin(), counts.end()) != cmax;
  }
  return static_cast<double>(fine_count) +
         static_cast<double>(nmax) / static_cast<double>(n) * static_cast<double>(cmax);
}

// ---------------------------------------------------------------------------

namespace {

// Serializes observer callbacks coming from concurrent subdomain solves.
class LockedObserver : public Observer {
 public:
  explicit LockedObserver(Observer* inner) : inner_(inner) {}
  void on_iterate(const IterateEvent& e) override {
    std::lock_guard lock(mu_);
    inner_->on_iterate(e);
  }
  void on_entry(const EntryEvent& e) override {
    std::lock_guard lock(mu_);
    inner_->on_entry(e);
  }

 private:
  Observer* inner_;
  std::mutex mu_;
};

}  // namespace

DomainDecompositionSolver::DomainDecompositionSolver(const GradientOracle& fine, BoundBox box,
                                                     Covering covering, DDOptions options,
                                                     Observer* observer)
    : fine_(fine),
      box_(std::move(box)),
      covering_(std::move(covering)),
      options_(std::move(options)),
      observer_(observer) {
  require_same_size(covering_.n, fine_.dimension(), "DomainDecompositionSolver");
  require_same_size(box_.size(), fine_.dimension(), "DomainDecompositionSolver");
  options_.params.validate();
  options_.noise.validate();
  if (options_.decomposition_iterations < 0 || options_.taylor_iterations < 0 ||
      options_.decomposition_iterations + options_.taylor_iterations < 1) {
    throw ContractError("DomainDecompositionSolver: a cycle needs at least one iteration");
  }
  if (options_.subdomain_iterations < 1) {
    throw ContractError("DomainDecompositionSolver: subdomain iterations must be positive");
  }
  ops_ = build_operators(covering_, options_.variant);
  sigma_ = stacked_sigma(ops_, covering_.n);
  for (std::size_t p = 0; p < ops_.size(); ++p) {
    fallback_.push_back(restrict_bounds(ops_[p].R, box_));
    local_.push_back(std::make_unique<SubdomainObjective>(fine_.exact(),
                                                          subdomain_injection(covering_, p)));
    if (options_.noise.kind != NoiseSchedule::Kind::none) {
      noisy_.push_back(wrap_noisy(*local_.back(), options_.noise, options_.seed, p + 1));
    }
  }
  shares_.assign(ops_.size(), 0);
}

const GradientOracle& DomainDecompositionSolver::oracle(std::size_t p) const {
  return noisy_.empty() ? static_cast<const GradientOracle&>(*local_[p]) : *noisy_[p];
}

std::vector<std::size_t> DomainDecompositionSolver::subdomain_sizes() const {
  std::vector<std::size_t> s;
  for (const auto& D : covering_.domains) s.push_back(D.size());
  return s;
}

std::vector<std::uint64_t> DomainDecompositionSolver::subdomain_counts() const {
  std::vector<std::uint64_t> c;
  for (std::size_t p = 0; p < ops_.size(); ++p) c.push_back(oracle(p).evaluations() + shares_[p]);
  return c;
}

std::optional<Vector> DomainDecompositionSolver::decomposition_step(LevelRun& fine) {
  const std::size_t M = ops_.size();
  const Parameters& params = options_.params;
  const double k1 = options_.divide_kappa_1st ? params.kappa_1st / static_cast<double>(M)
                                              : params.kappa_1st;
  const ThetaContract contract =
      ThetaContract::descent(fine.first_order(), norm(fine.linear()), k1, params.kappa_2nd);

  // The fine gradient of this iteration is assembled from subdomain work.
  ++reassigned_;
  for (auto& s : shares_) ++s;

  std::unique_ptr<LockedObserver> locked;
  Observer* obs = observer_;
  if (obs != nullptr) {
    locked = std::make_unique<LockedObserver>(observer_);
    obs = locked.get();
  }

  std::vector<std::optional<Vector>> steps(M);
  std::vector<std::exception_ptr> errors(M);
  const Vector& x = fine.x();
  auto solve = [&](std::size_t p) {
    try {
      SolverScope scope;
      const SubdomainOperators& op = ops_[p];
      RestrictedState rs = restrict_state(op.R, x, fine.w(), params.weight_floor);
      BoundBox box = lower_level_bounds(op.P, sigma_, x, rs.x0, box_, fallback_[p]);
      local_[p]->rebase(x, rs.x0);
      const Vector initial = local_[p]->injection().multiply_transpose(fine.g());
      LevelRun run(oracle(p), std::move(box), params, fine.level(), obs, static_cast<int>(p));
      const Vector y0 = rs.x0;
      if (!run.start(std::move(rs.x0), std::move(rs.w), contract, false, &initial)) return;
      for (int i = 0; i < options_.subdomain_iterations; ++i) {
        if (!run.iterate(IterationType::taylor)) break;
      }
      steps[p] = prolong_step(op.P, subtract(run.x(), y0));
    } catch (...) {
      errors[p] = std::current_exception();
    }
  };

  unsigned threads = options_.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(M));
  if (threads <= 1) {
    for (std::size_t p = 0; p < M; ++p) solve(p);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t p = t; p < M; p += threads) solve(p);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Fixed summation order keeps the result independent of the schedule.
  std::optional<Vector> total;
  for (std::size_t p = 0; p < M; ++p) {
    if (!steps[p]) continue;
    if (!total) {
      total = std::move(*steps[p]);
    } else {
      axpy(1.0, *steps[p], *total);
    }
  }
  return total;
}

SolveResult DomainDecompositionSolver::run(Vector x0, const CycleCallback& on_cycle) {
  SolverScope scope;
  const Parameters& params = options_.params;
  const std::size_t n = fine_.dimension();
  const std::uint64_t fine_base = fine_.evaluations();
  const std::uint64_t reassigned_base = reassigned_;
  std::vector<std::uint64_t> sub_base = subdomain_counts();

  SolveResult result;
  const std::vector<std::size_t> sizes = subdomain_sizes();
  result.sizes.push_back(n);
  result.sizes.insert(result.sizes.end(), sizes.begin(), sizes.end());

  auto counts = [&] {
    std::vector<std::uint64_t> c = subdomain_counts();
    for (std::size_t p = 0; p < c.size(); ++p) c[p] -= sub_base[p];
    return c;
  };
  auto fine_count = [&] {
    return fine_.evaluations() - fine_base - (reassigned_ - reassigned_base);
  };

  LevelRun run(fine_, box_, params, 0, observer_);
  run.start(std::move(x0), Vector(n, params.varsigma * params.varsigma), ThetaContract::top(), true);
  const double d0 = norm(run.d());
  result.event_e = d0 * d0 >= params.varsigma;
  result.xi0 = exact_criticality(fine_, run.x(), box_);

  auto record = [&](std::size_t cycle, double dn, double xi) {
    CycleRecord rec;
    rec.cycle = cycle;
    rec.d_norm = dn;
    rec.xi_norm = xi;
    // Fine level first, then the subdomains.
    std::vector<std::uint64_t> sub = counts();
    bool unequal = false;
    const std::uint64_t fc = fine_count();
    rec.cost = cost_dd(fc, n, sizes, sub, &unequal);
    if (unequal) ++result.unequal_subdomain_counts;
    rec.evaluations.push_back(fc);
    rec.evaluations.insert(rec.evaluations.end(), sub.begin(), sub.end());
    result.history.push_back(rec);
    if (on_cycle) on_cycle(rec, run.x());
  };
  record(0, d0, result.xi0);

  const StopRule& stop = options_.stop;
  auto converged = [&](double xi) {
    if (xi < stop.absolute) {
      result.stop_reason = "absolute";
      return true;
    }
    if (result.xi0 > 0.0 && xi / result.xi0 < stop.relative) {
      result.stop_reason = "relative";
      return true;
    }
    return false;
  };
  result.converged = converged(result.xi0);
  const auto decompose = [this](LevelRun& r) { return decomposition_step(r); };
  for (std::size_t cycle = 1; !result.converged && cycle <= stop.max_cycles; ++cycle) {
    for (int i = 0; i < options_.decomposition_iterations; ++i) {
      run.iterate(IterationType::recursive, decompose);
    }
    for (int i = 0; i < options_.taylor_iterations; ++i) run.iterate(IterationType::taylor);
    const double xi = exact_criticality(fine_, run.x(), box_);
    record(cycle, norm(run.d()), xi);
    result.converged = converged(xi);
  }
  if (!result.converged) result.stop_reason = "budget";
  result.x = run.x();
  result.cost = result.history.back().cost;
  result.nonfinite_curvatures = run.nonfinite_curvatures();
  result.fallbacks = run.fallbacks();
  return result;
}

}  // namespace offo
