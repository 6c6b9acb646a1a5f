#include "offo/multilevel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace offo {

void Parameters::validate() const {
  auto fail = [](const std::string& what) { throw ContractError("parameters: " + what); };
  if (!(varsigma > 0.0)) fail("varsigma must be positive");
  if (!(kappa_1st > 0.0)) fail("kappa_1st must be positive");
  if (!(kappa_2nd > 0.0)) fail("kappa_2nd must be positive");
  if (!(kappa_gs > 0.0 && kappa_gs <= 1.0)) fail("kappa_gs must lie in (0, 1]");
  if (!(step.kappa_s >= 1.0)) fail("kappa_s must be at least 1");
  if (!(step.tau > 0.0 && step.tau <= 1.0)) fail("tau must lie in (0, 1]");
  if (step.first_order && !(step.learning_rate > 0.0)) fail("learning rate must be positive");
  if (!(weight_floor > 0.0)) fail("weight floor must be positive");
}

ThetaContract ThetaContract::descent(double first_order, double linear_step_norm, double kappa_1st,
                                     double kappa_2nd) {
  return {kappa_1st * first_order, kappa_2nd * linear_step_norm};
}

// ---------------------------------------------------------------------------

LevelRun::LevelRun(const GradientOracle& model, BoundBox box, const Parameters& params, int level,
                   Observer* observer, int subdomain)
    : model_(model),
      box_(std::move(box)),
      params_(params),
      curvature_(params.step.first_order ? CurvatureOracle()
                                         : CurvatureOracle(model, params.curvature)),
      level_(level),
      subdomain_(subdomain),
      observer_(observer) {
  require_same_size(model.dimension(), box_.size(), "LevelRun");
}

double LevelRun::first_order() const { return first_order_measure(d_, delta_); }

void LevelRun::refresh_direction() {
  if (!all_finite(g_)) {
    std::ostringstream os;
    os << "non-finite gradient at level " << level_;
    if (subdomain_ >= 0) os << ", subdomain " << subdomain_;
    os << ", iteration " << k_;
    throw NumericalError(os.str());
  }
  d_ = criticality_d(x_, g_, box_);
}

bool LevelRun::start(Vector x0, Vector w_init, ThetaContract contract, bool top,
                     const Vector* initial_gradient) {
  require_same_size(x0.size(), box_.size(), "LevelRun::start");
  require_same_size(w_init.size(), box_.size(), "LevelRun::start");
  if (!box_.contains(x0)) {
    std::ostringstream os;
    os << "LevelRun::start: starting point violates the bounds by " << box_.max_violation(x0);
    throw ContractError(os.str());
  }
  top_ = top;
  stopped_ = false;
  k_ = 0;
  x0_ = x0;
  x_ = std::move(x0);
  if (initial_gradient != nullptr) {
    require_same_size(initial_gradient->size(), box_.size(), "LevelRun::start");
    g_ = *initial_gradient;
  } else {
    g_ = model_.gradient(x_);
  }
  refresh_direction();
  WeightUpdate wu = update_weights(w_init, d_, params_.weight_floor);
  w_ = std::move(wu.w);
  delta_ = std::move(wu.delta);

  bool nogain = false;
  if (!top) {
    if (std::isfinite(contract.theta2)) readjust_level_entry(w_, delta_, contract.theta2);
    nogain = nogain_check(d_, delta_, contract.theta1);
  }
  const double fo = first_order();
  const double dn = norm(delta_);
  if (observer_ != nullptr) observer_->on_entry({level_, subdomain_, contract, fo, dn, nogain});
  if (nogain) return false;
  if (!top && !(dn <= contract.theta2 * (1.0 + 1e-12))) {
    throw ContractError("LevelRun::start: scaled radius exceeds the inherited bound");
  }
  sL_ = linear_step(x_, g_, delta_, box_);
  prepared_ = true;
  return true;
}

void LevelRun::prepare() {
  if (prepared_) return;
  model_.gradient(x_, g_);
  refresh_direction();
  WeightUpdate wu = update_weights(w_, d_, params_.weight_floor);
  w_ = std::move(wu.w);
  delta_ = std::move(wu.delta);
  sL_ = linear_step(x_, g_, delta_, box_);
  prepared_ = true;
}

bool LevelRun::iterate(IterationType type, const Recursion& recurse) {
  if (stopped_) throw ContractError("LevelRun::iterate: level already returned");
  prepare();

  Vector s;
  bool fallback = false;
  bool taylor = type == IterationType::taylor;
  if (!taylor) {
    std::optional<Vector> step = recurse ? recurse(*this) : std::nullopt;
    if (step) {
      s = std::move(*step);
    } else if (params_.taylor_on_nogain) {
      fallback = true;
      taylor = true;
      ++fallbacks_;
    } else {
      s.assign(x_.size(), 0.0);
    }
  }
  if (taylor) {
    StepBundle b;
    b.d = d_;
    b.delta = delta_;
    b.sL = sL_;
    cauchy_point(x_, g_, curvature_, params_.step, b);
    if (b.curvature_nonfinite) ++nonfinite_curvatures_;
    s = std::move(b.s);
  }
  require_same_size(s.size(), x_.size(), "LevelRun::iterate");

  Vector next = add(x_, s);
  const double raw = box_.max_violation(next);
  next = project_box(next, box_);

  if (!top_) {
    const Vector moved = subtract(next, x0_);
    const double slope = dot(k_ == 0 ? g_ : g0_, moved);
    if (k_ == 0) {
      g0_ = g_;
      g0s0_ = slope;
    }
    if (slope > params_.kappa_gs * g0s0_) {
      stopped_ = true;
      return false;
    }
  }
  const double dn = norm(d_);
  x_ = std::move(next);
  const std::size_t k = k_;
  ++k_;
  prepared_ = false;
  if (observer_ != nullptr) {
    observer_->on_iterate({level_, subdomain_, k, type, fallback, x_, box_, raw, dn});
  }
  return true;
}

// ---------------------------------------------------------------------------

TauCorrectedModel::TauCorrectedModel(const GradientOracle& coarse, Vector target, Vector x0)
    : GradientOracle(coarse.dimension()), coarse_(coarse), target_(std::move(target)), x0_(std::move(x0)) {
  require_same_size(target_.size(), dimension(), "TauCorrectedModel");
  require_same_size(x0_.size(), dimension(), "TauCorrectedModel");
}

void TauCorrectedModel::compute_gradient(ConstSpan x, MutSpan g) const {
  if (!shift_) {
    Vector g0(dimension());
    coarse_.gradient_uncounted(x0_, g0);
    charge(1);
    shift_ = subtract(target_, g0);
  }
  coarse_.gradient_uncounted(x, g);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += (*shift_)[i];
}

void TauCorrectedModel::compute_hessian_vector(ConstSpan x, ConstSpan v, MutSpan out) const {
  coarse_.hessian_vector_uncounted(x, v, out);
}

std::unique_ptr<GradientOracle> tau_correct(const GradientOracle& coarse, Vector target, Vector x0) {
  return std::make_unique<TauCorrectedModel>(coarse, std::move(target), std::move(x0));
}

GalerkinModel::GalerkinModel(const GradientOracle& fine, Vector x_fine, const TransferPair& pair,
                             ConstSpan g_fine, Vector y0)
    : GradientOracle(pair.coarse_size()),
      fine_(fine),
      x_fine_(std::move(x_fine)),
      pair_(pair),
      rg_(pair.R.multiply(g_fine)),
      y0_(std::move(y0)) {
  require_same_size(y0_.size(), dimension(), "GalerkinModel");
}

Vector GalerkinModel::apply(ConstSpan v) const {
  const Vector pv = pair_.P.multiply(v);
  Vector bpv(pv.size());
  fine_.hessian_vector_uncounted(x_fine_, pv, bpv);
  return pair_.R.multiply(bpv);
}

void GalerkinModel::compute_gradient(ConstSpan y, MutSpan g) const {
  const Vector hs = apply(subtract(y, y0_));
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = rg_[i] + hs[i];
}

void GalerkinModel::compute_hessian_vector(ConstSpan, ConstSpan v, MutSpan out) const {
  const Vector hv = apply(v);
  std::copy(hv.begin(), hv.end(), out.begin());
}

std::string to_string(CoarseModel m) {
  return m == CoarseModel::galerkin ? "galerkin" : "tau";
}

CoarseModel coarse_model_from_string(const std::string& s) {
  if (s == "tau" || s == "tau_corrected") return CoarseModel::tau_corrected;
  if (s == "galerkin") return CoarseModel::galerkin;
  throw ContractError("unknown coarse model '" + s + "'");
}

std::optional<Vector> recursive_step(LevelRun& fine, const CoarseSpace& coarse, CoarseModel model,
                                     bool truncation, Observer* observer,
                                     const std::function<void(LevelRun&)>& run_coarse) {
  const TransferPair* pair = coarse.pair;
  TransferPair truncated;
  if (truncation) {
    truncated = truncate(*pair, active_set(fine.x(), fine.box()));
    pair = &truncated;
  }
  const Parameters& params = fine.params();
  RestrictedState rs = restrict_state(pair->R, fine.x(), fine.w(), params.weight_floor);
  BoundBox box = lower_level_bounds(pair->P, pair->sigma, fine.x(), rs.x0, fine.box());
  const ThetaContract contract = ThetaContract::descent(fine.first_order(), norm(fine.linear()),
                                                        params.kappa_1st, params.kappa_2nd);

  std::unique_ptr<GradientOracle> h;
  Vector initial;
  if (model == CoarseModel::tau_corrected) {
    initial = pair->P.multiply_transpose(fine.g());
    h = tau_correct(*coarse.oracle, initial, rs.x0);
  } else {
    auto galerkin =
        std::make_unique<GalerkinModel>(fine.model(), fine.x(), *pair, fine.g(), rs.x0);
    initial = galerkin->restricted_gradient();
    h = std::move(galerkin);
  }

  LevelRun run(*h, std::move(box), params, coarse.level, observer, fine.subdomain());
  const Vector x0 = rs.x0;
  const bool go = run.start(std::move(rs.x0), std::move(rs.w), contract, false, &initial);
  if (go) run_coarse(run);
  coarse.oracle->charge(h->evaluations());
  if (!go) return std::nullopt;
  return prolong_step(pair->P, subtract(run.x(), x0));
}

// ---------------------------------------------------------------------------

double cost_ml(const std::vector<std::size_t>& sizes, const std::vector<std::uint64_t>& counts) {
  require_same_size(sizes.size(), counts.size(), "cost_ml");
  if (sizes.empty()) return 0.0;
  const double nr = static_cast<double>(sizes.back());
  double c = 0.0;
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    c += static_cast<double>(sizes[l]) / nr * static_cast<double>(counts[l]);
  }
  return c;
}

double exact_criticality(const GradientOracle& oracle, ConstSpan x, const BoundBox& box) {
  Vector G(x.size());
  oracle.exact().gradient_uncounted(x, G);
  return criticality_xi(x, G, box);
}

MultilevelSolver::MultilevelSolver(std::vector<LevelSpec> levels, std::vector<TransferPair> transfers,
                                   MultilevelOptions options, Observer* observer)
    : levels_(std::move(levels)),
      transfers_(std::move(transfers)),
      options_(std::move(options)),
      observer_(observer) {
  if (levels_.empty()) throw ContractError("MultilevelSolver: no levels");
  if (transfers_.size() + 1 != levels_.size()) {
    throw ContractError("MultilevelSolver: need one transfer pair per pair of adjacent levels");
  }
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    if (levels_[l].oracle == nullptr) throw ContractError("MultilevelSolver: missing oracle");
    if (levels_[l].size == 0) levels_[l].size = levels_[l].oracle->dimension();
    require_same_size(levels_[l].oracle->dimension(), levels_[l].size, "MultilevelSolver");
    if (l > 0) {
      require_same_size(transfers_[l - 1].fine_size(), levels_[l].size, "MultilevelSolver");
      require_same_size(transfers_[l - 1].coarse_size(), levels_[l - 1].size, "MultilevelSolver");
    }
  }
  options_.params.validate();
  const VCycleSchedule& s = options_.schedule;
  if (s.pre < 0 || s.post < 0 || s.coarsest < 1) {
    throw ContractError("MultilevelSolver: invalid smoothing counts");
  }
}

std::vector<IterationType> MultilevelSolver::schedule_for(int level) const {
  const VCycleSchedule& s = options_.schedule;
  if (levels_.size() == 1) return {IterationType::taylor};
  if (level == 0) return std::vector<IterationType>(static_cast<std::size_t>(s.coarsest), IterationType::taylor);
  std::vector<IterationType> types(static_cast<std::size_t>(s.pre), IterationType::taylor);
  types.push_back(IterationType::recursive);
  types.insert(types.end(), static_cast<std::size_t>(s.post), IterationType::taylor);
  return types;
}

std::vector<std::uint64_t> MultilevelSolver::counts() const {
  std::vector<std::uint64_t> c;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    c.push_back(levels_[l].oracle->evaluations() - (baseline_.empty() ? 0 : baseline_[l]));
  }
  return c;
}

std::optional<Vector> MultilevelSolver::descend(LevelRun& fine) {
  const int l = fine.level();
  CoarseSpace coarse{&transfers_[static_cast<std::size_t>(l - 1)],
                     levels_[static_cast<std::size_t>(l - 1)].oracle, l - 1};
  return recursive_step(fine, coarse, options_.model, options_.truncation, observer_,
                        [this](LevelRun& c) { run_level(c); });
}

void MultilevelSolver::run_level(LevelRun& run) {
  const auto recurse = [this](LevelRun& r) { return descend(r); };
  for (IterationType t : schedule_for(run.level())) {
    if (!run.iterate(t, recurse)) break;
  }
}

SolveResult MultilevelSolver::run(Vector x0, const CycleCallback& on_cycle) {
  SolverScope scope;
  baseline_.clear();
  baseline_ = counts();
  const LevelSpec& top = levels_.back();
  const int top_level = static_cast<int>(levels_.size()) - 1;
  const Parameters& params = options_.params;

  SolveResult result;
  for (const LevelSpec& l : levels_) result.sizes.push_back(l.size);

  LevelRun run(*top.oracle, top.box, params, top_level, observer_);
  const double d0 = [&] {
    run.start(std::move(x0), Vector(top.size, params.varsigma * params.varsigma), ThetaContract::top(), true);
    return norm(run.d());
  }();
  result.event_e = d0 * d0 >= params.varsigma;
  result.xi0 = exact_criticality(*top.oracle, run.x(), top.box);

  auto record = [&](std::size_t cycle, double dn, double xi) {
    CycleRecord rec;
    rec.cycle = cycle;
    rec.d_norm = dn;
    rec.xi_norm = xi;
    rec.evaluations = counts();
    rec.cost = cost_ml(result.sizes, rec.evaluations);
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
  const auto recurse = [this](LevelRun& r) { return descend(r); };
  const std::vector<IterationType> cycle_types = schedule_for(top_level);
  for (std::size_t cycle = 1; !result.converged && cycle <= stop.max_cycles; ++cycle) {
    for (IterationType t : cycle_types) run.iterate(t, recurse);
    const double xi = exact_criticality(*top.oracle, run.x(), top.box);
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

SolveResult solve_adagb2(const GradientOracle& oracle, const BoundBox& box, Vector x0,
                         const Parameters& params, const StopRule& stop, Observer* observer,
                         const CycleCallback& on_cycle) {
  MultilevelOptions options;
  options.params = params;
  options.stop = stop;
  MultilevelSolver solver({LevelSpec{&oracle, box, oracle.dimension()}}, {}, options, observer);
  return solver.run(std::move(x0), on_cycle);
}

}  // namespace offo
