#pragma once

// Additive Schwarz decompositions and the decomposition driver.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "offo/core.hpp"
#include "offo/multilevel.hpp"
#include "offo/noise.hpp"
#include "offo/sparse.hpp"
#include "offo/transfer.hpp"

namespace offo {

// Subdomains D_p (possibly overlapping) and a disjoint restriction
// partition hat D_p subset of D_p. Index sets are sorted.
struct Covering {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> domains;
  std::vector<std::vector<std::size_t>> partition;

  std::size_t size() const { return domains.size(); }
  void validate() const;
  // Number of subdomains containing each variable.
  std::vector<int> multiplicity() const;
};

// Contiguous blocks of the grid unknowns (a px x py arrangement in 2D,
// as square as M allows), each extended by `overlap` grid layers on its
// interior sides.
Covering build_block_covering(const TensorGrid& grid, int num_subdomains, int overlap);

enum class SchwarzVariant { as, ras, wras, ash, rash, wash };

std::string to_string(SchwarzVariant v);
SchwarzVariant schwarz_variant_from_string(const std::string& s);

// P^(p) is n x n_p and R^(p) is n_p x n with n_p = |D_p|. hat U_p keeps the
// n_p columns of U_p and zeroes those outside hat D_p.
struct SubdomainOperators {
  CsrMatrix P;
  CsrMatrix R;
};

CsrMatrix subdomain_injection(const Covering& c, std::size_t p);           // U_p
CsrMatrix subdomain_restricted_injection(const Covering& c, std::size_t p);  // hat U_p
CsrMatrix subdomain_weighted_injection(const Covering& c, std::size_t p);    // W_p

std::vector<SubdomainOperators> build_operators(const Covering& c, SchwarzVariant variant);

// (R l, R u); rows of R without entries give (-inf, inf).
BoundBox restrict_bounds(const CsrMatrix& R, const BoundBox& box);

// The row sums used in the bound coincidence argument: 1 for every variant
// except WASH, where they equal the multiplicity.
Vector lemma_sigma(const Covering& c, SchwarzVariant variant);

// Row sums of the stacked prolongation (P^(1), ..., P^(M)).
Vector stacked_sigma(const std::vector<SubdomainOperators>& ops, std::size_t n);

// Components j of subdomain p where column j of P^(p) and row j of R^(p)
// are both nonzero.
std::vector<bool> coupled_components(const SubdomainOperators& op);

// f_p(y) = f(x + U_p (y - y0)) for the current splice point (x, y0).
class SubdomainObjective : public GradientOracle {
 public:
  SubdomainObjective(const GradientOracle& fine, CsrMatrix U);

  void rebase(Vector x, Vector y0);
  bool has_analytic_hessian_vector() const override { return fine_.has_analytic_hessian_vector(); }
  const CsrMatrix& injection() const { return U_; }

 protected:
  void compute_gradient(ConstSpan y, MutSpan g) const override;
  void compute_hessian_vector(ConstSpan y, ConstSpan v, MutSpan out) const override;

 private:
  Vector splice(ConstSpan y) const;

  const GradientOracle& fine_;
  CsrMatrix U_;
  CsrMatrix Ut_;
  Vector x_;
  Vector y0_;
};

// C_DD = #_r + (n_max / n) max_p #^(p). Sets *unequal when the subdomain
// counts differ.
double cost_dd(std::uint64_t fine_count, std::size_t n, const std::vector<std::size_t>& sizes,
               const std::vector<std::uint64_t>& counts, bool* unequal = nullptr);

struct DDOptions {
  Parameters params;
  SchwarzVariant variant = SchwarzVariant::wras;
  int decomposition_iterations = 10;  // per cycle, before the Taylor iterations
  int taylor_iterations = 1;          // per cycle
  int subdomain_iterations = 1;       // m^(p) + 1
  bool divide_kappa_1st = true;       // theta_1 uses kappa_1st / M
  unsigned threads = 0;               // 0: min(M, hardware threads)
  NoiseSchedule noise;                // applied inside every subdomain
  std::uint64_t seed = 0;
  StopRule stop;
};

class DomainDecompositionSolver {
 public:
  DomainDecompositionSolver(const GradientOracle& fine, BoundBox box, Covering covering,
                            DDOptions options, Observer* observer = nullptr);

  // One decomposition iteration at `fine`; nothing when every subdomain
  // declined.
  std::optional<Vector> decomposition_step(LevelRun& fine);

  SolveResult run(Vector x0, const CycleCallback& on_cycle = {});

  const Covering& covering() const { return covering_; }
  const std::vector<SubdomainOperators>& operators() const { return ops_; }
  std::vector<std::size_t> subdomain_sizes() const;
  // Evaluations per subdomain, including the share of the fine gradient of
  // each decomposition iteration.
  std::vector<std::uint64_t> subdomain_counts() const;
  // Fine gradients that were assembled from subdomain evaluations.
  std::uint64_t reassigned_fine_gradients() const { return reassigned_; }

 private:
  const GradientOracle& fine_;
  BoundBox box_;
  Covering covering_;
  DDOptions options_;
  Observer* observer_;
  std::vector<SubdomainOperators> ops_;
  Vector sigma_;
  std::vector<BoundBox> fallback_;
  std::vector<std::unique_ptr<SubdomainObjective>> local_;
  std::vector<std::unique_ptr<GradientOracle>> noisy_;
  std::vector<std::uint64_t> shares_;
  std::uint64_t reassigned_ = 0;

  const GradientOracle& oracle(std::size_t p) const;
};

}  // namespace offo
