#pragma once

// Grid transfer operators between adjacent levels and the mapping of fine
// bounds to coarse bounds.

#include <optional>
#include <utility>
#include <vector>

#include "offo/core.hpp"
#include "offo/sparse.hpp"

namespace offo {

// One direction of a uniform tensor mesh on [0, 1]: nodes 0..cells, with
// the Dirichlet end nodes removed from the unknowns.
struct Axis {
  int cells = 0;
  bool first_eliminated = true;
  bool last_eliminated = true;

  int first_node() const { return first_eliminated ? 1 : 0; }
  int last_node() const { return last_eliminated ? cells - 1 : cells; }
  std::size_t size() const {
    return last_node() >= first_node() ? static_cast<std::size_t>(last_node() - first_node() + 1) : 0;
  }
  Axis coarsened() const;

  friend bool operator==(const Axis&, const Axis&) = default;
};

// 1D or 2D grid of unknowns. Unknowns are ordered with axis 0 fastest.
struct TensorGrid {
  std::vector<Axis> axes;

  std::size_t size() const;
  int dimension() const { return static_cast<int>(axes.size()); }
  TensorGrid coarsened() const;
  std::size_t index(int i, int j = 0) const;  // node coordinates, not offsets

  friend bool operator==(const TensorGrid&, const TensorGrid&) = default;
};

// Prolongation P (fine x coarse), restriction R (coarse x fine) and the row
// sums sigma of P. Rows of P with no entries get sigma = 1.
struct TransferPair {
  CsrMatrix P;
  CsrMatrix R;
  Vector sigma;
  // R = restriction_scale * P^T for grid pairs; 0 when R was given explicitly.
  double restriction_scale = 0.0;

  static TransferPair from_prolongation(CsrMatrix P, double restriction_scale);
  static TransferPair from_operators(CsrMatrix P, CsrMatrix R);

  std::size_t fine_size() const { return P.rows(); }
  std::size_t coarse_size() const { return P.cols(); }
};

Vector row_sums_or_one(const CsrMatrix& P);

// Piecewise-linear interpolation for a factor-2 coarsening of one axis.
CsrMatrix linear_interpolation_1d(const Axis& fine, const Axis& coarse);

// Tensor-product interpolation with R = 2^-dim P^T. Throws unless coarse is
// exactly fine.coarsened().
TransferPair build_linear_interpolation(const TensorGrid& fine, const TensorGrid& coarse);

// fine -> mid and mid -> coarse composed into fine -> coarse.
TransferPair compose(const TransferPair& fine_to_mid, const TransferPair& mid_to_coarse);

struct RestrictedState {
  Vector x0;
  Vector w;
};

RestrictedState restrict_state(const CsrMatrix& R, ConstSpan x_fine, ConstSpan w_fine,
                               double weight_floor);

// Coarse box around x0_coarse whose feasible corrections prolong to feasible
// fine iterates. Columns of P without nonzeros get `empty_column` if given,
// otherwise (-inf, inf).
BoundBox lower_level_bounds(const CsrMatrix& P, ConstSpan sigma, ConstSpan x_fine,
                            ConstSpan x0_coarse, const BoundBox& box_fine,
                            const std::optional<BoundBox>& empty_column = std::nullopt);

Vector prolong_step(const CsrMatrix& P, ConstSpan coarse_correction);

struct TruncationMask {
  std::vector<bool> active;

  std::size_t count() const;
};

// Variables sitting exactly on one of their bounds.
TruncationMask active_set(ConstSpan x, const BoundBox& box);

// Empties the masked rows of P and rebuilds R and sigma.
TransferPair truncate(const TransferPair& pair, const TruncationMask& mask);

}  // namespace offo
