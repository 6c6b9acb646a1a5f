#include "offo/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace offo {

Axis Axis::coarsened() const {
  if (cells < 2 || cells % 2 != 0) {
    std::ostringstream os;
    os << "Axis: cannot coarsen " << cells << " cells by a factor of 2";
    throw ContractError(os.str());
  }
  return Axis{cells / 2, first_eliminated, last_eliminated};
}

std::size_t TensorGrid::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const Axis& a : axes) n *= a.size();
  return n;
}

TensorGrid TensorGrid::coarsened() const {
  TensorGrid g;
  for (const Axis& a : axes) g.axes.push_back(a.coarsened());
  return g;
}

std::size_t TensorGrid::index(int i, int j) const {
  const std::size_t ix = static_cast<std::size_t>(i - axes[0].first_node());
  if (axes.size() == 1) return ix;
  const std::size_t iy = static_cast<std::size_t>(j - axes[1].first_node());
  return iy * axes[0].size() + ix;
}

Vector row_sums_or_one(const CsrMatrix& P) {
  Vector s = P.row_sums();
  for (std::size_t r = 0; r < P.rows(); ++r) {
    if (P.row_begin()[r] == P.row_begin()[r + 1]) s[r] = 1.0;
  }
  return s;
}

TransferPair TransferPair::from_prolongation(CsrMatrix P, double restriction_scale) {
  if (!P.nonnegative()) throw ContractError("TransferPair: prolongation has a negative entry");
  TransferPair t;
  t.R = P.transpose().scaled(restriction_scale);
  t.sigma = row_sums_or_one(P);
  t.P = std::move(P);
  t.restriction_scale = restriction_scale;
  return t;
}

TransferPair TransferPair::from_operators(CsrMatrix P, CsrMatrix R) {
  if (!P.nonnegative() || !R.nonnegative()) {
    throw ContractError("TransferPair: operators must be nonnegative");
  }
  require_same_size(P.rows(), R.cols(), "TransferPair");
  require_same_size(P.cols(), R.rows(), "TransferPair");
  TransferPair t;
  t.sigma = row_sums_or_one(P);
  t.P = std::move(P);
  t.R = std::move(R);
  return t;
}

CsrMatrix linear_interpolation_1d(const Axis& fine, const Axis& coarse) {
  if (!(fine.coarsened() == coarse)) throw ContractError("linear_interpolation_1d: grids are not nested");
  std::vector<Triplet> entries;
  auto coarse_column = [&](int node, std::size_t row, double weight) {
    if (node < coarse.first_node() || node > coarse.last_node()) return;  // Dirichlet node
    entries.push_back({row, static_cast<std::size_t>(node - coarse.first_node()), weight});
  };
  for (int i = fine.first_node(); i <= fine.last_node(); ++i) {
    const std::size_t row = static_cast<std::size_t>(i - fine.first_node());
    if (i % 2 == 0) {
      coarse_column(i / 2, row, 1.0);
    } else {
      coarse_column((i - 1) / 2, row, 0.5);
      coarse_column((i + 1) / 2, row, 0.5);
    }
  }
  return CsrMatrix::from_triplets(fine.size(), coarse.size(), std::move(entries));
}

namespace {

CsrMatrix kronecker(const CsrMatrix& outer, const CsrMatrix& inner) {
  std::vector<Triplet> entries;
  for (std::size_t r = 0; r < outer.rows(); ++r) {
    for (std::size_t k = outer.row_begin()[r]; k < outer.row_begin()[r + 1]; ++k) {
      const std::size_t c = outer.col_index()[k];
      const double v = outer.values()[k];
      for (std::size_t ri = 0; ri < inner.rows(); ++ri) {
        for (std::size_t q = inner.row_begin()[ri]; q < inner.row_begin()[ri + 1]; ++q) {
          entries.push_back({r * inner.rows() + ri, c * inner.cols() + inner.col_index()[q],
                             v * inner.values()[q]});
        }
      }
    }
  }
  return CsrMatrix::from_triplets(outer.rows() * inner.rows(), outer.cols() * inner.cols(),
                                  std::move(entries));
}

}  // namespace

TransferPair build_linear_interpolation(const TensorGrid& fine, const TensorGrid& coarse) {
  if (fine.axes.empty() || fine.axes.size() > 2 || coarse.axes.size() != fine.axes.size()) {
    throw ContractError("build_linear_interpolation: only 1D and 2D grids are supported");
  }
  CsrMatrix P = linear_interpolation_1d(fine.axes[0], coarse.axes[0]);
  if (fine.axes.size() == 2) {
    P = kronecker(linear_interpolation_1d(fine.axes[1], coarse.axes[1]), P);
  }
  return TransferPair::from_prolongation(std::move(P), std::ldexp(1.0, -fine.dimension()));
}

TransferPair compose(const TransferPair& fine_to_mid, const TransferPair& mid_to_coarse) {
  CsrMatrix P = fine_to_mid.P * mid_to_coarse.P;
  if (fine_to_mid.restriction_scale > 0.0 && mid_to_coarse.restriction_scale > 0.0) {
    return TransferPair::from_prolongation(
        std::move(P), fine_to_mid.restriction_scale * mid_to_coarse.restriction_scale);
  }
  return TransferPair::from_operators(std::move(P), mid_to_coarse.R * fine_to_mid.R);
}

RestrictedState restrict_state(const CsrMatrix& R, ConstSpan x_fine, ConstSpan w_fine,
                               double weight_floor) {
  RestrictedState s{R.multiply(x_fine), R.multiply(w_fine)};
  for (double& v : s.w) v = std::max(v, weight_floor);
  return s;
}

BoundBox lower_level_bounds(const CsrMatrix& P, ConstSpan sigma, ConstSpan x_fine,
                            ConstSpan x0_coarse, const BoundBox& box_fine,
                            const std::optional<BoundBox>& empty_column) {
  const std::size_t nc = P.cols();
  require_same_size(sigma.size(), P.rows(), "lower_level_bounds");
  require_same_size(x_fine.size(), P.rows(), "lower_level_bounds");
  require_same_size(box_fine.size(), P.rows(), "lower_level_bounds");
  require_same_size(x0_coarse.size(), nc, "lower_level_bounds");
  if (empty_column) require_same_size(empty_column->size(), nc, "lower_level_bounds");

  Vector lo(nc, -kInf);
  Vector hi(nc, kInf);
  std::vector<bool> touched(nc, false);
  const Vector& l = box_fine.lower();
  const Vector& u = box_fine.upper();
  for (std::size_t q = 0; q < P.rows(); ++q) {
    const std::size_t begin = P.row_begin()[q];
    const std::size_t end = P.row_begin()[q + 1];
    if (begin == end) continue;
    if (!(sigma[q] > 0.0)) throw ContractError("lower_level_bounds: nonempty row with sigma <= 0");
    const double down = (l[q] - x_fine[q]) / sigma[q];
    const double up = (u[q] - x_fine[q]) / sigma[q];
    for (std::size_t k = begin; k < end; ++k) {
      if (!(P.values()[k] > 0.0)) continue;
      const std::size_t i = P.col_index()[k];
      touched[i] = true;
      lo[i] = std::max(lo[i], down);
      hi[i] = std::min(hi[i], up);
    }
  }
  for (std::size_t i = 0; i < nc; ++i) {
    if (touched[i]) {
      lo[i] = x0_coarse[i] + lo[i];
      hi[i] = x0_coarse[i] + hi[i];
    } else if (empty_column) {
      lo[i] = std::min(empty_column->lower()[i], x0_coarse[i]);
      hi[i] = std::max(empty_column->upper()[i], x0_coarse[i]);
    }
  }
  return BoundBox(std::move(lo), std::move(hi));
}

Vector prolong_step(const CsrMatrix& P, ConstSpan coarse_correction) {
  return P.multiply(coarse_correction);
}

std::size_t TruncationMask::count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
}

TruncationMask active_set(ConstSpan x, const BoundBox& box) {
  require_same_size(x.size(), box.size(), "active_set");
  TruncationMask m{std::vector<bool>(x.size(), false)};
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.active[i] = x[i] == box.lower()[i] || x[i] == box.upper()[i];
  }
  return m;
}

TransferPair truncate(const TransferPair& pair, const TruncationMask& mask) {
  if (!(pair.restriction_scale > 0.0)) {
    throw ContractError("truncate: needs a grid pair with R proportional to P^T");
  }
  return TransferPair::from_prolongation(pair.P.with_rows_zeroed(mask.active),
                                         pair.restriction_scale);
}

}  // namespace offo
