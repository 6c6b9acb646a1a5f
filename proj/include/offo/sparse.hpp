#pragma once

#include <cstddef>
#include <vector>

#include "offo/core.hpp"

namespace offo {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row matrix. Column indices within a row are sorted and
// unique.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols);

  // Duplicates are summed; entries that sum to exactly zero are dropped.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                 std::vector<Triplet> entries);
  static CsrMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return val_.size(); }

  const std::vector<std::size_t>& row_begin() const { return row_begin_; }
  const std::vector<std::size_t>& col_index() const { return col_; }
  const std::vector<double>& values() const { return val_; }

  double entry(std::size_t i, std::size_t j) const;

  void multiply(ConstSpan x, MutSpan y) const;
  Vector multiply(ConstSpan x) const;
  // y = A^T x without forming the transpose.
  Vector multiply_transpose(ConstSpan x) const;

  CsrMatrix transpose() const;
  CsrMatrix scaled(double a) const;
  Vector row_sums() const;
  bool nonnegative() const;

  // Copy with the listed rows emptied.
  CsrMatrix with_rows_zeroed(const std::vector<bool>& rows) const;

  std::vector<double> dense() const;  // row-major

  friend CsrMatrix operator*(const CsrMatrix& a, const CsrMatrix& b);
  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_begin_{0};
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

}  // namespace offo
