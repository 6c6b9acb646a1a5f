#include "offo/sparse.hpp"

#include <algorithm>

#include "offo/kernels.hpp"

namespace offo {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_begin_(rows + 1, 0) {}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> entries) {
  for (const Triplet& t : entries) {
    if (t.row >= rows || t.col >= cols) throw ContractError("CsrMatrix: triplet out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m(rows, cols);
  std::size_t k = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (k < entries.size() && entries[k].row == r) {
      const std::size_t c = entries[k].col;
      double v = 0.0;
      while (k < entries.size() && entries[k].row == r && entries[k].col == c) {
        v += entries[k].value;
        ++k;
      }
      if (v != 0.0) {
        m.col_.push_back(c);
        m.val_.push_back(v);
      }
    }
    m.row_begin_[r + 1] = m.col_.size();
  }
  return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  CsrMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m.col_.push_back(i);
    m.val_.push_back(1.0);
    m.row_begin_[i + 1] = i + 1;
  }
  return m;
}

double CsrMatrix::entry(std::size_t i, std::size_t j) const {
  const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_begin_[i]);
  const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_begin_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return val_[static_cast<std::size_t>(it - col_.begin())];
}

void CsrMatrix::multiply(ConstSpan x, MutSpan y) const {
  require_same_size(x.size(), cols_, "CsrMatrix::multiply");
  require_same_size(y.size(), rows_, "CsrMatrix::multiply");
  kernels::active().csr_multiply(row_begin_.data(), col_.data(), val_.data(), x.data(), y.data(),
                                 rows_);
}

Vector CsrMatrix::multiply(ConstSpan x) const {
  Vector y(rows_);
  multiply(x, y);
  return y;
}

Vector CsrMatrix::multiply_transpose(ConstSpan x) const {
  require_same_size(x.size(), rows_, "CsrMatrix::multiply_transpose");
  Vector y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) y[col_[k]] += val_[k] * x[r];
  }
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix t(cols_, rows_);
  std::vector<std::size_t> count(cols_ + 1, 0);
  for (std::size_t c : col_) ++count[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) count[c + 1] += count[c];
  t.row_begin_ = count;
  t.col_.resize(col_.size());
  t.val_.resize(val_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) {
      const std::size_t dst = count[col_[k]]++;
      t.col_[dst] = r;
      t.val_[dst] = val_[k];
    }
  }
  return t;
}

CsrMatrix CsrMatrix::scaled(double a) const {
  CsrMatrix m = *this;
  for (double& v : m.val_) v *= a;
  return m;
}

Vector CsrMatrix::row_sums() const {
  Vector s(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) s[r] += val_[k];
  }
  return s;
}

bool CsrMatrix::nonnegative() const {
  return std::all_of(val_.begin(), val_.end(), [](double v) { return v >= 0.0; });
}

CsrMatrix CsrMatrix::with_rows_zeroed(const std::vector<bool>& rows) const {
  require_same_size(rows.size(), rows_, "CsrMatrix::with_rows_zeroed");
  CsrMatrix m(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (!rows[r]) {
      for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) {
        m.col_.push_back(col_[k]);
        m.val_.push_back(val_[k]);
      }
    }
    m.row_begin_[r + 1] = m.col_.size();
  }
  return m;
}

std::vector<double> CsrMatrix::dense() const {
  std::vector<double> d(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) d[r * cols_ + col_[k]] = val_[k];
  }
  return d;
}

CsrMatrix operator*(const CsrMatrix& a, const CsrMatrix& b) {
  require_same_size(a.cols(), b.rows(), "CsrMatrix product");
  std::vector<Triplet> entries;
  for (std::size_t r = 0; r < a.rows_; ++r) {
    for (std::size_t k = a.row_begin_[r]; k < a.row_begin_[r + 1]; ++k) {
      const std::size_t mid = a.col_[k];
      for (std::size_t q = b.row_begin_[mid]; q < b.row_begin_[mid + 1]; ++q) {
        entries.push_back({r, b.col_[q], a.val_[k] * b.val_[q]});
      }
    }
  }
  return CsrMatrix::from_triplets(a.rows(), b.cols(), std::move(entries));
}

}  // namespace offo
