#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace offo::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double weighted_square_sum(const double* d, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) acc += d[i] * d[i] / w[i];
  }
  return acc;
}

double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

void projected_direction(const double* x, const double* g, const double* lo,
                         const double* hi, double* d, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double y = std::min(std::max(x[i] - g[i], lo[i]), hi[i]);
    d[i] = y - x[i];
  }
}

void accumulate_weights(const double* w_prev, const double* d, double floor,
                        double* w, double* delta, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = std::max(std::sqrt(w_prev[i] * w_prev[i] + d[i] * d[i]), floor);
    w[i] = wi;
    delta[i] = std::fabs(d[i]) / wi;
  }
}

void box_step(const double* x, const double* g, const double* delta,
              const double* lo, const double* hi, double* s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::max(lo[i] - x[i], -delta[i]);
    const double b = std::min(hi[i] - x[i], delta[i]);
    s[i] = std::min(std::max(-g[i], a), b);
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void csr_multiply(const std::size_t* row_begin, const std::size_t* col,
                  const double* val, const double* x, double* y, std::size_t rows) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_begin[r]; k < row_begin[r + 1]; ++k) acc += val[k] * x[col[k]];
    y[r] = acc;
  }
}

}  // namespace offo::kernels::scalar

namespace offo::kernels {

const Table& scalar_table() {
  static const Table table{Isa::scalar,
                           scalar::dot,
                           scalar::weighted_square_sum,
                           scalar::max_abs,
                           scalar::clamp,
                           scalar::projected_direction,
                           scalar::accumulate_weights,
                           scalar::box_step,
                           scalar::axpy,
                           scalar::csr_multiply};
  return table;
}

}  // namespace offo::kernels
