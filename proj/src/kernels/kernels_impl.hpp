#pragma once

#include "offo/kernels.hpp"

namespace offo::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n);
double weighted_square_sum(const double* d, const double* w, std::size_t n);
double max_abs(const double* a, std::size_t n);
void clamp(const double* x, const double* lo, const double* hi, double* out, std::size_t n);
void projected_direction(const double* x, const double* g, const double* lo,
                         const double* hi, double* d, std::size_t n);
void accumulate_weights(const double* w_prev, const double* d, double floor, double* w,
                        double* delta, std::size_t n);
void box_step(const double* x, const double* g, const double* delta, const double* lo,
              const double* hi, double* s, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void csr_multiply(const std::size_t* row_begin, const std::size_t* col, const double* val,
                  const double* x, double* y, std::size_t rows);

}  // namespace offo::kernels::scalar

namespace offo::kernels {

#if defined(OFFO_HAVE_AVX2)
const Table& avx2_table_unchecked();
#endif

}  // namespace offo::kernels
