#pragma once

// Data-parallel inner loops used by every solver in the library.
//
// Each kernel has a scalar reference implementation and, where the build and
// the host allow it, an AVX2 variant. The active table is chosen once at
// startup (OFFO_SIMD=scalar|avx2 overrides the automatic choice).
//
// Elementwise kernels are bit-identical across variants. Reductions (dot,
// weighted sums, sparse rows) use a different summation order in the SIMD
// variants and agree with the scalar reference to a few ulps.

#include <cstddef>
#include <string_view>

namespace offo::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct Table {
  Isa isa;

  double (*dot)(const double* a, const double* b, std::size_t n);

  // sum_i d_i^2 / w_i, terms with d_i == 0 contribute 0.
  double (*weighted_square_sum)(const double* d, const double* w, std::size_t n);

  // Largest |a_i|.
  double (*max_abs)(const double* a, std::size_t n);

  // out_i = min(max(x_i, lo_i), hi_i)
  void (*clamp)(const double* x, const double* lo, const double* hi, double* out,
                std::size_t n);

  // d_i = clamp(x_i - g_i, lo_i, hi_i) - x_i
  void (*projected_direction)(const double* x, const double* g, const double* lo,
                              const double* hi, double* d, std::size_t n);

  // w_i = max(sqrt(w_prev_i^2 + d_i^2), floor), delta_i = |d_i| / w_i
  void (*accumulate_weights)(const double* w_prev, const double* d, double floor,
                             double* w, double* delta, std::size_t n);

  // s_i = clamp(-g_i, max(lo_i - x_i, -delta_i), min(hi_i - x_i, delta_i))
  void (*box_step)(const double* x, const double* g, const double* delta,
                   const double* lo, const double* hi, double* s, std::size_t n);

  // y_i += a * x_i
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  // y = A x for a CSR matrix.
  void (*csr_multiply)(const std::size_t* row_begin, const std::size_t* col,
                       const double* val, const double* x, double* y,
                       std::size_t rows);
};

const Table& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks support.
const Table* avx2_table();

const Table& active();

// Test hook: pin the active table. Returns false if the variant is unavailable.
bool select(Isa isa);

}  // namespace offo::kernels
