// AVX2 variants. This translation unit is the only one compiled with -mavx2;
// it is entered only after the dispatcher has checked CPU support.
//
// min/max operand order mirrors std::min/std::max so that ties between +0 and
// -0 resolve identically to the scalar reference:
//   std::max(a, b) == _mm256_max_pd(b, a),  std::min(a, b) == _mm256_min_pd(b, a).

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace offo::kernels::avx2 {
namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline __m256d neg_pd(__m256d v) {
  return _mm256_xor_pd(_mm256_set1_pd(-0.0), v);
}

// std::min(std::max(v, lo), hi)
inline __m256d clamp_pd(__m256d v, __m256d lo, __m256d hi) {
  return _mm256_min_pd(hi, _mm256_max_pd(lo, v));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double weighted_square_sum(const double* d, const double* w, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dv = _mm256_loadu_pd(d + i);
    const __m256d term = _mm256_div_pd(_mm256_mul_pd(dv, dv), _mm256_loadu_pd(w + i));
    const __m256d nonzero = _mm256_cmp_pd(dv, zero, _CMP_NEQ_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(nonzero, term));
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    if (d[i] != 0.0) total += d[i] * d[i] / w[i];
  }
  return total;
}

double max_abs(const double* a, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(abs_pd(_mm256_loadu_pd(a + i)), m);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::max(r, std::fabs(a[i]));
  return r;
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, clamp_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(lo + i),
                                       _mm256_loadu_pd(hi + i)));
  }
  for (; i < n; ++i) out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

void projected_direction(const double* x, const double* g, const double* lo,
                         const double* hi, double* d, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d y = clamp_pd(_mm256_sub_pd(xv, _mm256_loadu_pd(g + i)),
                               _mm256_loadu_pd(lo + i), _mm256_loadu_pd(hi + i));
    _mm256_storeu_pd(d + i, _mm256_sub_pd(y, xv));
  }
  for (; i < n; ++i) {
    const double y = std::min(std::max(x[i] - g[i], lo[i]), hi[i]);
    d[i] = y - x[i];
  }
}

void accumulate_weights(const double* w_prev, const double* d, double floor,
                        double* w, double* delta, std::size_t n) {
  const __m256d fl = _mm256_set1_pd(floor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wp = _mm256_loadu_pd(w_prev + i);
    const __m256d dv = _mm256_loadu_pd(d + i);
    const __m256d root =
        _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(wp, wp), _mm256_mul_pd(dv, dv)));
    const __m256d wi = _mm256_max_pd(fl, root);
    _mm256_storeu_pd(w + i, wi);
    _mm256_storeu_pd(delta + i, _mm256_div_pd(abs_pd(dv), wi));
  }
  for (; i < n; ++i) {
    const double wi = std::max(std::sqrt(w_prev[i] * w_prev[i] + d[i] * d[i]), floor);
    w[i] = wi;
    delta[i] = std::fabs(d[i]) / wi;
  }
}

void box_step(const double* x, const double* g, const double* delta,
              const double* lo, const double* hi, double* s, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d dl = _mm256_loadu_pd(delta + i);
    const __m256d a = _mm256_max_pd(neg_pd(dl), _mm256_sub_pd(_mm256_loadu_pd(lo + i), xv));
    const __m256d b = _mm256_min_pd(dl, _mm256_sub_pd(_mm256_loadu_pd(hi + i), xv));
    _mm256_storeu_pd(s + i, clamp_pd(neg_pd(_mm256_loadu_pd(g + i)), a, b));
  }
  for (; i < n; ++i) {
    const double a = std::max(lo[i] - x[i], -delta[i]);
    const double b = std::min(hi[i] - x[i], delta[i]);
    s[i] = std::min(std::max(-g[i], a), b);
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                          _mm256_mul_pd(av, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void csr_multiply(const std::size_t* row_begin, const std::size_t* col,
                  const double* val, const double* x, double* y, std::size_t rows) {
  static_assert(sizeof(std::size_t) == sizeof(long long));
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t k = row_begin[r];
    const std::size_t end = row_begin[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m256i idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(col + k));
      const __m256d xv = _mm256_i64gather_pd(x, idx, 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(val + k), xv));
    }
    double sum = hsum(acc);
    for (; k < end; ++k) sum += val[k] * x[col[k]];
    y[r] = sum;
  }
}

}  // namespace offo::kernels::avx2

namespace offo::kernels {

const Table& avx2_table_unchecked() {
  static const Table table{Isa::avx2,
                           avx2::dot,
                           avx2::weighted_square_sum,
                           avx2::max_abs,
                           avx2::clamp,
                           avx2::projected_direction,
                           avx2::accumulate_weights,
                           avx2::box_step,
                           avx2::axpy,
                           avx2::csr_multiply};
  return table;
}

}  // namespace offo::kernels
