// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "vipr/kernels/pruning_kernels.hpp"

namespace vipr::kernels {
namespace {

// One 4-state vector is exactly one __m256d.

void transition_apply_avx2(const double* m, const double* in, double* out, std::size_t n) {
  // y = sum_j column_j(M) * x[j]
  const __m256d c0 = _mm256_setr_pd(m[0], m[4], m[8], m[12]);
  const __m256d c1 = _mm256_setr_pd(m[1], m[5], m[9], m[13]);
  const __m256d c2 = _mm256_setr_pd(m[2], m[6], m[10], m[14]);
  const __m256d c3 = _mm256_setr_pd(m[3], m[7], m[11], m[15]);
  for (std::size_t p = 0; p < n; ++p) {
    const double* x = in + 4 * p;
    __m256d y = _mm256_mul_pd(c0, _mm256_broadcast_sd(x));
    y = _mm256_fmadd_pd(c1, _mm256_broadcast_sd(x + 1), y);
    y = _mm256_fmadd_pd(c2, _mm256_broadcast_sd(x + 2), y);
    y = _mm256_fmadd_pd(c3, _mm256_broadcast_sd(x + 3), y);
    _mm256_storeu_pd(out + 4 * p, y);
  }
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

void combine_rescale_avx2(const double* a, const double* b, double* out,
                          std::int32_t* exponents, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) {
    const __m256d y = _mm256_mul_pd(_mm256_loadu_pd(a + 4 * p), _mm256_loadu_pd(b + 4 * p));
    const double m = hmax(y);
    const auto bits = static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_castpd_si128(_mm_set_sd(m))));
    const int biased = static_cast<int>((bits >> 52) & 0x7ff);
    if (biased == 0 || biased >= 2046) {
      // zero, subnormal or non-finite: defer to the scalar path
      _mm256_storeu_pd(out + 4 * p, y);
      exponents[p] += rescale_vector(out + 4 * p);
      continue;
    }
    const int e = biased - 1022;
    const __m256d s = _mm256_castsi256_pd(
        _mm256_set1_epi64x(static_cast<long long>(static_cast<std::uint64_t>(1023 - e) << 52)));
    _mm256_storeu_pd(out + 4 * p, _mm256_mul_pd(y, s));
    exponents[p] += e;
  }
}

void dot_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t p = 0;
  // Four patterns at a time: transpose-free horizontal sums via hadd.
  for (; p + 4 <= n; p += 4) {
    const __m256d x0 = _mm256_mul_pd(_mm256_loadu_pd(a + 4 * p), _mm256_loadu_pd(b + 4 * p));
    const __m256d x1 = _mm256_mul_pd(_mm256_loadu_pd(a + 4 * p + 4), _mm256_loadu_pd(b + 4 * p + 4));
    const __m256d x2 = _mm256_mul_pd(_mm256_loadu_pd(a + 4 * p + 8), _mm256_loadu_pd(b + 4 * p + 8));
    const __m256d x3 = _mm256_mul_pd(_mm256_loadu_pd(a + 4 * p + 12), _mm256_loadu_pd(b + 4 * p + 12));
    const __m256d h01 = _mm256_hadd_pd(x0, x1);  // x0[0]+x0[1], x1[0]+x1[1], x0[2]+x0[3], x1[2]+x1[3]
    const __m256d h23 = _mm256_hadd_pd(x2, x3);
    const __m256d lo = _mm256_permute2f128_pd(h01, h23, 0x20);
    const __m256d hi = _mm256_permute2f128_pd(h01, h23, 0x31);
    _mm256_storeu_pd(out + p, _mm256_add_pd(lo, hi));
  }
  for (; p < n; ++p) {
    const double* x = a + 4 * p;
    const double* y = b + 4 * p;
    out[p] = x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
  }
}

}  // namespace

const PruningKernels& avx2_kernel_table() {
  static const PruningKernels k{transition_apply_avx2, combine_rescale_avx2, dot_avx2, "avx2"};
  return k;
}

}  // namespace vipr::kernels
