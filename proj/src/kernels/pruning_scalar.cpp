#include <bit>
#include <cmath>

#include "vipr/kernels/pruning_kernels.hpp"

namespace vipr::kernels {

std::int32_t rescale_vector(double* v) {
  const double m = std::fmax(std::fmax(v[0], v[1]), std::fmax(v[2], v[3]));
  if (m == 0.0 || !std::isfinite(m)) return 0;
  const auto bits = std::bit_cast<std::uint64_t>(m);
  const int biased = static_cast<int>((bits >> 52) & 0x7ff);
  if (biased == 0 || biased >= 2046) {
    int e = 0;
    std::frexp(m, &e);
    for (int i = 0; i < 4; ++i) v[i] = std::ldexp(v[i], -e);
    return e;
  }
  const int e = biased - 1022;  // m = f * 2^e, f in [0.5, 1)
  const double s = std::bit_cast<double>(static_cast<std::uint64_t>(1023 - e) << 52);
  for (int i = 0; i < 4; ++i) v[i] *= s;
  return e;
}

namespace {

void transition_apply_scalar(const double* m, const double* in, double* out, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) {
    const double* x = in + 4 * p;
    double* y = out + 4 * p;
    for (int i = 0; i < 4; ++i)
      y[i] = m[4 * i] * x[0] + m[4 * i + 1] * x[1] + m[4 * i + 2] * x[2] + m[4 * i + 3] * x[3];
  }
}

void combine_rescale_scalar(const double* a, const double* b, double* out,
                            std::int32_t* exponents, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) {
    double* y = out + 4 * p;
    for (int i = 0; i < 4; ++i) y[i] = a[4 * p + i] * b[4 * p + i];
    exponents[p] += rescale_vector(y);
  }
}

void dot_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) {
    const double* x = a + 4 * p;
    const double* y = b + 4 * p;
    out[p] = x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
  }
}

}  // namespace

const PruningKernels& scalar_kernels() {
  static const PruningKernels k{transition_apply_scalar, combine_rescale_scalar, dot_scalar,
                                "scalar"};
  return k;
}

}  // namespace vipr::kernels
