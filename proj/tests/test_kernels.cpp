#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vipr/kernels/pruning_kernels.hpp"

using namespace vipr::kernels;

namespace {

std::vector<double> random_block(std::size_t n, std::mt19937_64& rng, double zero_rate = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(4 * n);
  for (auto& x : v) x = u(rng) < zero_rate ? 0.0 : std::ldexp(u(rng), -static_cast<int>(u(rng) * 60));
  return v;
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-14 * std::max(std::abs(a), std::abs(b)) + 1e-300;
}

}  // namespace

TEST_CASE("rescale_vector puts the largest entry in [0.5, 1)") {
  double v[4] = {3.0, 0.25, 1.0, 0.0};
  const auto e = rescale_vector(v);
  CHECK(e == 2);
  CHECK(v[0] == 0.75);
  CHECK(v[1] == 0.0625);
  double tiny[4] = {1e-300, 0.0, 2e-300, 0.0};
  const auto et = rescale_vector(tiny);
  CHECK(tiny[2] >= 0.5);
  CHECK(tiny[2] < 1.0);
  CHECK(std::ldexp(tiny[2], et) == 2e-300);
  double zero[4] = {0.0, 0.0, 0.0, 0.0};
  CHECK(rescale_vector(zero) == 0);
  CHECK(zero[0] == 0.0);
}

TEST_CASE("scalar kernels on a hand example") {
  const auto& k = scalar_kernels();
  const double m[16] = {1, 2, 3, 4, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  const double in[4] = {1, 1, 1, 1};
  double out[4];
  k.transition_apply(m, in, out, 1);
  CHECK(out[0] == 10.0);
  CHECK(out[1] == 1.0);
  const double a[4] = {2, 4, 0, 1}, b[4] = {1, 1, 5, 2};
  double c[4];
  std::int32_t e = 5;
  k.combine_rescale(a, b, c, &e, 1);
  CHECK(e == 8);
  CHECK(c[1] == 0.5);
  double d;
  k.dot(a, b, &d, 1);
  CHECK(d == 8.0);
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const PruningKernels* fast = avx2_kernels();
  if (!fast) {
    MESSAGE("AVX2 kernels unavailable on this machine; skipping");
    return;
  }
  const auto& ref = scalar_kernels();
  std::mt19937_64 rng(99);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 1001u}) {
    const auto m = random_block(4, rng);
    const auto in = random_block(n, rng, 0.2);
    std::vector<double> o1(4 * n), o2(4 * n);
    ref.transition_apply(m.data(), in.data(), o1.data(), n);
    fast->transition_apply(m.data(), in.data(), o2.data(), n);
    for (std::size_t i = 0; i < 4 * n; ++i) CHECK(close(o1[i], o2[i]));

    const auto a = random_block(n, rng, 0.3);
    const auto b = random_block(n, rng, 0.3);
    std::vector<std::int32_t> e1(n, 3), e2(n, 3);
    ref.combine_rescale(a.data(), b.data(), o1.data(), e1.data(), n);
    fast->combine_rescale(a.data(), b.data(), o2.data(), e2.data(), n);
    CHECK(e1 == e2);
    CHECK(o1 == o2);  // elementwise products and power-of-two scaling are exact

    std::vector<double> d1(n), d2(n);
    ref.dot(a.data(), b.data(), d1.data(), n);
    fast->dot(a.data(), b.data(), d2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(d1[i], d2[i]));
  }
}

TEST_CASE("kernel selection") {
  select_kernels(KernelChoice::kScalar);
  CHECK(active_kernels().name == scalar_kernels().name);
  if (avx2_kernels()) {
    select_kernels(KernelChoice::kAvx2);
    CHECK(active_kernels().name == avx2_kernels()->name);
  } else {
    CHECK_THROWS(select_kernels(KernelChoice::kAvx2));
  }
  select_kernels(KernelChoice::kAuto);
}
