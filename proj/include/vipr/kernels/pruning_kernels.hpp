#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace vipr::kernels {

/// Batched 4-state pruning primitives. All buffers hold `n` consecutive
/// length-4 vectors (one per site pattern), 32-byte alignment not required.
struct PruningKernels {
  /// out[p] = M * in[p] for a row-major 4x4 M.
  void (*transition_apply)(const double* m, const double* in, double* out, std::size_t n);
  /// out[p] = a[p] * b[p] elementwise, then out[p] is multiplied by 2^-e so
  /// its largest entry lies in [0.5, 1); e is added to exponents[p]. All-zero
  /// vectors are left untouched.
  void (*combine_rescale)(const double* a, const double* b, double* out,
                          std::int32_t* exponents, std::size_t n);
  /// out[p] = <a[p], b[p]>.
  void (*dot)(const double* a, const double* b, double* out, std::size_t n);
  std::string_view name;
};

enum class KernelChoice { kAuto, kScalar, kAvx2 };

const PruningKernels& scalar_kernels();
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const PruningKernels* avx2_kernels();

/// Kernel set used by the likelihood engine. kAuto (the default) picks the
/// widest variant the CPU supports; the VIPR_KERNELS environment variable
/// ("scalar" / "avx2") overrides the automatic choice at first use.
const PruningKernels& active_kernels();
/// Throws std::runtime_error if the requested variant is unavailable.
void select_kernels(KernelChoice choice);

/// Shared helper: rescale one 4-vector in place, returning the exponent.
std::int32_t rescale_vector(double* v);

}  // namespace vipr::kernels
