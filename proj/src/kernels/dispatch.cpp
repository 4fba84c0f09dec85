#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "vipr/kernels/pruning_kernels.hpp"

namespace vipr::kernels {

#if defined(VIPR_HAVE_AVX2)
const PruningKernels& avx2_kernel_table();
#endif

const PruningKernels* avx2_kernels() {
#if defined(VIPR_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const PruningKernels* choose(KernelChoice choice) {
  switch (choice) {
    case KernelChoice::kScalar:
      return &scalar_kernels();
    case KernelChoice::kAvx2:
      if (const auto* k = avx2_kernels()) return k;
      throw std::runtime_error("AVX2 kernels are not available on this build or CPU");
    case KernelChoice::kAuto:
      break;
  }
  if (const char* env = std::getenv("VIPR_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return &scalar_kernels();
    if (v == "avx2") return choose(KernelChoice::kAvx2);
  }
  if (const auto* k = avx2_kernels()) return k;
  return &scalar_kernels();
}

std::atomic<const PruningKernels*> g_active{nullptr};

}  // namespace

const PruningKernels& active_kernels() {
  const PruningKernels* k = g_active.load(std::memory_order_acquire);
  if (!k) {
    k = choose(KernelChoice::kAuto);
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

void select_kernels(KernelChoice choice) {
  g_active.store(choose(choice), std::memory_order_release);
}

}  // namespace vipr::kernels
