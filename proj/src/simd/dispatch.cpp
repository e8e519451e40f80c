#include <cstdlib>
#include <string_view>

#include "qrng/simd/bit_kernels.hpp"

namespace qrng::simd {

#if defined(QRNG_HAVE_AVX2)
const BitKernels& avx2_kernel_table();  // bit_kernels_avx2.cpp
#endif

const BitKernels* avx2_kernels() {
#if defined(QRNG_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const BitKernels& active_kernels() {
  static const BitKernels& chosen = []() -> const BitKernels& {
    const char* env = std::getenv("QRNG_SIMD");
    if (env && std::string_view(env) == "scalar") return scalar_kernels();
    if (const BitKernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace qrng::simd
