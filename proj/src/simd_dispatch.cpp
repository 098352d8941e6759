#include <cstdlib>
#include <string_view>

#include "annihilator/simd.hpp"

namespace ann::simd {

#if defined(ANNIHILATOR_HAVE_AVX2)
const Kernels& avx2_kernels_table();
#endif

const Kernels* avx2_kernels() {
#if defined(ANNIHILATOR_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernels_table() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels& active_kernels() {
  static const Kernels* chosen = [] {
    const char* env = std::getenv("ANNIHILATOR_SIMD");
    const std::string_view request = env ? env : "";
    if (request == "scalar") return &scalar_kernels();
    if (const Kernels* k = avx2_kernels()) return k;
    return &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace ann::simd
