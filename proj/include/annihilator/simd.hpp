#pragma once

// Data-parallel inner loops of the quadrature hot path.
//
// Each kernel has a scalar reference and (on x86-64) an AVX2 variant. The
// variant is chosen once at runtime from CPUID, and can be forced with
// ANNIHILATOR_SIMD=scalar|avx2. Both variants are compiled without
// floating-point contraction and perform the same operations in the same
// order, so their outputs are bit-identical.

#include <cstddef>
#include <span>

namespace ann::simd {

enum class Isa { Scalar, Avx2 };

/// Piecewise quintic tabulation of the mollifier CDF on [-1, 1]. Cell k covers
/// [-1 + k/half_cells, -1 + (k+1)/half_cells]; in the local coordinate
/// tau in [0, 1] the CDF is value[8k] + tau*(value[8k+1] + ...) and its
/// x-derivative is slope[8k] + tau*(slope[8k+1] + ...).
// |x| past this edge saturates to exactly 0 or 1. The true tail there is
// below exp(-1000) and underflows anyway.
inline constexpr double kSaturation = 1.0 - 0x1p-11;

struct CdfTable {
  const double* value = nullptr;
  const double* slope = nullptr;
  int cells = 0;
  double half_cells = 0.0;
  double last_cell = 0.0;
};

/// One mollified jump restricted to a batch where it is not constant.
struct ActiveTerm {
  double center;
  double inv_width;
  double jump;
  double jump_inv_width;  // jump * inv_width, precomputed so all variants agree
};

struct Kernels {
  Isa isa;
  const char* name;
  /// out[i] += sum_t jump_t * Psi((x_i - center_t) * inv_width_t)
  void (*cdf_sum)(const CdfTable& table, const ActiveTerm* terms, std::size_t term_count,
                  const double* xs, double* out, std::size_t count);
  /// out[i] += sum_t jump_t * inv_width_t * psi((x_i - center_t) * inv_width_t)
  void (*density_sum)(const CdfTable& table, const ActiveTerm* terms, std::size_t term_count,
                      const double* xs, double* out, std::size_t count);
  /// Complex polynomial with ascending coefficients re + i*im at real points.
  void (*horner_complex)(const double* re, const double* im, std::size_t coef_count,
                         const double* xs, double* out_re, double* out_im, std::size_t count);
};

const Kernels& scalar_kernels();

/// AVX2 variant, or nullptr when it was not compiled in or the CPU lacks AVX2.
const Kernels* avx2_kernels();

/// Kernels used by the library. Resolved on first call.
const Kernels& active_kernels();

inline void cdf_sum(const Kernels& k, const CdfTable& table, std::span<const ActiveTerm> terms,
                    std::span<const double> xs, std::span<double> out) {
  k.cdf_sum(table, terms.data(), terms.size(), xs.data(), out.data(), xs.size());
}

inline void density_sum(const Kernels& k, const CdfTable& table, std::span<const ActiveTerm> terms,
                        std::span<const double> xs, std::span<double> out) {
  k.density_sum(table, terms.data(), terms.size(), xs.data(), out.data(), xs.size());
}

inline void horner_complex(const Kernels& k, std::span<const double> re, std::span<const double> im,
                           std::span<const double> xs, std::span<double> out_re,
                           std::span<double> out_im) {
  k.horner_complex(re.data(), im.data(), re.size(), xs.data(), out_re.data(), out_im.data(),
                   xs.size());
}

}  // namespace ann::simd
