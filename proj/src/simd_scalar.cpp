#include "annihilator/simd.hpp"

#include "simd_scalar_inl.hpp"

namespace ann::simd {

namespace {

void cdf_sum_scalar(const CdfTable& table, const ActiveTerm* terms, std::size_t term_count,
                    const double* xs, double* out, std::size_t count) {
  detail::cdf_sum_range(table, terms, term_count, xs, out, 0, count);
}

void density_sum_scalar(const CdfTable& table, const ActiveTerm* terms, std::size_t term_count,
                        const double* xs, double* out, std::size_t count) {
  detail::density_sum_range(table, terms, term_count, xs, out, 0, count);
}

void horner_complex_scalar(const double* re, const double* im, std::size_t coef_count,
                           const double* xs, double* out_re, double* out_im, std::size_t count) {
  detail::horner_complex_range(re, im, coef_count, xs, out_re, out_im, 0, count);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{Isa::Scalar, "scalar", &cdf_sum_scalar, &density_sum_scalar,
                         &horner_complex_scalar};
  return k;
}

}  // namespace ann::simd
