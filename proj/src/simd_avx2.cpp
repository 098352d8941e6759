#include <immintrin.h>

#include "annihilator/simd.hpp"
#include "simd_scalar_inl.hpp"

namespace ann::simd {

namespace {

struct CellLookup {
  __m128i offset;  // 8 * cell index
  __m256d tau;
};

inline CellLookup locate(const CdfTable& t, __m256d x) {
  const __m256d s = _mm256_mul_pd(_mm256_add_pd(x, _mm256_set1_pd(1.0)),
                                  _mm256_set1_pd(t.half_cells));
  __m256d c = _mm256_min_pd(s, _mm256_set1_pd(t.last_cell));
  c = _mm256_max_pd(c, _mm256_setzero_pd());
  const __m128i k = _mm256_cvttpd_epi32(c);
  const __m256d tau = _mm256_sub_pd(s, _mm256_cvtepi32_pd(k));
  return {_mm_slli_epi32(k, 3), tau};
}

inline __m256d gather(const double* base, __m128i offset, int j) {
  return _mm256_i32gather_pd(base + j, offset, 8);
}

inline __m256d cdf_lanes(const CdfTable& t, __m256d x) {
  const CellLookup cell = locate(t, x);
  const __m256d tau = cell.tau;
  __m256d v = gather(t.value, cell.offset, 5);
  v = _mm256_add_pd(gather(t.value, cell.offset, 4), _mm256_mul_pd(tau, v));
  v = _mm256_add_pd(gather(t.value, cell.offset, 3), _mm256_mul_pd(tau, v));
  v = _mm256_add_pd(gather(t.value, cell.offset, 2), _mm256_mul_pd(tau, v));
  v = _mm256_add_pd(gather(t.value, cell.offset, 1), _mm256_mul_pd(tau, v));
  v = _mm256_add_pd(gather(t.value, cell.offset, 0), _mm256_mul_pd(tau, v));
  const __m256d below = _mm256_cmp_pd(x, _mm256_set1_pd(-kSaturation), _CMP_LE_OQ);
  const __m256d above = _mm256_cmp_pd(x, _mm256_set1_pd(kSaturation), _CMP_GE_OQ);
  v = _mm256_blendv_pd(v, _mm256_setzero_pd(), below);
  v = _mm256_blendv_pd(v, _mm256_set1_pd(1.0), above);
  return v;
}

inline __m256d density_lanes(const CdfTable& t, __m256d x) {
  const CellLookup cell = locate(t, x);
  const __m256d tau = cell.tau;
  __m256d v = gather(t.slope, cell.offset, 4);
  v = _mm256_add_pd(gather(t.slope, cell.offset, 3), _mm256_mul_pd(tau, v));
  v = _mm256_add_pd(gather(t.slope, cell.offset, 2), _mm256_mul_pd(tau, v));
  v = _mm256_add_pd(gather(t.slope, cell.offset, 1), _mm256_mul_pd(tau, v));
  v = _mm256_add_pd(gather(t.slope, cell.offset, 0), _mm256_mul_pd(tau, v));
  // v > 0 ? v : 0, matching the scalar select
  v = _mm256_and_pd(v, _mm256_cmp_pd(v, _mm256_setzero_pd(), _CMP_GT_OQ));
  const __m256d outside =
      _mm256_or_pd(_mm256_cmp_pd(x, _mm256_set1_pd(-kSaturation), _CMP_LE_OQ),
                   _mm256_cmp_pd(x, _mm256_set1_pd(kSaturation), _CMP_GE_OQ));
  return _mm256_blendv_pd(v, _mm256_setzero_pd(), outside);
}

void cdf_sum_avx2(const CdfTable& table, const ActiveTerm* terms, std::size_t term_count,
                  const double* xs, double* out, std::size_t count) {
  const std::size_t vec_end = count - count % 4;
  for (std::size_t t = 0; t < term_count; ++t) {
    const ActiveTerm& term = terms[t];
    const __m256d center = _mm256_set1_pd(term.center);
    const __m256d inv_width = _mm256_set1_pd(term.inv_width);
    const __m256d jump = _mm256_set1_pd(term.jump);
    for (std::size_t i = 0; i < vec_end; i += 4) {
      const __m256d arg = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + i), center), inv_width);
      const __m256d acc = _mm256_add_pd(_mm256_loadu_pd(out + i),
                                        _mm256_mul_pd(jump, cdf_lanes(table, arg)));
      _mm256_storeu_pd(out + i, acc);
    }
    detail::cdf_sum_range(table, &term, 1, xs, out, vec_end, count);
  }
}

void density_sum_avx2(const CdfTable& table, const ActiveTerm* terms, std::size_t term_count,
                      const double* xs, double* out, std::size_t count) {
  const std::size_t vec_end = count - count % 4;
  for (std::size_t t = 0; t < term_count; ++t) {
    const ActiveTerm& term = terms[t];
    const __m256d center = _mm256_set1_pd(term.center);
    const __m256d inv_width = _mm256_set1_pd(term.inv_width);
    const __m256d scale = _mm256_set1_pd(term.jump_inv_width);
    for (std::size_t i = 0; i < vec_end; i += 4) {
      const __m256d arg = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + i), center), inv_width);
      const __m256d acc = _mm256_add_pd(_mm256_loadu_pd(out + i),
                                        _mm256_mul_pd(scale, density_lanes(table, arg)));
      _mm256_storeu_pd(out + i, acc);
    }
    detail::density_sum_range(table, &term, 1, xs, out, vec_end, count);
  }
}

void horner_complex_avx2(const double* re, const double* im, std::size_t coef_count,
                         const double* xs, double* out_re, double* out_im, std::size_t count) {
  const std::size_t vec_end = count - count % 4;
  for (std::size_t i = 0; i < vec_end; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    __m256d r = _mm256_set1_pd(re[coef_count - 1]);
    __m256d m = _mm256_set1_pd(im[coef_count - 1]);
    for (std::size_t k = coef_count - 1; k-- > 0;) {
      r = _mm256_add_pd(_mm256_mul_pd(r, x), _mm256_set1_pd(re[k]));
      m = _mm256_add_pd(_mm256_mul_pd(m, x), _mm256_set1_pd(im[k]));
    }
    _mm256_storeu_pd(out_re + i, r);
    _mm256_storeu_pd(out_im + i, m);
  }
  detail::horner_complex_range(re, im, coef_count, xs, out_re, out_im, vec_end, count);
}

}  // namespace

const Kernels& avx2_kernels_table() {
  static const Kernels k{Isa::Avx2, "avx2", &cdf_sum_avx2, &density_sum_avx2,
                         &horner_complex_avx2};
  return k;
}

}  // namespace ann::simd
