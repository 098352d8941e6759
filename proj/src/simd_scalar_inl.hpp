#pragma once

// Scalar reference loops. Included by every kernel TU so that vector
// variants can hand their remainder lanes to exactly the same code.

#include <cstddef>

#include "annihilator/simd.hpp"

namespace ann::simd::detail {

inline double clamp_cell(double s, double last) {
  double c = s < last ? s : last;
  return c > 0.0 ? c : 0.0;
}

inline double cdf_point(const CdfTable& t, double x) {
  if (x <= -kSaturation) return 0.0;
  if (x >= kSaturation) return 1.0;
  const double s = (x + 1.0) * t.half_cells;
  const int k = static_cast<int>(clamp_cell(s, t.last_cell));
  const double tau = s - static_cast<double>(k);
  const double* c = t.value + 8 * k;
  return c[0] + tau * (c[1] + tau * (c[2] + tau * (c[3] + tau * (c[4] + tau * c[5]))));
}

inline double density_point(const CdfTable& t, double x) {
  if (x <= -kSaturation || x >= kSaturation) return 0.0;
  const double s = (x + 1.0) * t.half_cells;
  const int k = static_cast<int>(clamp_cell(s, t.last_cell));
  const double tau = s - static_cast<double>(k);
  const double* c = t.slope + 8 * k;
  const double v = c[0] + tau * (c[1] + tau * (c[2] + tau * (c[3] + tau * c[4])));
  return v > 0.0 ? v : 0.0;
}

inline void cdf_sum_range(const CdfTable& table, const ActiveTerm* terms, std::size_t term_count,
                          const double* xs, double* out, std::size_t begin, std::size_t end) {
  for (std::size_t t = 0; t < term_count; ++t) {
    const ActiveTerm& term = terms[t];
    for (std::size_t i = begin; i < end; ++i) {
      const double arg = (xs[i] - term.center) * term.inv_width;
      out[i] = out[i] + term.jump * cdf_point(table, arg);
    }
  }
}

inline void density_sum_range(const CdfTable& table, const ActiveTerm* terms,
                              std::size_t term_count, const double* xs, double* out,
                              std::size_t begin, std::size_t end) {
  for (std::size_t t = 0; t < term_count; ++t) {
    const ActiveTerm& term = terms[t];
    for (std::size_t i = begin; i < end; ++i) {
      const double arg = (xs[i] - term.center) * term.inv_width;
      out[i] = out[i] + term.jump_inv_width * density_point(table, arg);
    }
  }
}

inline void horner_complex_range(const double* re, const double* im, std::size_t coef_count,
                                 const double* xs, double* out_re, double* out_im,
                                 std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    const double x = xs[i];
    double r = re[coef_count - 1];
    double m = im[coef_count - 1];
    for (std::size_t k = coef_count - 1; k-- > 0;) {
      r = r * x + re[k];
      m = m * x + im[k];
    }
    out_re[i] = r;
    out_im[i] = m;
  }
}

}  // namespace ann::simd::detail
