#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "annihilator/mollifier.hpp"
#include "annihilator/simd.hpp"

using namespace ann;

namespace {

std::vector<simd::ActiveTerm> random_terms(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> c(-0.2, 1.2);
  std::uniform_real_distribution<double> w(1e-6, 0.5);
  std::uniform_real_distribution<double> j(-7.0, 7.0);
  std::vector<simd::ActiveTerm> out;
  for (int i = 0; i < count; ++i) {
    const double inv = 1.0 / w(rng);
    const double jump = j(rng);
    out.push_back({c(rng), inv, jump, jump * inv});
  }
  return out;
}

std::vector<double> random_points(std::mt19937_64& rng, const std::vector<simd::ActiveTerm>& terms,
                                  std::size_t count) {
  std::uniform_real_distribution<double> u(-0.3, 1.3);
  std::uniform_int_distribution<int> pick(0, 9);
  std::vector<double> xs;
  for (std::size_t i = 0; i < count; ++i) {
    // Some points sit exactly on support edges and centres.
    const auto& t = terms[i % terms.size()];
    switch (pick(rng)) {
      case 0: xs.push_back(t.center + 1.0 / t.inv_width); break;
      case 1: xs.push_back(t.center - 1.0 / t.inv_width); break;
      case 2: xs.push_back(t.center); break;
      default: xs.push_back(u(rng));
    }
  }
  return xs;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("dispatch reports a usable kernel set") {
  const simd::Kernels& k = simd::active_kernels();
  CHECK(k.name != nullptr);
  CHECK(simd::scalar_kernels().isa == simd::Isa::Scalar);
  if (const simd::Kernels* v = simd::avx2_kernels()) CHECK(v->isa == simd::Isa::Avx2);
}

TEST_CASE("avx2 cdf and density sums are bit-identical to scalar") {
  const simd::Kernels* avx = simd::avx2_kernels();
  if (!avx) {
    MESSAGE("AVX2 kernels unavailable on this machine; nothing to compare");
    return;
  }
  const simd::Kernels& ref = simd::scalar_kernels();
  const simd::CdfTable& table = Mollifier::standard().table();
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto terms = random_terms(rng, 1 + trial % 9);
    const std::size_t count = 1 + static_cast<std::size_t>(trial % 37);  // ragged tails
    const auto xs = random_points(rng, terms, count);
    std::vector<double> a(count, 0.25), b(count, 0.25);
    simd::cdf_sum(ref, table, terms, xs, a);
    simd::cdf_sum(*avx, table, terms, xs, b);
    REQUIRE(same_bits(a, b));
    std::vector<double> da(count, -1.0), db(count, -1.0);
    simd::density_sum(ref, table, terms, xs, da);
    simd::density_sum(*avx, table, terms, xs, db);
    REQUIRE(same_bits(da, db));
  }
}

TEST_CASE("avx2 horner is bit-identical to scalar") {
  const simd::Kernels* avx = simd::avx2_kernels();
  if (!avx) {
    MESSAGE("AVX2 kernels unavailable on this machine; nothing to compare");
    return;
  }
  const simd::Kernels& ref = simd::scalar_kernels();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t deg = static_cast<std::size_t>(trial % 13);
    std::vector<double> re(deg + 1), im(deg + 1);
    for (std::size_t k = 0; k <= deg; ++k) {
      re[k] = u(rng);
      im[k] = u(rng);
    }
    const std::size_t count = 1 + static_cast<std::size_t>(trial % 23);
    std::vector<double> xs(count);
    for (double& x : xs) x = u(rng);
    std::vector<double> ar(count), ai(count), br(count), bi(count);
    simd::horner_complex(ref, re, im, xs, ar, ai);
    simd::horner_complex(*avx, re, im, xs, br, bi);
    REQUIRE(same_bits(ar, br));
    REQUIRE(same_bits(ai, bi));
  }
}

TEST_CASE("scalar kernels agree with the mollifier") {
  const simd::CdfTable& table = Mollifier::standard().table();
  const Mollifier& m = Mollifier::standard();
  const simd::ActiveTerm term{0.5, 4.0, 2.0, 8.0};
  const std::vector<simd::ActiveTerm> terms{term};
  const std::vector<double> xs{0.0, 0.3, 0.5, 0.7, 0.75, 1.0};
  std::vector<double> v(xs.size(), 0.0), d(xs.size(), 0.0);
  simd::cdf_sum(simd::scalar_kernels(), table, terms, xs, v);
  simd::density_sum(simd::scalar_kernels(), table, terms, xs, d);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double s = (xs[i] - 0.5) * 4.0;
    CHECK(v[i] == doctest::Approx(2.0 * m.cdf(s)).epsilon(1e-15));
    CHECK(d[i] == doctest::Approx(8.0 * m.density(s)).epsilon(1e-12).scale(1.0));
  }
}
