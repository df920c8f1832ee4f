#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "gkp/special.hpp"

using namespace gkp;

namespace {

// erf(z) = 2/sqrt(pi) sum_n (-1)^n z^(2n+1) / (n! (2n+1)), summed in long double.
std::complex<long double> erf_series(std::complex<long double> z, int terms) {
  std::complex<long double> sum = 0, p = z;
  const std::complex<long double> z2 = z * z;
  for (int n = 0; n < terms; ++n) {
    sum += p / static_cast<long double>(2 * n + 1);
    p *= -z2 / static_cast<long double>(n + 1);
  }
  return sum * (2 / std::sqrt(static_cast<long double>(M_PI)));
}

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(ComplexErf, Origin) { EXPECT_EQ(complex_erf(0.0), cplx(0.0, 0.0)); }

TEST(ComplexErf, RealOne) {
  const cplx oracle(static_cast<double>(erf_series(1.0L, 30).real()), 0.0);
  EXPECT_NEAR(oracle.real(), 0.8427007929497149, 1e-15);
  EXPECT_NEAR(complex_erf(1.0).real(), 0.8427007929497149, 1e-15);
  EXPECT_LT(rel_err(complex_erf(1.0), oracle), 1e-14);
}

TEST(ComplexErf, ImaginaryUnit) {
  const cplx v = complex_erf(cplx(0.0, 1.0));
  EXPECT_NEAR(v.imag(), 1.6504257587975429, 1e-14);
  EXPECT_NEAR(v.real(), 0.0, 1e-16);
  const auto oracle = erf_series({0.0L, 1.0L}, 30);
  EXPECT_NEAR(v.imag(), static_cast<double>(oracle.imag()), 1e-14);
}

TEST(ComplexErf, MatchesSeriesInsideDisc) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const cplx z(u(rng), u(rng));
    const auto s = erf_series({z.real(), z.imag()}, 80);
    EXPECT_LT(rel_err(complex_erf(z), cplx(static_cast<double>(s.real()), static_cast<double>(s.imag()))), 1e-13)
        << z;
  }
}

// Values from a 30-digit arbitrary-precision evaluation.
TEST(ComplexErf, StripReferenceValues) {
  const std::pair<cplx, cplx> ref[] = {
      {{0.5, 0.5}, {0.64261291485482053, 0.45788139443519222}},
      {{2.0, -3.0}, {-20.829461427614568, -8.6873182714701631}},
      {{-1.5, 7.0}, {-1.4937900509804787e+19, -5.6972697042695521e+18}},
      {{3.0, 9.5}, {1.5618074042797551e+33, 1.0885849950244908e+34}},
      {{0.1, -10.0}, {1.3784606413850442e+42, 6.1409761285015489e+41}},
      {{6.0, 0.2}, {1.0, 1.4577607364467362e-17}},
      {{-0.3, 2.5}, {-114.49450947459658, 26.191395067040959}},
  };
  for (const auto& [z, w] : ref) EXPECT_LT(rel_err(complex_erf(z), w), 1e-13) << z;
}

TEST(ComplexErf, Symmetries) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const cplx z(u(rng), u(rng));
    const cplx e = complex_erf(z);
    EXPECT_LT(rel_err(complex_erf(-z), -e), 1e-14);
    EXPECT_LT(rel_err(complex_erf(std::conj(z)), std::conj(e)), 1e-14);
    EXPECT_LT(std::abs(erfc<double>(z) + e - 1.0), 1e-13 * std::max(1.0, std::abs(e)));
  }
}

TEST(ComplexErf, HugeRealPartSaturates) {
  EXPECT_NEAR(complex_erf(cplx(1e6, 0.3)).real(), 1.0, 1e-15);
  EXPECT_NEAR(complex_erf(cplx(-1e6, 0.3)).real(), -1.0, 1e-15);
  EXPECT_TRUE(std::isfinite(complex_erf(cplx(40.0, 9.0)).real()));
}

TEST(ComplexErf, LongDoubleAgreesWithDouble) {
  const std::complex<long double> z(0.7L, -1.3L);
  const auto a = erf<long double>(z);
  const cplx b = complex_erf(cplx(0.7, -1.3));
  EXPECT_LT(std::abs(cplx(static_cast<double>(a.real()), static_cast<double>(a.imag())) - b), 1e-14);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly) {
  const QuadRule r = gauss_legendre(8);
  for (int p = 0; p < 16; ++p) {
    double s = 0;
    for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], p);
    EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14) << p;
  }
}

TEST(Quadrature, GaussLegendreInterval) {
  const QuadRule r = gauss_legendre(12, 0.5, 2.0);
  double s = 0;
  for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::exp(r.x[i]);
  EXPECT_NEAR(s, std::exp(2.0) - std::exp(0.5), 1e-13);
}

TEST(Quadrature, GaussHermiteMoments) {
  const QuadRule r = gauss_hermite(64);
  double m0 = 0, m2 = 0, m4 = 0;
  for (size_t i = 0; i < r.x.size(); ++i) {
    m0 += r.w[i];
    m2 += r.w[i] * r.x[i] * r.x[i];
    m4 += r.w[i] * std::pow(r.x[i], 4);
  }
  const double sp = std::sqrt(M_PI);
  EXPECT_NEAR(m0, sp, 1e-13);
  EXPECT_NEAR(m2, sp / 2, 1e-13);
  EXPECT_NEAR(m4, 3 * sp / 4, 1e-13);
}

TEST(HermiteFunction, ValuesAtOrigin) {
  EXPECT_NEAR(hermite_function(0, 0.0), std::pow(M_PI, -0.25), 1e-15);
  EXPECT_EQ(hermite_function(1, 0.0), 0.0);
}

TEST(HermiteFunction, NormalizedByQuadrature) {
  const QuadRule r = gauss_legendre(200, -15.0, 15.0);
  double s = 0, cross = 0;
  for (size_t i = 0; i < r.x.size(); ++i) {
    const auto h = hermite_functions(7, r.x[i]);
    s += r.w[i] * h[5] * h[5];
    cross += r.w[i] * h[5] * h[7];
  }
  EXPECT_NEAR(s, 1.0, 1e-10);
  EXPECT_NEAR(cross, 0.0, 1e-10);
}

TEST(HermiteFunction, StableAtHighOrder) {
  for (double x : {0.0, 1.77, 10.0, 20.0, 30.0}) {
    const auto h = hermite_functions(399, x);
    for (double v : h) ASSERT_TRUE(std::isfinite(v)) << x;
    EXPECT_LT(std::abs(h[399]), 1.0);
  }
  // Far outside the classical region every level underflows to zero instead of overflowing.
  const auto far = hermite_functions(50, 60.0);
  for (double v : far) EXPECT_EQ(v, 0.0);
}

TEST(HermiteFunction, SingleMatchesBatch) {
  const auto h = hermite_functions(40, 2.3);
  for (int n : {0, 3, 17, 40}) EXPECT_DOUBLE_EQ(hermite_function(n, 2.3), h[n]);
}
