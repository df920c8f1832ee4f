#include "gkp/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gkp {

namespace {

template <class T>
constexpr T sqrt_pi() {
  return static_cast<T>(1.772453850905516027298167483341145183L);
}

template <class T>
constexpr T pi() {
  return static_cast<T>(3.141592653589793238462643383279502884L);
}

// Laplace continued fraction; used for Im z > 6 or |Re z| > 20.
template <class T>
std::complex<T> faddeeva_cf(std::complex<T> z) {
  const int depth = std::is_same_v<T, double> ? 64 : 96;
  std::complex<T> t(0);
  for (int k = depth; k >= 1; --k) t = (static_cast<T>(k) / 2) / (z - t);
  return std::complex<T>(0, 1) / (sqrt_pi<T>() * (z - t));
}

// Trapezoidal discretization of (i/pi) int exp(-t^2)/(z - t) dt with the
// pole correction; valid for Im z >= 0. The grid (integer or half-integer
// nodes) is chosen so that Re z stays at least h/4 away from every node.
template <class T>
std::complex<T> faddeeva_trap(std::complex<T> z) {
  const T h = static_cast<T>(0.45L);
  const int nmax = 20;
  const std::complex<T> I(0, 1);
  const T u = z.real() / h;
  const T frac = u - std::floor(u);
  const bool integer_grid = std::abs(frac - std::round(frac)) >= static_cast<T>(0.25);
  const std::complex<T> z2 = z * z;
  std::complex<T> s(0);
  if (integer_grid) {
    for (int n = nmax; n >= 1; --n) {
      const T t = n * h;
      s += std::exp(-t * t) / (z2 - t * t);
    }
    s = static_cast<T>(2) * z * s + static_cast<T>(1) / z;
  } else {
    for (int n = nmax; n >= 0; --n) {
      const T t = (n + static_cast<T>(0.5)) * h;
      s += std::exp(-t * t) / (z2 - t * t);
    }
    s = static_cast<T>(2) * z * s;
  }
  std::complex<T> w = I * h * s / pi<T>();
  const std::complex<T> e = std::exp(-static_cast<T>(2) * pi<T>() * I * z / h);
  const std::complex<T> denom = integer_grid ? static_cast<T>(1) - e : static_cast<T>(1) + e;
  w += static_cast<T>(2) * std::exp(-z2) / denom;
  return w;
}

}  // namespace

template <class T>
std::complex<T> faddeeva(std::complex<T> z) {
  if (z.imag() < 0) return static_cast<T>(2) * std::exp(-z * z) - faddeeva<T>(-z);
  if (std::abs(z.real()) > 20 || z.imag() > 6) return faddeeva_cf<T>(z);
  return faddeeva_trap<T>(z);
}

template <class T>
std::complex<T> erfc(std::complex<T> z) {
  if (z.real() < 0) return static_cast<T>(2) - erfc<T>(-z);
  const std::complex<T> iz(-z.imag(), z.real());
  const std::complex<T> e = std::exp(-z * z);
  if (e == std::complex<T>(0)) return std::complex<T>(0);
  return e * faddeeva<T>(iz);
}

template <class T>
std::complex<T> erf(std::complex<T> z) {
  if (std::abs(z) < 1) {
    // Maclaurin series: (2/sqrt(pi)) sum (-1)^n z^(2n+1) / (n! (2n+1)).
    const std::complex<T> z2 = z * z;
    std::complex<T> term = z;
    std::complex<T> sum = z;
    for (int n = 1; n < 60; ++n) {
      term *= -z2 / static_cast<T>(n);
      const std::complex<T> add = term / static_cast<T>(2 * n + 1);
      sum += add;
      if (std::abs(add) < std::numeric_limits<T>::epsilon() * std::abs(sum) * static_cast<T>(0.25)) break;
    }
    return static_cast<T>(2) / sqrt_pi<T>() * sum;
  }
  if (z.real() >= 0) return static_cast<T>(1) - erfc<T>(z);
  return erfc<T>(-z) - static_cast<T>(1);
}

template std::complex<double> faddeeva<double>(std::complex<double>);
template std::complex<long double> faddeeva<long double>(std::complex<long double>);
template std::complex<double> erfc<double>(std::complex<double>);
template std::complex<long double> erfc<long double>(std::complex<long double>);
template std::complex<double> erf<double>(std::complex<double>);
template std::complex<long double> erf<long double>(std::complex<long double>);

QuadRule gauss_legendre(int n) {
  if (n < 1) throw Error(Errc::domain, "gauss_legendre: n must be positive");
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1, p2 = 0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2 / ((1 - z * z) * pp * pp);
  }
  return r;
}

QuadRule gauss_legendre(int n, double a, double b) {
  QuadRule r = gauss_legendre(n);
  const double c = 0.5 * (b - a), m = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = m + c * r.x[i];
    r.w[i] *= c;
  }
  return r;
}

QuadRule gauss_hermite(int n) {
  if (n < 1) throw Error(Errc::domain, "gauss_hermite: n must be positive");
  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  QuadRule r;
  r.x.assign(n, 0);
  r.w.assign(n, 0);
  const int m = (n + 1) / 2;
  double z = 0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
    else if (i == 1) z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2) z = 1.86 * z - 0.86 * r.x[0];
    else if (i == 3) z = 1.91 * z - 0.91 * r.x[1];
    else z = 2 * z - r.x[i - 2];
    double pp = 0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    r.x[i] = z;
    r.x[n - 1 - i] = -z;
    r.w[i] = r.w[n - 1 - i] = 2 / (pp * pp);
  }
  std::reverse(r.x.begin(), r.x.end());
  std::reverse(r.w.begin(), r.w.end());
  if (n % 2 == 1) r.x[n / 2] = 0;
  return r;
}

std::vector<double> hermite_functions(int nmax, double x) {
  if (nmax < 0) throw Error(Errc::domain, "hermite_functions: negative order");
  std::vector<double> out(nmax + 1, 0.0);
  // Carry p_n with a separate log scale so that exp(-x^2/2) never underflows
  // before the polynomial growth compensates it.
  double logscale = -0.5 * x * x;
  double pm1 = 0, p = 0.7511255444649425;
  out[0] = p * std::exp(logscale);
  for (int n = 0; n < nmax; ++n) {
    const double pn = std::sqrt(2.0 / (n + 1)) * x * p - std::sqrt(static_cast<double>(n) / (n + 1)) * pm1;
    pm1 = p;
    p = pn;
    const double a = std::abs(p);
    if (a > 1e150 || (a < 1e-150 && a > 0)) {
      const double l = std::log(a);
      p /= a;
      pm1 /= a;
      logscale += l;
    }
    out[n + 1] = p * std::exp(logscale);
  }
  return out;
}

double hermite_function(int n, double x) { return hermite_functions(n, x)[n]; }

}  // namespace gkp
