#pragma once

#include <complex>
#include <vector>

#include "gkp/types.hpp"

namespace gkp {

// Faddeeva function w(z) = exp(-z^2) erfc(-iz). Instantiated for double and long double.
template <class T>
std::complex<T> faddeeva(std::complex<T> z);

template <class T>
std::complex<T> erfc(std::complex<T> z);

template <class T>
std::complex<T> erf(std::complex<T> z);

inline cplx complex_erf(cplx z) { return erf<double>(z); }

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Nodes and weights on [-1, 1].
QuadRule gauss_legendre(int n);

// Nodes and weights for the weight function exp(-x^2) on the real line.
QuadRule gauss_hermite(int n);

// Maps a Gauss-Legendre rule onto (a, b].
QuadRule gauss_legendre(int n, double a, double b);

// Orthonormal oscillator eigenfunctions psi_0..psi_nmax at x, scaled recurrence.
std::vector<double> hermite_functions(int nmax, double x);

double hermite_function(int n, double x);

}  // namespace gkp
