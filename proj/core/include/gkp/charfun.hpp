#pragma once

#include <optional>
#include <vector>

#include "gkp/types.hpp"

namespace gkp {

// amp * exp(-x^T Q x + l^T x) over a real vector x; Q complex symmetric.
struct GaussianForm {
  cplx amp{1.0, 0.0};
  CMat Q;
  CVec l;

  int size() const { return static_cast<int>(Q.rows()); }
  cplx operator()(const Vec& x) const;
  cplx exponent(const Vec& x) const;
};

enum class KernelKind {
  regular,         // c(u, v) = form(u, v)
  diagonal_delta,  // c(u, v) = form(u) * delta(u - v)
  identity,        // c(u, v) = delta(u) delta(v)
};

// Channel characteristic function kernel: N(rho) = int c(u, v) W(u) rho W(v)^dag du dv.
struct GaussianKernel {
  KernelKind kind = KernelKind::regular;
  int modes = 1;
  GaussianForm form;

  bool delta_constrained() const { return kind != KernelKind::regular; }
  // Regular kernels: c(u, v). Delta kernels: the density f(u) when u == v (to 1e-12), else 0.
  cplx evaluate(const Vec& u, const Vec& v) const;
  // Density against delta(u - v) at u (delta kernels); regular kernels return c(u, u).
  cplx diagonal(const Vec& u) const;
};

struct KernelTerm {
  cplx weight{1.0, 0.0};
  GaussianKernel kernel;
};

struct PhaseQuadrature {
  std::vector<double> phi;
  std::vector<double> weight;
};

struct ChannelCharFn {
  int modes = 1;
  std::vector<KernelTerm> terms;
  std::optional<PhaseQuadrature> quadrature;

  cplx evaluate(const Vec& u, const Vec& v) const;
  cplx diagonal(const Vec& u) const;
};

ChannelCharFn single(const GaussianKernel& k);

// Operator characteristic function of the Gaussian unitary U_S, tr(U_S) with zero phase.
GaussianForm gaussian_unitary_charfun(const Mat& s);

// Operator characteristic function of exp(-z n) on one mode, Re z > 0 or z imaginary nonzero.
GaussianForm number_damping_charfun(cplx z);

// Kernel of rho -> A rho A^dag from the operator characteristic function of A.
GaussianKernel kraus_kernel(const GaussianForm& a, int modes);

GaussianKernel gaussian_channel_charfun(const Mat& t, const Mat& n);
GaussianKernel identity_kernel(int modes);

GaussianKernel envelope_charfun(double delta);
ChannelCharFn loss_charfun(double gamma, int modes = 1);
ChannelCharFn amplification_charfun(double g, int modes = 1);
ChannelCharFn random_displacement_charfun(double sigma, int modes = 1);
ChannelCharFn dephased_envelope_charfun(double sigma, double delta, int nodes = 64);

// Characteristic function of outer o inner.
ChannelCharFn compose(const ChannelCharFn& outer, const ChannelCharFn& inner);
GaussianKernel compose(const GaussianKernel& outer, const GaussianKernel& inner);

// Gaussian state characteristic function exp(-pi v^T Omega V Omega^T v - i pi (Omega mu)^T v).
GaussianForm gaussian_state_charfun(const Vec& mean, const Mat& cov);
void gaussian_state_moments(const GaussianForm& c, Vec& mean, Mat& cov);
// Characteristic function of N(rho) for a Gaussian state rho.
GaussianForm apply_channel(const ChannelCharFn& channel, const GaussianForm& state);

// |int du int dv c(u + v, v) exp(-i pi u^T Omega v) - 1|; zero for trace-preserving channels.
double tp_residual(const ChannelCharFn& channel);

}  // namespace gkp
