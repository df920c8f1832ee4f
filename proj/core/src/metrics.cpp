#include "gkp/metrics.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace gkp {

namespace {

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

std::vector<CMatL> sigma_basis(const std::vector<int>& dims) {
  const int np = pauli_count(dims);
  std::vector<CMatL> out(np);
  for (int a = 0; a < np; ++a) out[a] = pauli_matrix(dims, pauli_label(dims, a)).cast<cplxl>();
  return out;
}

// sum over (a, b) != (0, 0) of chi_ab sigma_b^dag sigma_a; the (0, 0) term is chi_00 * I.
CMatL gram_remainder(const CMatL& chi, const std::vector<CMatL>& sig) {
  const int np = static_cast<int>(sig.size());
  const int d = static_cast<int>(sig[0].rows());
  CMatL rest = CMatL::Zero(d, d);
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b) {
      if ((a == 0 && b == 0) || chi(a, b) == cplxl(0)) continue;
      rest += chi(a, b) * sig[b].adjoint() * sig[a];
    }
  return rest;
}

// (1 + x)^(-1/2) - 1 without cancellation.
long double inv_sqrt_m1(long double x) { return std::expm1(-0.5L * std::log1p(x)); }

LowdinResult lowdin_impl(const LogicalSuperop& e, long double base, const CMatL& rest) {
  const auto& dims = e.dims();
  const int d = e.logical_dim();
  if (!(base > 0)) throw Error(Errc::degenerate, "lowdin_orthonormalize: Gram matrix is not positive definite");
  LowdinResult out;
  OrthoMatrix& o = out.ortho;
  o.gram = base * CMatL::Identity(d, d) + rest;

  std::vector<long double> x(d), nrm(d);
  for (int m = 0; m < d; ++m) {
    const long double rel = rest(m, m).real() / base;
    if (!(rel > -1)) throw Error(Errc::degenerate, "lowdin_orthonormalize: Gram matrix is not positive definite");
    x[m] = inv_sqrt_m1(rel);
    nrm[m] = std::sqrt(base) * std::sqrt(1 + rel);
  }
  CMatL E = CMatL::Zero(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      if (m != n) E(m, n) = rest(m, n) / (nrm[m] * nrm[n]);
  E = 0.5L * (E + E.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatL> es(E);
  CMatL F = CMatL::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const long double lam = es.eigenvalues()[i];
    if (!(1 + lam > 0)) throw Error(Errc::degenerate, "lowdin_orthonormalize: Gram matrix is not positive definite");
    F += inv_sqrt_m1(lam) * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  CMatL X = CMatL::Zero(d, d);
  for (int m = 0; m < d; ++m) X(m, m) = x[m];
  o.c0 = 1 / std::sqrt(base);
  o.delta = X + F + X * F;

  if (d == 2) {
    o.n0 = nrm[0];
    o.n1 = nrm[1];
    o.r = std::abs(E(0, 1));
    o.phi = o.r < 1e-14L ? 0.0L : std::arg(o.gram(0, 1));
    const long double a = 1 / std::sqrt(1 + o.r), b = 1 / std::sqrt(1 - o.r);
    o.r_plus = a + b;
    o.r_minus = a - b;
  }

  // sigma_a C = sum_c K_ac sigma_c with K = c0 (I + k), k_ac = tr(sigma_c^dag sigma_a delta) / d.
  const auto sig = sigma_basis(dims);
  const int np = static_cast<int>(sig.size());
  CMatL K = CMatL::Identity(np, np);
  for (int a = 0; a < np; ++a) {
    const CMatL sd = sig[a] * o.delta;
    for (int c = 0; c < np; ++c) K(a, c) += (sig[c].adjoint() * sd).trace() / static_cast<long double>(d);
  }
  K *= o.c0;
  const CMatL chi = e.chi();
  const CMatL chio = K.transpose() * chi * K.conjugate();
  out.channel = LogicalSuperop::from_chi(dims, chio);
  out.channel.integration_error = e.integration_error;
  out.channel.converged = e.converged;
  return out;
}

CMatL chi_from_kraus(const std::vector<int>& dims, const std::vector<CMat>& kraus) {
  const auto sig = sigma_basis(dims);
  const int np = static_cast<int>(sig.size());
  const long double d = static_cast<long double>(sig[0].rows());
  CMatL chi = CMatL::Zero(np, np);
  for (const auto& k : kraus) {
    CVecL c(np);
    const CMatL kl = k.cast<cplxl>();
    for (int a = 0; a < np; ++a) c[a] = (sig[a].adjoint() * kl).trace() / d;
    chi += c * c.adjoint();
  }
  return chi;
}

}  // namespace

CMatL OrthoMatrix::C() const { return c0 * (CMatL::Identity(delta.rows(), delta.cols()) + delta); }

CMatL gram_matrix(const LogicalSuperop& e) {
  const CMatL chi = e.chi();
  const auto sig = sigma_basis(e.dims());
  return chi(0, 0) * CMatL::Identity(e.logical_dim(), e.logical_dim()) + gram_remainder(chi, sig);
}

LowdinResult lowdin_orthonormalize(const LogicalSuperop& e) {
  const CMatL chi = e.chi();
  const auto sig = sigma_basis(e.dims());
  return lowdin_impl(e, chi(0, 0).real(), gram_remainder(chi, sig));
}

LowdinResult lowdin_orthonormalize(const LogicalSuperop& e, const CMatL& gram) {
  const int d = e.logical_dim();
  if (gram.rows() != d || gram.cols() != d) throw Error(Errc::dimension, "lowdin_orthonormalize: Gram size mismatch");
  const long double base = gram(0, 0).real();
  return lowdin_impl(e, base, gram - base * CMatL::Identity(d, d));
}

long double entanglement_fidelity(const LogicalSuperop& e) { return e.chi()(0, 0).real(); }

double average_gate_fidelity(const LogicalSuperop& e) {
  const long double d = e.logical_dim();
  return static_cast<double>((d * entanglement_fidelity(e) + 1) / (d + 1));
}

long double average_gate_infidelity(const LogicalSuperop& e) {
  const CMatL chi = e.chi();
  const long double d = e.logical_dim();
  long double s = 0;
  for (int a = 1; a < chi.rows(); ++a) s += chi(a, a).real();
  return d / (d + 1) * s;
}

CptpDiagnostics cptp_diagnostics(const LogicalSuperop& e) {
  const CMatL chi = e.chi();
  const auto sig = sigma_basis(e.dims());
  const int d = e.logical_dim();
  const CMatL t = (chi(0, 0) - 1.0L) * CMatL::Identity(d, d) + gram_remainder(chi, sig);
  CMat td = t.cast<cplx>();
  td = 0.5 * (td + td.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(td, Eigen::EigenvaluesOnly);
  CptpDiagnostics out;
  out.tp_defect = es.eigenvalues().cwiseAbs().maxCoeff();
  CMat c = chi.cast<cplx>();
  c = 0.5 * (c + c.adjoint()).eval();
  const double tr = c.trace().real();
  Eigen::SelfAdjointEigenSolver<CMat> ec(c, Eigen::EigenvaluesOnly);
  out.min_choi_eigenvalue = ec.eigenvalues().minCoeff() / (tr != 0 ? tr : 1.0);
  return out;
}

LogicalSuperop fock_qubit_loss_baseline(double gamma) {
  if (!(gamma >= 0 && gamma <= 1)) throw Error(Errc::domain, "fock_qubit_loss_baseline: need 0 <= gamma <= 1");
  CMat k0 = CMat::Zero(2, 2), k1 = CMat::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return LogicalSuperop::from_chi({2}, chi_from_kraus({2}, {k0, k1}));
}

LogicalSuperop fock_qubit_dephasing_baseline(double sigma) {
  if (!(sigma >= 0)) throw Error(Errc::domain, "fock_qubit_dephasing_baseline: need sigma >= 0");
  const double lam = std::exp(-0.5 * sigma * sigma);
  CMat z = CMat::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  return LogicalSuperop::from_chi(
      {2}, chi_from_kraus({2}, {std::sqrt(0.5 * (1 + lam)) * CMat::Identity(2, 2), std::sqrt(0.5 * (1 - lam)) * z}));
}

BlochResult bloch_and_octahedron(const CMat& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw Error(Errc::dimension, "bloch_and_octahedron: need a 2x2 matrix");
  if (std::abs(rho.trace() - cplx(1.0)) > 1e-8) throw Error(Errc::domain, "bloch_and_octahedron: trace is not 1");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8) throw Error(Errc::domain, "bloch_and_octahedron: not Hermitian");
  BlochResult out;
  out.r.x = 2 * rho(0, 1).real();
  out.r.y = -2 * rho(0, 1).imag();
  out.r.z = (rho(0, 0) - rho(1, 1)).real();
  out.inside_octahedron = std::abs(out.r.x) + std::abs(out.r.y) + std::abs(out.r.z) <= 1 + 1e-12;
  return out;
}

double trace_distance(const CMat& a, const CMat& b) {
  CMat d = a - b;
  d = 0.5 * (d + d.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace gkp
