#include "gkp/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>

#include "gkp/special.hpp"
#include "gkp/subsystem.hpp"

namespace gkp {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * kPi);

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void check_square(const GkpCode& code) {
  if (code.modes() != 1 || (code.sigma() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(Errc::unsupported, "fock oracle: single-mode square codes only");
}

// Unnormalized e^{-Delta^2 n} sum_s psi_n(sqrt(pi)(2s + mu)).
Vec codeword_coefficients(int mu, double delta, int cutoff) {
  if (cutoff < 1) throw Error(Errc::domain, "codeword: cutoff must be positive");
  if (!(delta > 0)) throw Error(Errc::domain, "codeword: Delta must be positive");
  const double reach = std::sqrt(2.0 * cutoff + 1) + 12;
  const double sp = std::sqrt(kPi);
  Vec c = Vec::Zero(cutoff);
  const int smax = static_cast<int>(std::ceil(reach / (2 * sp))) + 1;
  for (int s = -smax; s <= smax; ++s) {
    const double x = sp * (2 * s + mu);
    if (std::abs(x) > reach) continue;
    const auto h = hermite_functions(cutoff - 1, x);
    for (int n = 0; n < cutoff; ++n) c[n] += h[n];
  }
  for (int n = 0; n < cutoff; ++n) c[n] *= std::exp(-delta * delta * n);
  return c;
}

double tail_fraction(const Vec& c) {
  const int cutoff = static_cast<int>(c.size());
  const int from = cutoff - std::max(1, cutoff / 10);
  return c.tail(cutoff - from).squaredNorm() / c.squaredNorm();
}

}  // namespace

FockState build_approx_codeword(int mu, double delta, int cutoff, double tail_tol) {
  const Vec c = codeword_coefficients(mu, delta, cutoff);
  FockState out;
  out.tail_mass = tail_fraction(c);
  if (out.tail_mass > tail_tol)
    throw Error(Errc::tail_bound, "build_approx_codeword: cutoff too small (tail mass " +
                                      sci(out.tail_mass) + ")");
  out.amp = (c / c.norm()).cast<cplx>();
  return out;
}

CMat orthonormal_codewords(double delta, int cutoff, double tail_tol) {
  CMat v(cutoff, 2);
  for (int mu = 0; mu < 2; ++mu) {
    const Vec c = codeword_coefficients(mu, delta, cutoff);
    if (tail_fraction(c) > tail_tol) throw Error(Errc::tail_bound, "orthonormal_codewords: cutoff too small");
    v.col(mu) = (c / c.norm()).cast<cplx>();
  }
  // Symmetric orthogonalization of the normalized codewords.
  const CMat g = v.adjoint() * v;
  Eigen::SelfAdjointEigenSolver<CMat> es(g);
  const CMat ginv = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                    es.eigenvectors().adjoint();
  return v * ginv;
}

double mean_photon_number(const CVec& psi) {
  double s = 0;
  for (int n = 0; n < psi.size(); ++n) s += n * std::norm(psi[n]);
  return s / psi.squaredNorm();
}

FockDensity apply_loss(const CMat& rho, double gamma, int j_max, double tol) {
  if (!(gamma >= 0 && gamma <= 1)) throw Error(Errc::domain, "apply_loss: gamma must lie in [0, 1]");
  const int n = static_cast<int>(rho.rows());
  FockDensity out{CMat::Zero(n, n), 0.0};
  const int jm = std::min(j_max, n - 1);
  // a(n, j) = sqrt(C(n, j) (1 - gamma)^(n - j) gamma^j)
  Mat a = Mat::Zero(n, jm + 1);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= std::min(k, jm); ++j) {
      if (gamma == 0) {
        a(k, j) = j == 0 ? 1.0 : 0.0;
        continue;
      }
      if (gamma == 1) {
        a(k, j) = j == k ? 1.0 : 0.0;
        continue;
      }
      const double lg = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) +
                        (k - j) * std::log1p(-gamma) + j * std::log(gamma);
      a(k, j) = std::exp(0.5 * lg);
    }
  for (int j = 0; j <= jm; ++j)
    for (int c = j; c < n; ++c)
      for (int r = j; r < n; ++r) out.rho(r - j, c - j) += a(r, j) * a(c, j) * rho(r, c);
  const double t0 = rho.trace().real();
  out.residual = std::abs(t0 - out.rho.trace().real());
  if (out.residual > tol * std::max(1.0, std::abs(t0)))
    throw Error(Errc::tail_bound, "apply_loss: Kraus truncation residual " + sci(out.residual));
  return out;
}

FockDensity apply_dephasing(const CMat& rho, double sigma, int nodes) {
  if (!(sigma >= 0)) throw Error(Errc::domain, "apply_dephasing: sigma must be non-negative");
  const int n = static_cast<int>(rho.rows());
  const QuadRule gh = gauss_hermite(nodes);
  // f(k) = E[e^{-i phi k}] over the rule, k = n - m.
  std::vector<cplx> f(2 * n - 1, 0.0);
  for (int k = -(n - 1); k <= n - 1; ++k) {
    cplx s = 0;
    for (int i = 0; i < nodes; ++i) s += gh.w[i] * std::polar(1.0, -std::sqrt(2.0) * sigma * gh.x[i] * k);
    f[k + n - 1] = s / std::sqrt(kPi);
  }
  FockDensity out{rho, 0.0};
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) out.rho(r, c) *= f[r - c + n - 1];
  return out;
}

CMat zak_fock_overlaps(const Vec& k, const GkpCode& code, int cutoff) {
  check_square(code);
  const int d = code.dims()[0];
  const double sd = std::sqrt(static_cast<double>(d));
  const double c = std::pow(2 * kPi * d, 0.25);
  const double reach = std::sqrt(2.0 * cutoff + 1) + 12;
  const int smax = static_cast<int>(std::ceil(reach / (kSqrt2Pi * sd))) + 1;
  CMat out = CMat::Zero(d, cutoff);
  for (int mu = 0; mu < d; ++mu) {
    const double kt1 = k[0] + mu / sd, kt2 = k[1];
    // lbar(mu)^T Omega k = (mu / sqrt d) k_2
    const cplx ph0 = c * std::polar(1.0, -kPi * mu / sd * k[1] - kPi * kt1 * kt2);
    for (int s = -smax; s <= smax; ++s) {
      const double x = kSqrt2Pi * (kt1 + sd * s);
      if (std::abs(x) > reach) continue;
      const auto h = hermite_functions(cutoff - 1, x);
      const cplx ph = ph0 * std::polar(1.0, -2 * kPi * sd * s * kt2);
      for (int n = 0; n < cutoff; ++n) out(mu, n) += ph * h[n];
    }
  }
  return out;
}

cplx zak_fock_overlap(int mu, const Vec& k, const GkpCode& code, int n) {
  if (n < 0) throw Error(Errc::domain, "zak_fock_overlap: negative level");
  if (mu < 0 || mu >= code.dims()[0]) throw Error(Errc::domain, "zak_fock_overlap: logical label out of range");
  return zak_fock_overlaps(k, code, n + 1)(mu, n);
}

namespace {

CMat decode_on_grid(const CMat& rho, const PrimitiveCell& cell, int nodes, int threads) {
  const auto grid = DecompositionParams(cell).grid(nodes);
  const int cutoff = static_cast<int>(rho.rows());
  const int d = cell.code().dims()[0];
  // Fixed chunking keeps the summation order independent of the thread count.
  const int chunks = static_cast<int>(std::min<size_t>(64, grid.size()));
  int nt = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nt = std::min(nt, chunks);
  std::vector<CMat> part(chunks, CMat::Zero(d, d));
  auto work = [&](int t) {
    for (int c = t; c < chunks; c += nt) {
      const size_t lo = grid.size() * c / chunks, hi = grid.size() * (c + 1) / chunks;
      for (size_t i = lo; i < hi; ++i) {
        const CMat o = zak_fock_overlaps(grid[i].k, cell.code(), cutoff);
        part[c] += grid[i].w * (o * rho * o.adjoint());
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  CMat out = CMat::Zero(d, d);
  for (const auto& p : part) out += p;
  return out;
}

}  // namespace

DecodedState ideal_decode(const CMat& rho, const PrimitiveCell& cell, const DecodeOptions& opt) {
  check_square(cell.code());
  if (rho.rows() != rho.cols()) throw Error(Errc::dimension, "ideal_decode: density matrix must be square");
  const CMat a = decode_on_grid(rho, cell, opt.nodes, opt.threads);
  DecodedState out;
  if (opt.check_nodes > 0) {
    const CMat b = decode_on_grid(rho, cell, opt.check_nodes, opt.threads);
    out.grid_change = (a - b).cwiseAbs().maxCoeff();
    if (out.grid_change > opt.check_tol)
      throw Error(Errc::convergence, "ideal_decode: k-grid not converged (change " + sci(out.grid_change) + ")");
  }
  const double tr = a.trace().real();
  out.trace_defect = std::abs(tr / rho.trace().real() - 1);
  out.rho = a / tr;
  return out;
}

}  // namespace gkp
