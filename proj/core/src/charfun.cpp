#include "gkp/charfun.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gkp/special.hpp"

namespace gkp {

namespace {

const cplx kI(0.0, 1.0);

CMat csym(const CMat& a) { return 0.5 * (a + a.transpose()); }

// Principal-branch sqrt(det A) for complex symmetric A with Re A positive semidefinite.
cplx sqrt_det(const CMat& a) {
  Eigen::ComplexEigenSolver<CMat> es(a, false);
  cplx r(1.0, 0.0);
  for (int i = 0; i < es.eigenvalues().size(); ++i) r *= std::sqrt(es.eigenvalues()[i]);
  return r;
}

void check_integrable(const CMat& a) {
  const Mat re = 0.5 * (a.real() + a.real().transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(re);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw Error(Errc::divergent, "Gaussian integral diverges: real part of the quadratic form is not positive semidefinite");
}

struct Reduced {
  GaussianForm form;
  bool delta = false;
};

// Integrates exp(-z^T Q z + l^T z) over the trailing ny coordinates of z = (w, y).
// A real null space of Q_yy of dimension nw/2 whose conjugate coefficient is M (u - v)
// produces delta(u - v) / |det M| and the result is returned as a delta form over u.
Reduced integrate_trailing(const CMat& qz, const CVec& lz, cplx amp, int nw, int ny, bool already_delta) {
  const CMat qyy = csym(qz.bottomRightCorner(ny, ny));
  const CMat qwy = qz.topRightCorner(nw, ny);
  const CMat qww = qz.topLeftCorner(nw, nw);
  const CVec ly = lz.tail(ny), lw = lz.head(nw);

  Mat stacked(2 * ny, ny);
  stacked << qyy.real(), qyy.imag();
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * std::max(smax, 1e-300)) ++rank;
  const int k = ny - rank;

  Reduced out;
  if (k == 0) {
    check_integrable(qyy);
    Eigen::PartialPivLU<CMat> lu(qyy);
    const CMat x = lu.solve(qwy.transpose());
    const CVec yl = lu.solve(ly);
    out.form.Q = csym(qww - qwy * x);
    out.form.l = lw - qwy * yl;
    out.form.amp = amp * std::pow(kPi, 0.5 * ny) / sqrt_det(qyy) * std::exp(0.25 * (ly.transpose() * yl)(0, 0));
    out.delta = already_delta;
    return out;
  }

  if (already_delta || nw % 2 != 0 || k != nw / 2)
    throw Error(Errc::unsupported, "unsupported composition: partial null space in the Gaussian integral");
  const int d = nw / 2;
  const Mat v = svd.matrixV();
  const Mat nb = v.rightCols(k);
  const Mat rb = v.leftCols(rank);
  // Integrating over y_n gives (2 pi)^k delta(G w) with G = 2i N^T Q_yw.
  const CMat gc = 2.0 * kI * nb.transpose().cast<cplx>() * qwy.transpose();
  const CVec c0 = -kI * nb.transpose().cast<cplx>() * ly;
  const double gscale = std::max(1.0, gc.cwiseAbs().maxCoeff());
  if (gc.imag().cwiseAbs().maxCoeff() > 1e-9 * gscale || c0.cwiseAbs().maxCoeff() > 1e-9 * gscale)
    throw Error(Errc::unsupported, "unsupported composition: null-space constraint is not a real linear delta");
  const Mat g = gc.real();
  const Mat mu = g.leftCols(d), mv = g.rightCols(d);
  if ((mu + mv).cwiseAbs().maxCoeff() > 1e-9 * gscale)
    throw Error(Errc::unsupported, "unsupported composition: null-space constraint is not of the form M (u - v)");
  const double detm = std::abs(mu.determinant());
  if (detm < 1e-300) throw Error(Errc::unsupported, "unsupported composition: singular delta constraint");

  // Restrict to u = v and integrate the remaining range directions.
  Mat t = Mat::Zero(nw + ny, d + rank);
  t.topLeftCorner(d, d).setIdentity();
  t.block(d, 0, d, d).setIdentity();
  t.bottomRightCorner(ny, rank) = rb;
  const CMat tc = t.cast<cplx>();
  const CMat q2 = csym(tc.transpose() * qz * tc);
  const CVec l2 = tc.transpose() * lz;
  const cplx amp2 = amp * std::pow(2.0 * kPi, k) / detm;
  if (rank == 0) {
    out.form = {amp2, q2, l2};
  } else {
    Reduced r = integrate_trailing(q2, l2, amp2, d, rank, true);
    out.form = r.form;
  }
  out.delta = true;
  return out;
}

// Bilinear phase block: z^T Phi z with Phi(a, b) = coef * Omega.
void add_phase(CMat& phi, int a, int b, int d, cplx coef) {
  phi.block(a, b, d, d) += coef * omega(d / 2).cast<cplx>();
}

GaussianKernel make_kernel(const Reduced& r, int modes) {
  GaussianKernel k;
  k.modes = modes;
  k.kind = r.delta ? KernelKind::diagonal_delta : KernelKind::regular;
  k.form = r.form;
  return k;
}

}  // namespace

cplx GaussianForm::exponent(const Vec& x) const {
  const CVec xc = x.cast<cplx>();
  return -(xc.transpose() * Q * xc)(0, 0) + (l.transpose() * xc)(0, 0);
}

cplx GaussianForm::operator()(const Vec& x) const { return amp * std::exp(exponent(x)); }

cplx GaussianKernel::evaluate(const Vec& u, const Vec& v) const {
  switch (kind) {
    case KernelKind::regular: {
      Vec w(u.size() + v.size());
      w << u, v;
      return form(w);
    }
    case KernelKind::diagonal_delta:
      return (u - v).norm() <= 1e-12 ? form(u) : cplx(0.0);
    case KernelKind::identity:
      return (u.norm() <= 1e-12 && v.norm() <= 1e-12) ? cplx(1.0) : cplx(0.0);
  }
  return 0.0;
}

cplx GaussianKernel::diagonal(const Vec& u) const {
  switch (kind) {
    case KernelKind::regular:
      return evaluate(u, u);
    case KernelKind::diagonal_delta:
      return form(u);
    case KernelKind::identity:
      return u.norm() <= 1e-12 ? cplx(1.0) : cplx(0.0);
  }
  return 0.0;
}

cplx ChannelCharFn::evaluate(const Vec& u, const Vec& v) const {
  cplx s(0.0);
  for (const auto& t : terms) s += t.weight * t.kernel.evaluate(u, v);
  return s;
}

cplx ChannelCharFn::diagonal(const Vec& u) const {
  cplx s(0.0);
  for (const auto& t : terms) s += t.weight * t.kernel.diagonal(u);
  return s;
}

ChannelCharFn single(const GaussianKernel& k) {
  ChannelCharFn c;
  c.modes = k.modes;
  c.terms.push_back({1.0, k});
  return c;
}

GaussianForm gaussian_unitary_charfun(const Mat& s) {
  if (s.rows() != s.cols() || s.rows() % 2) throw Error(Errc::dimension, "gaussian_unitary_charfun: need a 2n x 2n matrix");
  const int dim = static_cast<int>(s.rows());
  const Mat id = Mat::Identity(dim, dim);
  const double det = (s - id).determinant();
  if (std::abs(det) < 1e-10)
    throw Error(Errc::singular,
                "gaussian_unitary_charfun: S - I is singular; factor S = S1 S2 with invertible S_i - I and compose the kernels");
  const Mat m = 0.5 * omega(dim / 2) * (s + id) * (s - id).inverse();
  GaussianForm f;
  f.amp = 1.0 / std::sqrt(std::abs(det));
  f.Q = (-kI * kPi * (0.5 * (m + m.transpose())).cast<cplx>()).eval();
  f.l = CVec::Zero(dim);
  return f;
}

GaussianForm number_damping_charfun(cplx z) {
  if (z.real() < 0 || std::abs(z) == 0.0) throw Error(Errc::domain, "number_damping_charfun: need Re z >= 0 and z != 0");
  const cplx coth = 1.0 / std::tanh(0.5 * z);
  GaussianForm f;
  f.amp = 1.0 / (1.0 - std::exp(-z));
  f.Q = CMat::Identity(2, 2) * (0.5 * kPi * coth);
  f.l = CVec::Zero(2);
  return f;
}

GaussianKernel kraus_kernel(const GaussianForm& a, int modes) {
  const int d = 2 * modes;
  if (a.size() != d) throw Error(Errc::dimension, "kraus_kernel: operator form has the wrong size");
  GaussianKernel k;
  k.modes = modes;
  k.form.amp = a.amp * std::conj(a.amp);
  k.form.Q = CMat::Zero(2 * d, 2 * d);
  k.form.Q.topLeftCorner(d, d) = a.Q;
  k.form.Q.bottomRightCorner(d, d) = a.Q.conjugate();
  k.form.l = CVec(2 * d);
  k.form.l << a.l, a.l.conjugate();
  return k;
}

GaussianKernel gaussian_channel_charfun(const Mat& t, const Mat& n) {
  if (t.rows() != t.cols() || t.rows() % 2 || n.rows() != t.rows() || n.cols() != t.cols())
    throw Error(Errc::dimension, "gaussian_channel_charfun: T and N must be 2n x 2n");
  const int dim = static_cast<int>(t.rows());
  const Mat id = Mat::Identity(dim, dim);
  const double det = (t - id).determinant();
  if (std::abs(det) < 1e-10)
    throw Error(Errc::singular, "gaussian_channel_charfun: T - I is singular; use the delta-kernel constructors");
  const Mat o = omega(dim / 2);
  const Mat tinv = (t - id).inverse();
  const Mat lm = o * tinv * n * tinv.transpose() * o.transpose();
  const Mat m = 0.5 * o * (t + id) * tinv;
  const Mat ms = 0.5 * (m + m.transpose()), ma = 0.5 * (m - m.transpose());
  GaussianKernel k;
  k.modes = dim / 2;
  k.form.amp = 1.0 / std::abs(det);
  CMat q(2 * dim, 2 * dim);
  const CMat L = (kPi * 0.5 * (lm + lm.transpose())).cast<cplx>();
  const CMat S = (kI * kPi) * ms.cast<cplx>();
  const CMat A = (kI * kPi) * ma.cast<cplx>();
  q.topLeftCorner(dim, dim) = L - S;
  q.bottomRightCorner(dim, dim) = L + S;
  q.topRightCorner(dim, dim) = -L - A;
  q.bottomLeftCorner(dim, dim) = -L + A;
  k.form.Q = q;
  k.form.l = CVec::Zero(2 * dim);
  return k;
}

GaussianKernel identity_kernel(int modes) {
  GaussianKernel k;
  k.kind = KernelKind::identity;
  k.modes = modes;
  k.form.Q = CMat::Zero(0, 0);
  k.form.l = CVec::Zero(0);
  return k;
}

GaussianKernel envelope_charfun(double delta) {
  if (!(delta > 0)) throw Error(Errc::domain, "envelope_charfun: Delta must be positive");
  return kraus_kernel(number_damping_charfun(cplx(delta * delta, 0.0)), 1);
}

ChannelCharFn loss_charfun(double gamma, int modes) {
  if (!(gamma > 0 && gamma < 1)) throw Error(Errc::domain, "loss_charfun: need 0 < gamma < 1");
  const int d = 2 * modes;
  return single(gaussian_channel_charfun(std::sqrt(1 - gamma) * Mat::Identity(d, d), 0.5 * gamma * Mat::Identity(d, d)));
}

ChannelCharFn amplification_charfun(double g, int modes) {
  if (!(g > 1)) throw Error(Errc::domain, "amplification_charfun: need g > 1");
  const int d = 2 * modes;
  return single(gaussian_channel_charfun(std::sqrt(g) * Mat::Identity(d, d), 0.5 * (g - 1) * Mat::Identity(d, d)));
}

ChannelCharFn random_displacement_charfun(double sigma, int modes) {
  if (!(sigma > 0)) throw Error(Errc::domain, "random_displacement_charfun: need sigma > 0");
  const int d = 2 * modes;
  GaussianKernel k;
  k.kind = KernelKind::diagonal_delta;
  k.modes = modes;
  k.form.amp = std::pow(sigma, -d);
  k.form.Q = CMat::Identity(d, d) * cplx(kPi / (sigma * sigma), 0.0);
  k.form.l = CVec::Zero(d);
  return single(k);
}

ChannelCharFn dephased_envelope_charfun(double sigma, double delta, int nodes) {
  if (!(delta > 0)) throw Error(Errc::domain, "dephased_envelope_charfun: Delta must be positive");
  if (!(sigma >= 0)) throw Error(Errc::domain, "dephased_envelope_charfun: sigma must be nonnegative");
  if (sigma == 0) return single(envelope_charfun(delta));
  if (nodes < 8) throw Error(Errc::domain, "dephased_envelope_charfun: need at least 8 nodes");
  // exp(i phi n) exp(-Delta^2 n) = exp(-(Delta^2 - i phi) n), phi ~ N(0, sigma^2).
  const QuadRule gh = gauss_hermite(nodes);
  ChannelCharFn c;
  c.modes = 1;
  PhaseQuadrature pq;
  for (int i = 0; i < nodes; ++i) {
    const double phi = std::sqrt(2.0) * sigma * gh.x[i];
    const double p = gh.w[i] / std::sqrt(kPi);
    pq.phi.push_back(phi);
    pq.weight.push_back(p);
    c.terms.push_back({p, kraus_kernel(number_damping_charfun(cplx(delta * delta, -phi)), 1)});
  }
  c.quadrature = pq;
  return c;
}

GaussianKernel compose(const GaussianKernel& outer, const GaussianKernel& inner) {
  if (outer.modes != inner.modes) throw Error(Errc::dimension, "compose: mode counts differ");
  if (outer.kind == KernelKind::identity) return inner;
  if (inner.kind == KernelKind::identity) return outer;
  const int modes = outer.modes;
  const int d = 2 * modes;
  const cplx ipi = kI * kPi;
  const bool di = inner.kind == KernelKind::diagonal_delta;
  const bool dout = outer.kind == KernelKind::diagonal_delta;

  int nw = 0, ny = 0;
  Mat a1, a2;
  CMat phi;
  if (!di && !dout) {
    nw = 2 * d;
    ny = 2 * d;
    a1 = Mat::Zero(2 * d, 4 * d);
    a1.leftCols(2 * d).setIdentity();
    a1.rightCols(2 * d) = -Mat::Identity(2 * d, 2 * d);
    a2 = Mat::Zero(2 * d, 4 * d);
    a2.rightCols(2 * d).setIdentity();
    phi = CMat::Zero(4 * d, 4 * d);
    add_phase(phi, 0, 2 * d, d, ipi);
    add_phase(phi, d, 3 * d, d, -ipi);
  } else if (di && !dout) {
    // v~ = u~ - u + v
    nw = 2 * d;
    ny = d;
    a1 = Mat::Zero(d, 3 * d);
    a1.leftCols(d).setIdentity();
    a1.rightCols(d) = -Mat::Identity(d, d);
    a2 = Mat::Zero(2 * d, 3 * d);
    a2.block(0, 2 * d, d, d).setIdentity();
    a2.block(d, 0, d, d) = -Mat::Identity(d, d);
    a2.block(d, d, d, d).setIdentity();
    a2.block(d, 2 * d, d, d).setIdentity();
    phi = CMat::Zero(3 * d, 3 * d);
    add_phase(phi, 0, 2 * d, d, ipi);
    add_phase(phi, d, 2 * d, d, -ipi);
    add_phase(phi, d, 0, d, ipi);
  } else if (!di && dout) {
    // v~ = u~
    nw = 2 * d;
    ny = d;
    a1 = Mat::Zero(2 * d, 3 * d);
    a1.block(0, 0, d, d).setIdentity();
    a1.block(d, d, d, d).setIdentity();
    a1.block(0, 2 * d, d, d) = -Mat::Identity(d, d);
    a1.block(d, 2 * d, d, d) = -Mat::Identity(d, d);
    a2 = Mat::Zero(d, 3 * d);
    a2.rightCols(d).setIdentity();
    phi = CMat::Zero(3 * d, 3 * d);
    add_phase(phi, 0, 2 * d, d, ipi);
    add_phase(phi, d, 2 * d, d, -ipi);
  } else {
    // Both constrained: the result is f1 * f2 (ordinary convolution) on u = v.
    nw = d;
    ny = d;
    a1 = Mat::Zero(d, 2 * d);
    a1.leftCols(d).setIdentity();
    a1.rightCols(d) = -Mat::Identity(d, d);
    a2 = Mat::Zero(d, 2 * d);
    a2.rightCols(d).setIdentity();
    phi = CMat::Zero(2 * d, 2 * d);
  }
  const CMat c1 = a1.cast<cplx>(), c2 = a2.cast<cplx>();
  const CMat qz = csym(c1.transpose() * inner.form.Q * c1 + c2.transpose() * outer.form.Q * c2 - 0.5 * (phi + phi.transpose()));
  const CVec lz = c1.transpose() * inner.form.l + c2.transpose() * outer.form.l;
  const Reduced r = integrate_trailing(qz, lz, inner.form.amp * outer.form.amp, nw, ny, di && dout);
  return make_kernel(r, modes);
}

ChannelCharFn compose(const ChannelCharFn& outer, const ChannelCharFn& inner) {
  if (outer.modes != inner.modes) throw Error(Errc::dimension, "compose: mode counts differ");
  ChannelCharFn c;
  c.modes = outer.modes;
  for (const auto& to : outer.terms)
    for (const auto& ti : inner.terms) c.terms.push_back({to.weight * ti.weight, compose(to.kernel, ti.kernel)});
  if (outer.quadrature && !inner.quadrature) c.quadrature = outer.quadrature;
  if (inner.quadrature && !outer.quadrature) c.quadrature = inner.quadrature;
  return c;
}

GaussianForm gaussian_state_charfun(const Vec& mean, const Mat& cov) {
  const int d = static_cast<int>(mean.size());
  if (cov.rows() != d || cov.cols() != d || d % 2) throw Error(Errc::dimension, "gaussian_state_charfun: size mismatch");
  const Mat o = omega(d / 2);
  GaussianForm f;
  f.amp = 1.0;
  f.Q = (kPi * o * cov * o.transpose()).cast<cplx>();
  f.l = (-kI * kPi) * (o * mean).cast<cplx>();
  return f;
}

void gaussian_state_moments(const GaussianForm& c, Vec& mean, Mat& cov) {
  const int d = c.size();
  const Mat o = omega(d / 2);
  cov = o.transpose() * (c.Q.real() / kPi) * o;
  mean = o.transpose() * (c.l / (-kI * kPi)).real();
}

GaussianForm apply_channel(const ChannelCharFn& channel, const GaussianForm& state) {
  if (channel.terms.size() != 1) throw Error(Errc::unsupported, "apply_channel: single-term channels only");
  const auto& term = channel.terms[0];
  const auto& k = term.kernel;
  const int d = state.size();
  if (d != 2 * k.modes) throw Error(Errc::dimension, "apply_channel: mode counts differ");
  if (k.kind == KernelKind::identity) {
    GaussianForm f = state;
    f.amp *= term.weight;
    return f;
  }
  const cplx ipi = kI * kPi;
  // c'(y) = int du dw c(u, w) c_rho(y - u + w) exp(i pi (-u^T O y - u^T O w + y^T O w)).
  int ny = 0;
  Mat a1, a2;
  CMat phi;
  if (k.kind == KernelKind::regular) {
    ny = 2 * d;
    a1 = Mat::Zero(2 * d, 3 * d);
    a1.rightCols(2 * d).setIdentity();
    a2 = Mat::Zero(d, 3 * d);
    a2.leftCols(d).setIdentity();
    a2.block(0, d, d, d) = -Mat::Identity(d, d);
    a2.block(0, 2 * d, d, d).setIdentity();
    phi = CMat::Zero(3 * d, 3 * d);
    add_phase(phi, d, 0, d, -ipi);
    add_phase(phi, d, 2 * d, d, -ipi);
    add_phase(phi, 0, 2 * d, d, ipi);
  } else {
    ny = d;
    a1 = Mat::Zero(d, 2 * d);
    a1.rightCols(d).setIdentity();
    a2 = Mat::Zero(d, 2 * d);
    a2.leftCols(d).setIdentity();
    phi = CMat::Zero(2 * d, 2 * d);
    add_phase(phi, d, 0, d, -ipi);
    add_phase(phi, 0, d, d, ipi);
  }
  const CMat c1 = a1.cast<cplx>(), c2 = a2.cast<cplx>();
  const CMat qz = csym(c1.transpose() * k.form.Q * c1 + c2.transpose() * state.Q * c2 - 0.5 * (phi + phi.transpose()));
  const CVec lz = c1.transpose() * k.form.l + c2.transpose() * state.l;
  const Reduced r = integrate_trailing(qz, lz, term.weight * k.form.amp * state.amp, d, ny, false);
  if (r.delta) throw Error(Errc::unsupported, "apply_channel: degenerate output");
  return r.form;
}

double tp_residual(const ChannelCharFn& channel) {
  const int d = 2 * channel.modes;
  const cplx ipi = kI * kPi;
  cplx total(0.0);
  for (const auto& term : channel.terms) {
    const auto& k = term.kernel;
    if (k.kind == KernelKind::identity) {
      total += term.weight;
      continue;
    }
    if (k.kind == KernelKind::diagonal_delta) {
      check_integrable(k.form.Q);
      Eigen::PartialPivLU<CMat> lu(k.form.Q);
      const CVec x = lu.solve(k.form.l);
      total += term.weight * k.form.amp * std::pow(kPi, 0.5 * d) / sqrt_det(k.form.Q) *
               std::exp(0.25 * (k.form.l.transpose() * x)(0, 0));
      continue;
    }
    // z = (u, v); kernel arguments (u + v, v); phase -i pi u^T O v.
    Mat a(2 * d, 2 * d);
    a << Mat::Identity(d, d), Mat::Identity(d, d), Mat::Zero(d, d), Mat::Identity(d, d);
    CMat phi = CMat::Zero(2 * d, 2 * d);
    add_phase(phi, 0, d, d, -ipi);
    const CMat ac = a.cast<cplx>();
    const CMat qz = csym(ac.transpose() * k.form.Q * ac - 0.5 * (phi + phi.transpose()));
    const CVec lz = ac.transpose() * k.form.l;
    const CMat qvv = qz.bottomRightCorner(d, d);
    const double scale = std::max(1.0, qz.cwiseAbs().maxCoeff());
    if (qvv.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
      // int dv exp(b(u)^T v) = (2 pi)^d delta(G u), G = 2i Q_vu; then int du delta(G u) h(u) = h(0)/|det G|.
      const CMat gc = 2.0 * kI * qz.bottomLeftCorner(d, d);
      if (gc.imag().cwiseAbs().maxCoeff() > 1e-9 * scale || lz.tail(d).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw Error(Errc::unsupported, "tp_residual: non-delta oscillatory integral");
      total += term.weight * k.form.amp * std::pow(2 * kPi, d) / std::abs(gc.real().determinant());
      continue;
    }
    const Reduced r = integrate_trailing(qz, lz, k.form.amp, d, d, false);
    if (r.delta) throw Error(Errc::unsupported, "tp_residual: degenerate kernel");
    check_integrable(r.form.Q);
    Eigen::PartialPivLU<CMat> lu(r.form.Q);
    const CVec x = lu.solve(r.form.l);
    total += term.weight * r.form.amp * std::pow(kPi, 0.5 * d) / sqrt_det(r.form.Q) *
             std::exp(0.25 * (r.form.l.transpose() * x)(0, 0));
  }
  return std::abs(total - 1.0);
}

}  // namespace gkp
