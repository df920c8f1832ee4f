#include "gkp/subsystem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gkp/logical_channel.hpp"
#include "gkp/special.hpp"

namespace gkp {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * kPi);

long long mod(long long a, long long d) {
  const long long r = a % d;
  return r < 0 ? r + d : r;
}

Mat scale_mode(const Mat& sigma, int j, double lambda) {
  const int n = static_cast<int>(sigma.rows()) / 2;
  Mat out = sigma;
  out.col(j) *= lambda;
  out.col(j + n) /= lambda;
  return out;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Decomposition parameters

struct DecompositionParams::Impl {
  enum class Kind { base, linear, unfold, fold } kind = Kind::base;
  GkpCode code;
  PrimitiveCell cell;
  std::shared_ptr<const Impl> parent;
  Mat s, s_inv;
  int j = 0;
  int d = 1;

  Remainder remainder(const Vec& v) const {
    switch (kind) {
      case Kind::base:
        return cell.remainder(v);
      case Kind::linear: {
        Remainder r = parent->remainder(s_inv * v);
        r.rem = s * r.rem;
        return r;
      }
      case Kind::unfold: {
        Remainder r = parent->remainder(v);
        const long long a = mod(r.s[j], d);
        r.rem += static_cast<double>(a) * parent->code.dual_basis().col(j);
        r.s[j] = (r.s[j] - a) / d;
        return r;
      }
      case Kind::fold: {
        Remainder r = parent->remainder(v);
        const double t = d * parent->code.coords(r.rem)[j];
        const long long a0 = static_cast<long long>(std::ceil(t - 0.5));
        const Vec x = r.rem - static_cast<double>(a0) * code.dual_basis().col(j);
        if (!parent->remainder(x).s.isZero())
          throw Error(Errc::tiling, "fold: the cell does not tile under translations along mbar_j");
        r.rem = x;
        r.s[j] = d * r.s[j] + a0;
        return r;
      }
    }
    return {};
  }

  std::vector<Interval> bounding_box() const {
    switch (kind) {
      case Kind::base:
        return cell.bounding_box();
      case Kind::linear: {
        const auto pb = parent->bounding_box();
        const int dim = static_cast<int>(pb.size());
        std::vector<Interval> out(dim, Interval{HUGE_VAL, -HUGE_VAL});
        for (long long mask = 0; mask < (1LL << dim); ++mask) {
          Vec c(dim);
          for (int i = 0; i < dim; ++i) c[i] = (mask >> i & 1) ? pb[i].hi : pb[i].lo;
          const Vec y = s * c;
          for (int i = 0; i < dim; ++i) out[i] = {std::min(out[i].lo, y[i]), std::max(out[i].hi, y[i])};
        }
        return out;
      }
      case Kind::unfold: {
        auto out = parent->bounding_box();
        const Vec shift = (d - 1) * parent->code.dual_basis().col(j);
        for (size_t i = 0; i < out.size(); ++i) {
          out[i].lo = std::min(out[i].lo, out[i].lo + shift[i]);
          out[i].hi = std::max(out[i].hi, out[i].hi + shift[i]);
        }
        return out;
      }
      case Kind::fold:
        return parent->bounding_box();
    }
    return {};
  }

  std::vector<Node> grid(int nodes) const {
    std::vector<Node> out;
    switch (kind) {
      case Kind::base: {
        const int dim = code.dim();
        std::vector<std::vector<Interval>> pieces;
        bool masked = false;
        if (cell.kind() == CellKind::voronoi) {
          pieces.push_back(cell.bounding_box());
          masked = true;
        } else {
          pieces = cell.box_pieces();
        }
        for (const auto& piece : pieces) {
          std::vector<QuadRule> rules;
          for (const auto& iv : piece) rules.push_back(gauss_legendre(nodes, iv.lo, iv.hi));
          std::vector<int> idx(dim, 0);
          while (true) {
            Node nd{Vec(dim), 1.0};
            for (int i = 0; i < dim; ++i) {
              nd.k[i] = rules[i].x[idx[i]];
              nd.w *= rules[i].w[idx[i]];
            }
            if (!masked || cell.contains(nd.k)) out.push_back(std::move(nd));
            int i = dim - 1;
            while (i >= 0 && ++idx[i] == nodes) idx[i--] = 0;
            if (i < 0) break;
          }
        }
        return out;
      }
      case Kind::linear:
        out = parent->grid(nodes);
        for (auto& nd : out) nd.k = s * nd.k;  // |det S| = 1
        return out;
      case Kind::unfold: {
        const auto base = parent->grid(nodes);
        const Vec mb = parent->code.dual_basis().col(j);
        for (int a = 0; a < d; ++a)
          for (const auto& nd : base) out.push_back({nd.k + a * mb, nd.w});
        return out;
      }
      case Kind::fold:
        for (auto& nd : parent->grid(nodes))
          if (remainder(nd.k).s.isZero()) out.push_back(std::move(nd));
        return out;
    }
    return out;
  }
};

DecompositionParams::DecompositionParams(const PrimitiveCell& cell) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::base;
  impl->code = cell.code();
  impl->cell = cell;
  impl_ = impl;
}

const GkpCode& DecompositionParams::code() const { return impl_->code; }

Remainder DecompositionParams::remainder(const Vec& v) const {
  if (v.size() != code().dim()) throw Error(Errc::dimension, "remainder: vector dimension mismatch");
  return impl_->remainder(v);
}

bool DecompositionParams::contains(const Vec& v) const { return remainder(v).s.isZero(); }

std::vector<Interval> DecompositionParams::bounding_box() const { return impl_->bounding_box(); }

DecompositionParams DecompositionParams::transformed(const Mat& s) const {
  if (s.rows() != code().dim() || s.cols() != code().dim())
    throw Error(Errc::dimension, "gaussian_transform: matrix dimension mismatch");
  if (!check_symplectic(s, 1e-10)) throw Error(Errc::invalid_lattice, "gaussian_transform: S is not symplectic");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::linear;
  impl->code = GkpCode(s * sigma(), dims());
  impl->parent = impl_;
  impl->s = s;
  impl->s_inv = s.inverse();
  return DecompositionParams(impl);
}

DecompositionParams DecompositionParams::unfolded(int j) const {
  if (j < 0 || j >= modes()) throw Error(Errc::dimension, "unfold: mode index out of range");
  const int dj = dims()[j];
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::unfold;
  std::vector<int> nd = dims();
  nd[j] = 1;
  impl->code = GkpCode(scale_mode(sigma(), j, std::sqrt(static_cast<double>(dj))), nd);
  impl->parent = impl_;
  impl->j = j;
  impl->d = dj;
  return DecompositionParams(impl);
}

DecompositionParams DecompositionParams::folded(int j, int d) const {
  if (j < 0 || j >= modes()) throw Error(Errc::dimension, "fold: mode index out of range");
  if (dims()[j] != 1) throw Error(Errc::dimension, "fold: mode must be a qunaught mode");
  if (d < 1) throw Error(Errc::domain, "fold: dimension must be positive");
  if (impl_->kind == Impl::Kind::unfold && impl_->j == j && impl_->d == d) return DecompositionParams(impl_->parent);

  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::fold;
  std::vector<int> nd = dims();
  nd[j] = d;
  impl->code = GkpCode(scale_mode(sigma(), j, 1.0 / std::sqrt(static_cast<double>(d))), nd);
  impl->parent = impl_;
  impl->j = j;
  impl->d = d;

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const Mat& mb = code().dual_basis();
  for (int t = 0; t < 2000; ++t) {
    Vec c(code().dim());
    for (int i = 0; i < c.size(); ++i) c[i] = u(rng);
    impl->remainder(mb * c);  // throws on a tiling failure
  }
  return DecompositionParams(impl);
}

bool DecompositionParams::equivalent(const DecompositionParams& other, double tol) const {
  if (impl_ == other.impl_) return true;
  if (dims() != other.dims() || (sigma() - other.sigma()).cwiseAbs().maxCoeff() > tol) return false;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Vec c(code().dim());
    for (int i = 0; i < c.size(); ++i) c[i] = u(rng);
    const Vec v = code().dual_basis() * c;
    const Remainder a = remainder(v), b = other.remainder(v);
    if (a.s != b.s || (a.rem - b.rem).norm() > tol) return false;
  }
  return true;
}

std::vector<DecompositionParams::Node> DecompositionParams::grid(int nodes) const {
  if (nodes < 1) throw Error(Errc::domain, "grid: need at least one node");
  return impl_->grid(nodes);
}

// ---------------------------------------------------------------------------
// Kets

double SubsystemKet::norm2() const {
  double s = 0;
  for (const auto& p : points) s += p.weight * p.amp.squaredNorm();
  return s;
}

int mu_index(const std::vector<int>& dims, const IVec& mu) {
  int idx = 0;
  for (size_t j = 0; j < dims.size(); ++j) idx = idx * dims[j] + static_cast<int>(mod(mu[j], dims[j]));
  return idx;
}

IVec mu_label(const std::vector<int>& dims, int index) {
  IVec mu(dims.size());
  for (int j = static_cast<int>(dims.size()) - 1; j >= 0; --j) {
    mu[j] = index % dims[j];
    index /= dims[j];
  }
  return mu;
}

namespace {

// |mu, k> for k anywhere: k = lbar + rem, W(lbar)|mu-bar> = P_d(s)|mu-bar>.
void apply_bc(const DecompositionParams& params, int ext_dim, Vec& k, CVec& amp) {
  const Remainder r = params.remainder(k);
  if (r.s.isZero()) {
    k = r.rem;
    return;
  }
  const int n = params.modes();
  const Vec lbar = params.code().dual_basis() * r.s.cast<double>();
  const double ph = kPi * r.rem.dot(omega(n) * lbar);
  const CMat p = pauli_matrix(params.dims(), r.s);
  const int dl = params.logical_dim();
  CVec out(amp.size());
  for (int e = 0; e < ext_dim; ++e) out.segment(e * dl, dl) = p * amp.segment(e * dl, dl);
  amp = std::polar(1.0, ph) * out;
  k = r.rem;
}

std::vector<long long> key_of(const Vec& k, double tol) {
  std::vector<long long> key(k.size());
  for (int i = 0; i < k.size(); ++i) key[i] = std::llround(k[i] / tol);
  return key;
}

SubsystemKet merged(SubsystemKet ket, double tol) {
  std::map<std::vector<long long>, size_t> where;
  std::vector<SubsystemPoint> out;
  for (auto& p : ket.points) {
    auto key = key_of(p.k, tol);
    auto it = where.find(key);
    if (it == where.end()) {
      where.emplace(std::move(key), out.size());
      out.push_back(std::move(p));
      continue;
    }
    SubsystemPoint& q = out[it->second];
    if (std::abs(q.weight - p.weight) > 1e-12 * std::max(1.0, std::abs(q.weight)))
      throw Error(Errc::domain, "superpose: coincident points carry different quadrature weights");
    q.amp += p.amp;
  }
  ket.points = std::move(out);
  return ket;
}

}  // namespace

SubsystemKet product_state(const DecompositionParams& params, const CVec& psi, const Vec& k, int ext_dim) {
  SubsystemKet ket(params, ext_dim);
  if (psi.size() != ket.amp_size()) throw Error(Errc::dimension, "product_state: amplitude size mismatch");
  SubsystemPoint p{k, 1.0, psi};
  apply_bc(params, ext_dim, p.k, p.amp);
  ket.points.push_back(std::move(p));
  return ket;
}

SubsystemKet superpose(const std::vector<std::pair<cplx, SubsystemKet>>& terms, double tol) {
  if (terms.empty()) throw Error(Errc::domain, "superpose: no terms");
  SubsystemKet out(terms.front().second.params, terms.front().second.ext_dim);
  for (const auto& [c, ket] : terms) {
    if (ket.ext_dim != out.ext_dim || !ket.params.equivalent(out.params))
      throw Error(Errc::dimension, "superpose: mismatched decomposition parameters");
    for (const auto& p : ket.points) out.points.push_back({p.k, p.weight, c * p.amp});
  }
  return merged(std::move(out), tol);
}

cplx stabilizer_eigenvalue(const DecompositionParams& params, const Vec& k, int J) {
  const Vec m = params.code().stabilizer_basis().col(J);
  return std::polar(1.0, 2 * kPi * k.dot(omega(params.modes()) * m));
}

std::vector<ZakPeak> zak_position_amplitudes(double k1, double k2, double a, int window) {
  if (!(a > 0)) throw Error(Errc::domain, "zak_position_amplitudes: a must be positive");
  const double norm = std::pow(2 * kPi * a * a, 0.25);
  std::vector<ZakPeak> out;
  for (long long s = -window; s <= window; ++s) {
    const double sd = static_cast<double>(s);
    out.push_back({s, kSqrt2Pi * (k1 + a * sd), norm * std::polar(1.0, kPi * k1 * k2 + 2 * kPi * a * k2 * sd)});
  }
  return out;
}

Decomposition decompose_wavefunction(const Wavefunction& psi, const DecompositionParams& params,
                                     const std::vector<DecompositionParams::Node>& nodes,
                                     const DecomposeOptions& opt) {
  const int n = params.modes();
  const auto& dims = params.dims();
  const int dl = params.logical_dim();
  const Mat sinv = params.sigma().inverse();
  const Mat om = omega(n);
  const Mat& mb = params.code().dual_basis();
  double dprod = 1;
  Vec sqd(n);
  for (int j = 0; j < n; ++j) {
    dprod *= dims[j];
    sqd[j] = std::sqrt(static_cast<double>(dims[j]));
  }
  const double c = std::pow(std::pow(2 * kPi, n) * dprod, 0.25);
  const int w = opt.window;
  const int span = 2 * w + 1;
  long long combs = 1;
  for (int j = 0; j < n; ++j) combs *= span;

  Decomposition out{SubsystemKet(params), 0.0};
  double max_amp = 0;
  for (const auto& nd : nodes) {
    SubsystemPoint pt{nd.k, nd.w, CVec::Zero(dl)};
    for (int m = 0; m < dl; ++m) {
      const IVec mu = mu_label(dims, m);
      Vec lbar = Vec::Zero(2 * n);
      for (int j = 0; j < n; ++j) lbar += static_cast<double>(mu[j]) * mb.col(j);
      const Vec kt = sinv * (nd.k + lbar);
      const Vec kq = kt.head(n), kp = kt.tail(n);
      cplx sum = 0;
      double shell = 0;
      Vec x(n);
      for (long long t = 0; t < combs; ++t) {
        long long rest = t;
        bool edge = false;
        double ph = 0;
        for (int j = 0; j < n; ++j) {
          const long long s = rest % span - w;
          rest /= span;
          edge = edge || std::llabs(s) == w;
          x[j] = kSqrt2Pi * (kq[j] + sqd[j] * static_cast<double>(s));
          ph -= 2 * kPi * sqd[j] * static_cast<double>(s) * kp[j];
        }
        const cplx v = psi(x);
        sum += std::polar(1.0, ph) * v;
        if (edge) shell += std::abs(v);
      }
      const double ph0 = -kPi * lbar.dot(om * nd.k) - kPi * kq.dot(kp);
      pt.amp[m] = c * std::polar(1.0, ph0) * sum;
      max_amp = std::max(max_amp, std::abs(pt.amp[m]));
      out.tail_bound = std::max(out.tail_bound, c * shell);
    }
    out.ket.points.push_back(std::move(pt));
  }
  if (out.tail_bound > opt.tail_tol * std::max(max_amp, 1e-300))
    throw Error(Errc::tail_bound, "decompose_wavefunction: comb sum not converged within the window (tail " +
                                      std::to_string(out.tail_bound) + ")");
  return out;
}

SubsystemKet position_eigenstate(const DecompositionParams& params, double x, int nodes) {
  if (params.modes() != 1 || (params.sigma() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(Errc::unsupported, "position_eigenstate: needs a single-mode decomposition with Sigma = I");
  const int d = params.dims()[0];
  const double sd = std::sqrt(static_cast<double>(d));
  const auto bb = params.bounding_box();
  if (std::abs((bb[0].hi - bb[0].lo) * (bb[1].hi - bb[1].lo) - 1.0 / d) > 1e-12)
    throw Error(Errc::unsupported, "position_eigenstate: cell must be a box");

  // x / sqrt(2 pi) = k_x + n_x / sqrt(d) with k_x in the position side of the cell.
  const double u = x / kSqrt2Pi;
  const long long nx = static_cast<long long>(std::ceil((u - bb[0].hi) * sd - 1e-12));
  const double kx = u - static_cast<double>(nx) / sd;
  const long long mu = mod(nx, d);
  const double s = static_cast<double>((nx - mu) / d);
  const double c = std::pow(2 * kPi * d, 0.25) / kSqrt2Pi;

  SubsystemKet ket(params);
  const QuadRule q = gauss_legendre(nodes, bb[1].lo, bb[1].hi);
  for (int i = 0; i < nodes; ++i) {
    const double k2 = q.x[i];
    const double kt1 = kx + static_cast<double>(mu) / sd;
    // lbar^T Omega k = (mu / sqrt d) k2.
    const double ph = -kPi * static_cast<double>(mu) / sd * k2 - kPi * kt1 * k2 - 2 * kPi * sd * s * k2;
    SubsystemPoint p{Vec(2), q.w[i], CVec::Zero(d)};
    p.k << kx, k2;
    p.amp[mu] = c * std::polar(1.0, ph);
    ket.points.push_back(std::move(p));
  }
  return ket;
}

SubsystemKet cell_transform(const SubsystemKet& state, const DecompositionParams& new_params) {
  if (state.params.dims() != new_params.dims() ||
      (state.params.sigma() - new_params.sigma()).cwiseAbs().maxCoeff() > 1e-9)
    throw Error(Errc::dimension, "cell_transform: the new cell belongs to a different (Sigma, d)");
  SubsystemKet out(new_params, state.ext_dim);
  out.points = state.points;
  for (auto& p : out.points) apply_bc(new_params, out.ext_dim, p.k, p.amp);
  return out;
}

SubsystemKet gaussian_transform(const SubsystemKet& state, const Mat& s) {
  SubsystemKet out(state.params.transformed(s), state.ext_dim);
  out.points = state.points;
  for (auto& p : out.points) p.k = s * p.k;
  return out;
}

SubsystemKet unfold(const SubsystemKet& state, int j) {
  const DecompositionParams np = state.params.unfolded(j);
  const auto& dims = state.params.dims();
  const int dl = state.params.logical_dim();
  const int dl2 = np.logical_dim();
  const int n = state.params.modes();
  const Vec mb = state.params.code().dual_basis().col(j);
  const Mat om = omega(n);

  SubsystemKet out(np, state.ext_dim);
  for (const auto& p : state.points) {
    for (int a = 0; a < dims[j]; ++a) {
      SubsystemPoint q{p.k + a * mb, p.weight, CVec::Zero(out.amp_size())};
      const cplx ph = std::polar(1.0, kPi * a * mb.dot(om * p.k));
      bool any = false;
      for (int m = 0; m < dl; ++m) {
        IVec mu = mu_label(dims, m);
        if (mu[j] != a) continue;
        mu[j] = 0;
        const int m2 = mu_index(np.dims(), mu);
        for (int e = 0; e < state.ext_dim; ++e) {
          q.amp[e * dl2 + m2] = ph * p.amp[e * dl + m];
          any = any || q.amp[e * dl2 + m2] != cplx(0);
        }
      }
      if (!any) continue;
      apply_bc(np, out.ext_dim, q.k, q.amp);
      out.points.push_back(std::move(q));
    }
  }
  return out;
}

SubsystemKet fold(const SubsystemKet& state, int j, int d, double merge_tol) {
  const DecompositionParams np = state.params.folded(j, d);
  const int dl = state.params.logical_dim();
  const int dl2 = np.logical_dim();
  SubsystemKet out(np, state.ext_dim);
  // Stabilizer states with mu_j = 0 coincide in both decompositions.
  for (const auto& p : state.points) {
    SubsystemPoint q{p.k, p.weight, CVec::Zero(out.amp_size())};
    for (int m = 0; m < dl; ++m) {
      const int m2 = mu_index(np.dims(), mu_label(state.params.dims(), m));
      for (int e = 0; e < state.ext_dim; ++e) q.amp[e * dl2 + m2] = p.amp[e * dl + m];
    }
    apply_bc(np, out.ext_dim, q.k, q.amp);
    out.points.push_back(std::move(q));
  }
  return merged(std::move(out), merge_tol);
}

SubsystemKet displace(const SubsystemKet& state, const Vec& v) {
  const Mat om = omega(state.params.modes());
  SubsystemKet out = state;
  for (auto& p : out.points) {
    p.amp *= std::polar(1.0, -kPi * v.dot(om * p.k));
    p.k += v;
    apply_bc(out.params, out.ext_dim, p.k, p.amp);
  }
  return out;
}

CMat clifford_unitary(const std::vector<int>& dims, const IMat& n_a) {
  const int n = static_cast<int>(dims.size());
  if (n_a.rows() != 2 * n || n_a.cols() != 2 * n) throw Error(Errc::dimension, "clifford: N_A must be 2n x 2n");
  const Mat nd = n_a.cast<double>();
  if ((nd.transpose() * omega(n) * nd - omega(n)).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(Errc::invalid_lattice, "clifford: N_A is not symplectic");
  int dl = 1;
  for (int d : dims) dl *= d;
  const CMat id = CMat::Identity(dl, dl);
  CMat m(2 * n * dl * dl, dl * dl);
  for (int J = 0; J < 2 * n; ++J) {
    IVec e = IVec::Zero(2 * n);
    e[J] = 1;
    const CMat p = pauli_matrix(dims, e);
    const CMat q = pauli_matrix(dims, IVec(n_a * e));
    // vec(U P - Q U) = (P^T (x) I - I (x) Q) vec U
    m.block(J * dl * dl, 0, dl * dl, dl * dl) = kron(p.transpose(), id) - kron(id, q);
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(m.adjoint() * m);
  const Eigen::VectorXd ev = es.eigenvalues();
  if (ev[0] > 1e-10 || (ev.size() > 1 && ev[1] < 1e-8))
    throw Error(Errc::invalid_lattice, "clifford: N_A does not define a unique logical unitary");
  const CVec v = es.eigenvectors().col(0);
  CMat u(dl, dl);
  for (int c = 0; c < dl; ++c) u.col(c) = v.segment(c * dl, dl);
  u *= std::sqrt(static_cast<double>(dl)) / u.norm();
  int r0 = 0;
  u.col(0).cwiseAbs().maxCoeff(&r0);
  u *= std::conj(u(r0, 0)) / std::abs(u(r0, 0));
  return u;
}

SubsystemKet apply_clifford(const SubsystemKet& state, const IMat& n_a) {
  const auto& params = state.params;
  const CMat u = clifford_unitary(params.dims(), n_a);
  const Mat sa = params.sigma() * n_a.cast<double>() * params.sigma().inverse();
  const int dl = params.logical_dim();
  SubsystemKet out = state;
  for (auto& p : out.points) {
    p.k = sa * p.k;
    for (int e = 0; e < out.ext_dim; ++e) p.amp.segment(e * dl, dl) = u * p.amp.segment(e * dl, dl);
    apply_bc(params, out.ext_dim, p.k, p.amp);
  }
  return out;
}

CMat partial_trace(const SubsystemKet& state) {
  const int m = state.amp_size();
  CMat rho = CMat::Zero(m, m);
  for (const auto& p : state.points) rho += p.weight * p.amp * p.amp.adjoint();
  return rho;
}

CMat partial_trace(const KetMixture& mixture) {
  if (mixture.empty()) throw Error(Errc::domain, "partial_trace: empty mixture");
  const auto& ref = mixture.front().second;
  CMat rho = CMat::Zero(ref.amp_size(), ref.amp_size());
  for (const auto& [w, ket] : mixture) {
    if (ket.ext_dim != ref.ext_dim || !ket.params.equivalent(ref.params))
      throw Error(Errc::dimension, "partial_trace: mismatched decomposition parameters");
    rho += w * partial_trace(ket);
  }
  return rho;
}

std::string to_string(PauliAxis p) {
  switch (p) {
    case PauliAxis::x:
      return "X";
    case PauliAxis::y:
      return "Y";
    case PauliAxis::z:
      return "Z";
  }
  return "?";
}

int binned_pauli_action(PauliAxis p, const DecompositionParams& params, const Vec& k) {
  if (params.modes() != 1 || params.dims()[0] != 2)
    throw Error(Errc::unsupported, "binned_pauli_action: single-mode qubit codes only");
  const Mat& mb = params.code().dual_basis();
  Vec m = p == PauliAxis::x ? Vec(mb.col(0)) : p == PauliAxis::z ? Vec(mb.col(1)) : Vec(mb.col(0) + mb.col(1));
  const double t = k.dot(omega(1) * m);
  const double r = t - std::ceil(t - 0.5);  // in (-1/2, 1/2]
  return (r > -0.25 && r <= 0.25) ? 1 : -1;
}

namespace {

const std::array<CMat, 4>& qubit_paulis() {
  static const std::array<CMat, 4> p = [] {
    std::array<CMat, 4> a;
    a[0] = CMat::Identity(2, 2);
    a[1] = CMat::Zero(2, 2);
    a[1](0, 1) = a[1](1, 0) = 1;
    a[2] = CMat::Zero(2, 2);
    a[2](0, 1) = cplx(0, -1);
    a[2](1, 0) = cplx(0, 1);
    a[3] = CMat::Zero(2, 2);
    a[3](0, 0) = 1;
    a[3](1, 1) = -1;
    return a;
  }();
  return p;
}

}  // namespace

CMat binned_lst_decode(const SubsystemKet& state) {
  const auto& params = state.params;
  if (params.modes() != 1 || params.dims()[0] != 2)
    throw Error(Errc::unsupported, "binned_lst_decode: single-mode qubit codes only");
  const int ne = state.ext_dim;
  const auto& sig = qubit_paulis();
  const PauliAxis axes[3] = {PauliAxis::x, PauliAxis::y, PauliAxis::z};
  CMat out = CMat::Zero(2 * ne, 2 * ne);
  for (const auto& p : state.points) {
    const CMat rho = p.weight * p.amp * p.amp.adjoint();
    for (int a = 0; a < 4; ++a) {
      const int sign = a == 0 ? 1 : binned_pauli_action(axes[a - 1], params, p.k);
      // Register block tr_L[(I (x) sigma_a) rho].
      CMat blk(ne, ne);
      for (int e = 0; e < ne; ++e)
        for (int f = 0; f < ne; ++f) blk(e, f) = (sig[a] * rho.block(e * 2, f * 2, 2, 2)).trace();
      out += 0.5 * sign * kron(blk, sig[a]);
    }
  }
  return out;
}

CMat binned_lst_decode(const KetMixture& mixture) {
  if (mixture.empty()) throw Error(Errc::domain, "binned_lst_decode: empty mixture");
  CMat out = CMat::Zero(2 * mixture.front().second.ext_dim, 2 * mixture.front().second.ext_dim);
  for (const auto& [w, ket] : mixture) out += w * binned_lst_decode(ket);
  return out;
}

namespace wavefunctions {

Wavefunction vacuum() {
  return [](const Vec& x) { return cplx(std::pow(kPi, -0.25 * x.size()) * std::exp(-0.5 * x.squaredNorm())); };
}

Wavefunction squeezed_vacuum(double r) {
  const double e = std::exp(2 * r);
  return [e](const Vec& x) {
    return cplx(std::pow(e / kPi, 0.25 * x.size()) * std::exp(-0.5 * e * x.squaredNorm()));
  };
}

Wavefunction position_gaussian(double x0, double width) {
  if (!(width > 0)) throw Error(Errc::domain, "position_gaussian: width must be positive");
  return [x0, width](const Vec& x) {
    return cplx(std::pow(2 * kPi * width * width, -0.25) * std::exp(-(x[0] - x0) * (x[0] - x0) / (4 * width * width)));
  };
}

Wavefunction approximate_codeword(int mu, double delta, int window) {
  if (!(delta > 0)) throw Error(Errc::domain, "approximate_codeword: Delta must be positive");
  const double t = delta * delta;
  const double e1 = std::exp(-t), e2 = -std::expm1(-2 * t);
  const double pref = 1.0 / std::sqrt(kPi * e2);
  const double sp = std::sqrt(kPi);
  return [=](const Vec& xv) {
    const double x = xv[0];
    double sum = 0;
    for (int s = -window; s <= window; ++s) {
      const double y = sp * (2 * s + mu);
      sum += std::exp(-((1 + e1 * e1) * (x * x + y * y) - 4 * e1 * x * y) / (2 * e2));
    }
    return cplx(pref * sum);
  };
}

Sampled parse_sampled(const std::string& text) {
  Sampled out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, re, im;
    if (!(ls >> x)) continue;
    if (!(ls >> re >> im)) throw Error(Errc::config, "sampled wavefunction: expected 'x re im' on line " + std::to_string(lineno));
    if (!out.x.empty() && x <= out.x.back())
      throw Error(Errc::config, "sampled wavefunction: abscissae must increase (line " + std::to_string(lineno) + ")");
    out.x.push_back(x);
    out.y.emplace_back(re, im);
  }
  if (out.x.size() < 2) throw Error(Errc::config, "sampled wavefunction: need at least two rows");
  return out;
}

Wavefunction interpolated(Sampled table) {
  const size_t n = table.x.size();
  if (n < 2 || table.y.size() != n) throw Error(Errc::config, "interpolated: malformed table");
  std::vector<cplx> slope(n);
  for (size_t i = 0; i < n; ++i) {
    const size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? n - 1 : i + 1;
    slope[i] = (table.y[b] - table.y[a]) / (table.x[b] - table.x[a]);
  }
  return [t = std::move(table), slope](const Vec& xv) {
    const double x = xv[0];
    if (x < t.x.front() || x > t.x.back()) return cplx(0);
    size_t i = std::upper_bound(t.x.begin(), t.x.end(), x) - t.x.begin();
    i = std::clamp<size_t>(i, 1, t.x.size() - 1) - 1;
    const double h = t.x[i + 1] - t.x[i];
    const double u = (x - t.x[i]) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * t.y[i] + h10 * h * slope[i] + h01 * t.y[i + 1] + h11 * h * slope[i + 1];
  };
}

}  // namespace wavefunctions

}  // namespace gkp
