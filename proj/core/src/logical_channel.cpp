#include "gkp/logical_channel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "gkp/special.hpp"

namespace gkp {

namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;

std::vector<long long> to_vec(const IVec& s) { return std::vector<long long>(s.data(), s.data() + s.size()); }

IVec from_vec(const std::vector<long long>& v) {
  IVec s(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) s[static_cast<Eigen::Index>(i)] = v[i];
  return s;
}

long long mod(long long a, long long d) {
  const long long r = a % d;
  return r < 0 ? r + d : r;
}

cplxl to_l(cplx z) { return {static_cast<long double>(z.real()), static_cast<long double>(z.imag())}; }

const QuadRule& gl32() {
  static const QuadRule rule = gauss_legendre(32);
  return rule;
}

// int_lo^hi exp(-a x^2 + b x) dx
cplxl gaussian_segment(cplxl a, cplxl b, long double lo, long double hi) {
  const long double len = hi - lo;
  const cplxl sa = std::sqrt(a);
  auto g = [&](long double x) { return std::exp(-a * x * x + b * x); };
  if (std::abs(sa) * len <= 0.5L && std::abs(b) * len <= 20.0L) {
    const auto& q = gl32();
    cplxl sum = 0;
    const long double mid = 0.5L * (lo + hi), half = 0.5L * len;
    for (size_t i = 0; i < q.x.size(); ++i) sum += static_cast<long double>(q.w[i]) * g(mid + half * q.x[i]);
    return sum * half;
  }
  const cplxl iu(0.0L, 1.0L);
  const cplxl z0 = sa * lo - b / (2.0L * sa);
  const cplxl z1 = sa * hi - b / (2.0L * sa);
  const cplxl pref = std::sqrt(kPiL) / (2.0L * sa);
  if (z0.real() >= 0 && z1.real() >= 0)
    return pref * (g(lo) * faddeeva<long double>(iu * z0) - g(hi) * faddeeva<long double>(iu * z1));
  if (z0.real() <= 0 && z1.real() <= 0)
    return pref * (g(hi) * faddeeva<long double>(-iu * z1) - g(lo) * faddeeva<long double>(-iu * z0));
  return pref * (2.0L * std::exp(b * b / (4.0L * a)) - g(hi) * faddeeva<long double>(iu * z1) -
                 g(lo) * faddeeva<long double>(-iu * z0));
}

bool is_diagonal(const CMat& a) {
  const double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j && std::abs(a(i, j)) > 1e-13 * scale) return false;
  return true;
}

bool has_box_pieces(const PrimitiveCell& cell) { return cell.kind() != CellKind::voronoi; }

// Sum of w_i exp(e_i) accumulated against the largest real exponent.
struct ScaledSum {
  std::vector<cplx> expo;
  std::vector<double> w;
  cplxl total() const {
    if (expo.empty()) return 0;
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& e : expo) shift = std::max(shift, e.real());
    if (!std::isfinite(shift)) return 0;
    cplxl s = 0;
    for (size_t i = 0; i < expo.size(); ++i) s += static_cast<long double>(w[i]) * std::exp(to_l(expo[i]) - static_cast<long double>(shift));
    return s * std::exp(static_cast<long double>(shift));
  }
};

cplx exponent_at(const DiagonalForm& f, const Vec& v) {
  const CVec vc = v.cast<cplx>();
  return -(vc.transpose() * f.A * vc)(0, 0) + (f.beta.transpose() * vc)(0, 0) + f.gamma0;
}

void box_nodes(const std::vector<Interval>& box, int n, const DiagonalForm& f, ScaledSum& acc,
               const std::function<bool(const Vec&)>& mask = {}) {
  const int dim = static_cast<int>(box.size());
  std::vector<QuadRule> rules;
  for (const auto& iv : box) rules.push_back(gauss_legendre(n, iv.lo, iv.hi));
  std::vector<int> idx(dim, 0);
  Vec v(dim);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < dim; ++i) {
      v[i] = rules[i].x[idx[i]];
      w *= rules[i].w[idx[i]];
    }
    if (!mask || mask(v)) {
      acc.expo.push_back(exponent_at(f, v));
      acc.w.push_back(w);
    }
    int k = dim - 1;
    while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
    if (k < 0) break;
  }
}

// Voronoi polygon (counterclockwise) by clipping the bounding box with the facet half-planes.
std::vector<Vec> voronoi_polygon(const PrimitiveCell& cell) {
  const auto bb = cell.bounding_box();
  std::vector<Vec> poly;
  const double pad = 1e-9;
  for (auto [x, y] : {std::pair{bb[0].lo - pad, bb[1].lo - pad}, std::pair{bb[0].hi + pad, bb[1].lo - pad},
                      std::pair{bb[0].hi + pad, bb[1].hi + pad}, std::pair{bb[0].lo - pad, bb[1].hi + pad}}) {
    Vec p(2);
    p << x, y;
    poly.push_back(p);
  }
  for (const auto& s : cell.relevant()) {
    const Vec r = cell.code().embed(s);
    const double c = 0.5 * r.squaredNorm();
    std::vector<Vec> out;
    for (size_t i = 0; i < poly.size(); ++i) {
      const Vec& a = poly[i];
      const Vec& b = poly[(i + 1) % poly.size()];
      const double fa = a.dot(r) - c, fb = b.dot(r) - c;
      if (fa <= 0) out.push_back(a);
      if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) out.push_back(a + (b - a) * (fa / (fa - fb)));
    }
    poly = std::move(out);
  }
  return poly;
}

void polygon_nodes(const std::vector<Vec>& poly, int n, const DiagonalForm& f, ScaledSum& acc) {
  const QuadRule q = gauss_legendre(n, 0.0, 1.0);
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % poly.size()];
    const double jac = std::abs(a[0] * b[1] - a[1] * b[0]);
    if (jac == 0) continue;
    // Collapsed square: x = xi * (a + eta (b - a)), dx = xi * |a x b| dxi deta.
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const double xi = q.x[k], eta = q.x[l];
        const Vec v = xi * (a + eta * (b - a));
        acc.expo.push_back(exponent_at(f, v));
        acc.w.push_back(q.w[k] * q.w[l] * xi * jac);
      }
  }
}

cplxl numeric_with_nodes(const DiagonalForm& f, const PrimitiveCell& cell, int n) {
  ScaledSum acc;
  if (has_box_pieces(cell)) {
    for (const auto& piece : cell.box_pieces()) box_nodes(piece, n, f, acc);
  } else if (cell.dim() == 2) {
    polygon_nodes(voronoi_polygon(cell), n, f, acc);
  } else {
    box_nodes(cell.bounding_box(), n, f, acc, [&](const Vec& v) { return cell.contains(v); });
  }
  return to_l(f.amp) * acc.total();
}

}  // namespace

int pauli_count(const std::vector<int>& dims) {
  int c = 1;
  for (int d : dims) c *= d * d;
  return c;
}

IVec pauli_label(const std::vector<int>& dims, int index) {
  const int n = static_cast<int>(dims.size());
  IVec r(2 * n);
  for (int J = 2 * n - 1; J >= 0; --J) {
    const int d = dims[J % n];
    r[J] = index % d;
    index /= d;
  }
  return r;
}

int pauli_index(const std::vector<int>& dims, const IVec& s) {
  const int n = static_cast<int>(dims.size());
  if (s.size() != 2 * n) throw Error(Errc::dimension, "pauli_index: label size mismatch");
  int idx = 0;
  for (int J = 0; J < 2 * n; ++J) idx = idx * dims[J % n] + static_cast<int>(mod(s[J], dims[J % n]));
  return idx;
}

cplxl pauli_phase(const std::vector<int>& dims, const IVec& s) {
  const int n = static_cast<int>(dims.size());
  // X^d = Z^d = I, so only the prefactor exp(i pi s_j s_{j+n} / d_j) changes under reduction.
  long double ang = 0;
  for (int j = 0; j < n; ++j) {
    const long long d = dims[j];
    const long long a = s[j], b = s[j + n];
    const long long ra = mod(a, d), rb = mod(b, d);
    const long long diff = a * b - ra * rb;  // divisible by d
    ang += kPiL * static_cast<long double>(mod(diff / d, 2));
  }
  return std::polar(1.0L, ang);
}

CMat pauli_matrix(const std::vector<int>& dims, const IVec& s) {
  const int n = static_cast<int>(dims.size());
  CMat out = CMat::Identity(1, 1);
  for (int j = 0; j < n; ++j) {
    const int d = dims[j];
    CMat x = CMat::Zero(d, d), z = CMat::Zero(d, d);
    for (int k = 0; k < d; ++k) {
      x((k + 1) % d, k) = 1.0;
      z(k, k) = std::polar(1.0, 2 * kPi * k / d);
    }
    CMat xp = CMat::Identity(d, d), zp = CMat::Identity(d, d);
    for (long long k = 0; k < mod(s[j], d); ++k) xp = x * xp;
    for (long long k = 0; k < mod(s[j + n], d); ++k) zp = z * zp;
    CMat p = std::polar(1.0, kPi * static_cast<double>(s[j]) * static_cast<double>(s[j + n]) / d) * xp * zp;
    CMat k(out.rows() * d, out.cols() * d);
    for (int r = 0; r < out.rows(); ++r)
      for (int c = 0; c < out.cols(); ++c) k.block(r * d, c * d, d, d) = out(r, c) * p;
    out = k;
  }
  return out;
}

LogicalSuperop::LogicalSuperop(std::vector<int> dims, int s_max) : dims_(std::move(dims)), s_max_(s_max) {}

int LogicalSuperop::logical_dim() const {
  int d = 1;
  for (int x : dims_) d *= x;
  return d;
}

LogicalSuperop LogicalSuperop::from_chi(const std::vector<int>& dims, const CMatL& chi) {
  const int np = pauli_count(dims);
  if (chi.rows() != np || chi.cols() != np) throw Error(Errc::dimension, "from_chi: size mismatch");
  LogicalSuperop out(dims, 0);
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b)
      if (chi(a, b) != cplxl(0)) out.add(pauli_label(dims, a), pauli_label(dims, b), chi(a, b));
  return out;
}

void LogicalSuperop::add(const IVec& s, const IVec& t, cplxl value) { coeffs_[{to_vec(s), to_vec(t)}] += value; }

cplxl LogicalSuperop::coeff(const IVec& s, const IVec& t) const {
  auto it = coeffs_.find({to_vec(s), to_vec(t)});
  return it == coeffs_.end() ? cplxl(0) : it->second;
}

CMatL LogicalSuperop::chi() const {
  const int np = pauli_count(dims_);
  CMatL chi = CMatL::Zero(np, np);
  for (const auto& [key, c] : coeffs_) {
    const IVec s = from_vec(key.first), t = from_vec(key.second);
    chi(pauli_index(dims_, s), pauli_index(dims_, t)) += c * pauli_phase(dims_, s) * std::conj(pauli_phase(dims_, t));
  }
  return chi;
}

CMat LogicalSuperop::superoperator() const {
  const int d = logical_dim();
  const int np = pauli_count(dims_);
  const CMatL chi = this->chi();
  std::vector<CMat> sig(np);
  for (int a = 0; a < np; ++a) sig[a] = pauli_matrix(dims_, pauli_label(dims_, a));
  CMat out = CMat::Zero(d * d, d * d);
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b) {
      if (chi(a, b) == cplxl(0)) continue;
      const cplx c(static_cast<double>(chi(a, b).real()), static_cast<double>(chi(a, b).imag()));
      // vec(A rho B^dag) = (conj(B) kron A) vec(rho)
      const CMat bc = sig[b].conjugate();
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out.block(i * d, j * d, d, d) += c * bc(i, j) * sig[a];
    }
  return out;
}

CMat LogicalSuperop::apply(const CMat& rho) const {
  const int d = logical_dim();
  if (rho.rows() != d || rho.cols() != d) throw Error(Errc::dimension, "LogicalSuperop::apply: size mismatch");
  const CVec v = Eigen::Map<const CVec>(rho.data(), d * d);
  const CVec w = superoperator() * v;
  return Eigen::Map<const CMat>(w.data(), d, d);
}

DiagonalForm diagonal_form(const GaussianKernel& kernel, const GkpCode& code, const IVec& s, const IVec& t) {
  const int d = code.dim();
  if (kernel.modes != code.modes()) throw Error(Errc::dimension, "diagonal_form: kernel and code mode counts differ");
  if (kernel.kind == KernelKind::identity)
    throw Error(Errc::unsupported, "diagonal_form: identity kernels have no density");
  const Vec a = code.embed(s), b = code.embed(t);
  DiagonalForm f;
  f.amp = kernel.form.amp;
  const CMat& q = kernel.form.Q;
  const CVec& l = kernel.form.l;
  if (kernel.kind == KernelKind::diagonal_delta) {
    if (s != t) {
      f.zero = true;
      f.A = CMat::Identity(d, d);
      f.beta = CVec::Zero(d);
      f.gamma0 = 0;
      return f;
    }
    const CVec ac = a.cast<cplx>();
    f.A = q;
    f.beta = -2.0 * q * ac + l;
    f.gamma0 = -(ac.transpose() * q * ac)(0, 0) + (l.transpose() * ac)(0, 0);
    return f;
  }
  Mat e(2 * d, d);
  e << Mat::Identity(d, d), Mat::Identity(d, d);
  CVec off(2 * d);
  off << a.cast<cplx>(), b.cast<cplx>();
  const CMat ec = e.cast<cplx>();
  const CMat A = ec.transpose() * q * ec;
  f.A = 0.5 * (A + A.transpose());
  f.beta = -2.0 * ec.transpose() * q * off + ec.transpose() * l +
           cplx(0.0, kPi) * (omega(d / 2) * (a - b)).cast<cplx>();
  f.gamma0 = -(off.transpose() * q * off)(0, 0) + (l.transpose() * off)(0, 0);
  return f;
}

cplxl box_cell_integral(const GaussianKernel& kernel, const PrimitiveCell& cell, const IVec& s, const IVec& t) {
  if (!has_box_pieces(cell)) throw Error(Errc::unsupported, "box_cell_integral: cell is not a union of boxes; use numeric_cell_integral");
  if (kernel.kind == KernelKind::identity) return (s.isZero() && t.isZero()) ? cplxl(1) : cplxl(0);
  const DiagonalForm f = diagonal_form(kernel, cell.code(), s, t);
  if (f.zero) return 0;
  if (!is_diagonal(f.A))
    throw Error(Errc::unsupported, "box_cell_integral: kernel does not factorize over coordinates; use numeric_cell_integral");
  const int d = cell.dim();
  cplxl sum = 0;
  for (const auto& piece : cell.box_pieces()) {
    cplxl prod = 1;
    for (int i = 0; i < d; ++i)
      prod *= gaussian_segment(to_l(f.A(i, i)), to_l(f.beta[i]), piece[i].lo, piece[i].hi);
    sum += prod;
  }
  return to_l(f.amp) * std::exp(to_l(f.gamma0)) * sum;
}

CellIntegral numeric_cell_integral(const GaussianKernel& kernel, const PrimitiveCell& cell, const IVec& s,
                                   const IVec& t, const NumericOptions& opt) {
  CellIntegral out;
  if (kernel.kind == KernelKind::identity) {
    out.value = (s.isZero() && t.isZero()) ? cplxl(1) : cplxl(0);
    return out;
  }
  const DiagonalForm f = diagonal_form(kernel, cell.code(), s, t);
  if (f.zero || f.amp == cplx(0)) return out;
  int n = opt.nodes;
  cplxl prev = numeric_with_nodes(f, cell, n);
  while (true) {
    const int next = 2 * n;
    if (next > opt.max_nodes) {
      out.value = prev;
      out.converged = false;
      return out;
    }
    const cplxl cur = numeric_with_nodes(f, cell, next);
    const double err = static_cast<double>(std::abs(cur - prev));
    out.value = cur;
    out.error = err;
    if (err <= opt.rel_tol * static_cast<double>(std::abs(cur)) || std::abs(cur) == 0.0L) return out;
    prev = cur;
    n = next;
  }
}

LogicalSuperop logical_channel(const GkpCode& code, const PrimitiveCell& cell, const ChannelCharFn& channel,
                               TruncationSpec trunc, const LogicalChannelOptions& opt) {
  if (trunc.s_max < 0) throw Error(Errc::domain, "logical_channel: s_max must be nonnegative");
  if (channel.modes != code.modes()) throw Error(Errc::dimension, "logical_channel: channel and code mode counts differ");
  const int d = code.dim();

  // Decay precheck on the shell |s|_inf = R of dual-lattice points.
  bool all_identity = true;
  for (const auto& term : channel.terms) all_identity = all_identity && term.kernel.kind == KernelKind::identity;
  if (!all_identity) {
    const int R = std::max(trunc.s_max + 1, 8);
    const double ref = std::max(std::abs(channel.diagonal(Vec::Zero(d))), 1e-300);
    IVec s = IVec::Constant(d, -R);
    double worst = 0;
    IVec worst_s = s;
    while (true) {
      if (s.cwiseAbs().maxCoeff() == R) {
        const double v = std::abs(channel.diagonal(code.embed(s))) / ref;
        if (!(v <= worst)) {
          worst = v;
          worst_s = s;
        }
      }
      int k = d - 1;
      while (k >= 0 && s[k] == R) s[k--] = -R;
      if (k < 0) break;
      ++s[k];
    }
    if (!(worst < opt.decay_threshold)) {
      std::ostringstream msg;
      msg << "logical_channel: characteristic function does not decay; |c| relative to c(0,0) is " << worst
          << " on the shell |s|_inf = " << R << " (at s = " << worst_s.transpose() << ")";
      throw Error(Errc::decay_violation, msg.str());
    }
  }

  bool analytic = has_box_pieces(cell) && !opt.force_numeric;
  if (analytic)
    for (const auto& term : channel.terms) {
      if (term.kernel.kind == KernelKind::identity) continue;
      const DiagonalForm f = diagonal_form(term.kernel, code, IVec::Zero(d), IVec::Zero(d));
      analytic = analytic && is_diagonal(f.A);
    }

  std::vector<IVec> window;
  {
    IVec s = IVec::Constant(d, -trunc.s_max);
    while (true) {
      window.push_back(s);
      int k = d - 1;
      while (k >= 0 && s[k] == trunc.s_max) s[k--] = -trunc.s_max;
      if (k < 0) break;
      ++s[k];
    }
  }
  const size_t nw = window.size();
  const size_t ntask = nw * nw;
  std::vector<cplxl> values(ntask);
  std::vector<double> errors(ntask, 0.0);
  std::vector<char> conv(ntask, 1);
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex fail_mu;
  auto worker = [&]() {
    try {
      for (size_t i = next++; i < ntask; i = next++) {
        const IVec& s = window[i / nw];
        const IVec& t = window[i % nw];
        cplxl acc = 0;
        for (const auto& term : channel.terms) {
          if (analytic) {
            acc += to_l(term.weight) * box_cell_integral(term.kernel, cell, s, t);
          } else {
            const CellIntegral ci = numeric_cell_integral(term.kernel, cell, s, t, opt.numeric);
            acc += to_l(term.weight) * ci.value;
            errors[i] += std::abs(term.weight) * ci.error;
            if (!ci.converged) conv[i] = 0;
          }
        }
        values[i] = acc;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(fail_mu);
      if (!failure) failure = std::current_exception();
      next = ntask;
    }
  };
  const int nthreads = std::max(1, std::min<int>(opt.threads, static_cast<int>(ntask)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  LogicalSuperop out(code.dims(), trunc.s_max);
  for (size_t i = 0; i < ntask; ++i) {
    if (values[i] != cplxl(0)) out.add(window[i / nw], window[i % nw], values[i]);
    out.integration_error = std::max(out.integration_error, errors[i]);
    out.converged = out.converged && conv[i];
  }
  return out;
}

}  // namespace gkp
