#include "gkp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace gkp {

bool check_symplectic(const Mat& m, double tol) {
  if (m.rows() != m.cols()) throw Error(Errc::dimension, "check_symplectic: matrix is not square");
  if (m.rows() % 2 != 0) throw Error(Errc::dimension, "check_symplectic: odd dimension");
  const Mat o = omega(static_cast<int>(m.rows() / 2));
  return (m.transpose() * o * m - o).cwiseAbs().maxCoeff() <= tol;
}

GkpCode::GkpCode(Mat sigma, std::vector<int> dims, std::string name)
    : sigma_(std::move(sigma)), dims_(std::move(dims)), name_(std::move(name)) {
  const int n = modes();
  if (n == 0 || sigma_.rows() != 2 * n || sigma_.cols() != 2 * n)
    throw Error(Errc::dimension, "GkpCode: Sigma must be 2n x 2n with n = dims.size()");
  for (int d : dims_)
    if (d < 1) throw Error(Errc::domain, "GkpCode: dimensions must be >= 1");
  if (!check_symplectic(sigma_, 1e-10)) throw Error(Errc::invalid_lattice, "GkpCode: Sigma is not symplectic");
  m_ = sigma_;
  mbar_ = sigma_;
  for (int J = 0; J < 2 * n; ++J) {
    const double r = std::sqrt(static_cast<double>(dim_of(J)));
    m_.col(J) *= r;
    mbar_.col(J) /= r;
  }
  mbar_inv_ = mbar_.inverse();
}

int GkpCode::logical_dim() const {
  return std::accumulate(dims_.begin(), dims_.end(), 1, std::multiplies<int>());
}

IVec GkpCode::dual_coeffs(const Vec& v, double tol) const {
  const Vec c = coords(v);
  IVec s(c.size());
  for (int i = 0; i < c.size(); ++i) {
    s[i] = std::llround(c[i]);
    if (std::abs(c[i] - static_cast<double>(s[i])) > tol)
      throw Error(Errc::invalid_lattice, "dual_coeffs: vector is not in the dual lattice");
  }
  return s;
}

IVec GkpCode::pauli_label(const IVec& s) const {
  IVec l(s.size());
  for (int J = 0; J < s.size(); ++J) {
    const long long d = dim_of(J);
    l[J] = ((s[J] % d) + d) % d;
  }
  return l;
}

GkpCode square_code(int d) { return GkpCode(Mat::Identity(2, 2), {d}, "square"); }

GkpCode square_code_multi(int modes, int d) {
  return GkpCode(Mat::Identity(2 * modes, 2 * modes), std::vector<int>(modes, d), "square");
}

GkpCode hexagonal_code() {
  Mat s(2, 2);
  s << std::pow(4.0 / 3.0, 0.25), -std::pow(12.0, -0.25), 0.0, std::pow(0.75, 0.25);
  return GkpCode(s, {2}, "hexagonal");
}

GkpCode rectangular_code(double alpha) {
  if (!(alpha > 0)) throw Error(Errc::domain, "rectangular_code: alpha must be positive");
  Mat s = Mat::Zero(2, 2);
  s(0, 0) = alpha;
  s(1, 1) = 1.0 / alpha;
  return GkpCode(s, {2}, "rectangular");
}

GkpCode repetition_code(int modes, double alpha) {
  if (modes < 2) throw Error(Errc::domain, "repetition_code: need at least two modes");
  if (!(alpha > 0)) throw Error(Errc::domain, "repetition_code: alpha must be positive");
  const int n = modes;
  const double r2 = std::sqrt(2.0);
  Mat sq = Mat::Zero(n, n), sp = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) sq(i, 0) = alpha;
  sp(0, 0) = 1.0 / alpha;
  for (int j = 1; j < n; ++j) {
    sq(j, j) = alpha * r2;
    sp(0, j) = -1.0 / (alpha * r2);
    sp(j, j) = 1.0 / (alpha * r2);
  }
  Mat s = Mat::Zero(2 * n, 2 * n);
  s.topLeftCorner(n, n) = sq;
  s.bottomRightCorner(n, n) = sp;
  std::vector<int> d(n, 1);
  d[0] = 2;
  return GkpCode(s, d, "repetition");
}

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

IMat round_integral(const Mat& a, double tol, const char* what) {
  IMat r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      r(i, j) = std::llround(a(i, j));
      if (std::abs(a(i, j) - static_cast<double>(r(i, j))) > tol) throw Error(Errc::invalid_lattice, what);
    }
  return r;
}

}  // namespace

StandardForm standard_form(const Mat& m, double tol) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) throw Error(Errc::dimension, "standard_form: need a 2n x 2n generator matrix");
  const int dim = static_cast<int>(m.rows());
  const int n = dim / 2;
  IMat a = round_integral(m * omega(n) * m.transpose(), tol, "standard_form: lattice is not symplectic-integral");
  IMat nm = IMat::Identity(dim, dim);

  // b_r <- b_r + c b_x, applied as a congruence on the symplectic Gram matrix.
  auto addrow = [&](int r, int x, long long c) {
    if (c == 0) return;
    nm.row(r) += c * nm.row(x);
    a.row(r) += c * a.row(x);
    a.col(r) += c * a.col(x);
  };

  std::vector<int> active(dim);
  std::iota(active.begin(), active.end(), 0);
  std::vector<std::pair<int, int>> pairs;
  std::vector<long long> gs;
  while (!active.empty()) {
    int p = -1, q = -1;
    long long best = 0;
    for (int i : active)
      for (int j : active)
        if (a(i, j) > 0 && (best == 0 || a(i, j) < best)) {
          best = a(i, j);
          p = i;
          q = j;
        }
    if (p < 0) throw Error(Errc::invalid_lattice, "standard_form: degenerate symplectic form (lattice not full rank)");
    bool changed = true;
    while (changed) {
      changed = false;
      const long long g = a(p, q);
      for (int r : active) {
        if (r == p || r == q) continue;
        if (a(p, r) % g != 0) {
          addrow(r, q, -floor_div(a(p, r), g));
          q = r;
          changed = true;
          break;
        }
        if (a(q, r) % g != 0) {
          addrow(r, p, floor_div(a(q, r), g));
          const int old_q = q;
          p = old_q;
          q = r;
          changed = true;
          break;
        }
      }
    }
    const long long g = a(p, q);
    for (int r : active) {
      if (r == p || r == q) continue;
      const long long c1 = a(r, q) / g;
      addrow(r, p, -c1);
      const long long c2 = a(r, p) / g;
      addrow(r, q, c2);
    }
    pairs.emplace_back(p, q);
    gs.push_back(g);
    active.erase(std::remove_if(active.begin(), active.end(), [&](int x) { return x == p || x == q; }), active.end());
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return gs[x] > gs[y]; });

  StandardForm out;
  out.sigma = Mat(dim, dim);
  out.dims.resize(n);
  out.unimodular = IMat(dim, dim);
  for (int j = 0; j < n; ++j) {
    const auto [p, q] = pairs[order[j]];
    const long long g = gs[order[j]];
    out.dims[j] = static_cast<int>(g);
    out.unimodular.row(j) = nm.row(p);
    out.unimodular.row(j + n) = nm.row(q);
  }
  const Mat mp = out.unimodular.cast<double>() * m;
  for (int J = 0; J < dim; ++J) out.sigma.col(J) = mp.row(J).transpose() / std::sqrt(static_cast<double>(out.dims[J % n]));
  if (!check_symplectic(out.sigma, 1e-9)) throw Error(Errc::invalid_lattice, "standard_form: reduction did not produce a symplectic Sigma");
  return out;
}

bool same_lattice(const Mat& a, const Mat& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  auto integral = [tol](const Mat& c) {
    return (c - c.array().round().matrix()).cwiseAbs().maxCoeff() <= tol;
  };
  return integral(a * b.inverse()) && integral(b * a.inverse());
}

// ---------------------------------------------------------------------------
// Cells

namespace {

bool in_box(const std::vector<Interval>& box, const Vec& v) {
  for (size_t i = 0; i < box.size(); ++i)
    if (!(v[i] > box[i].lo && v[i] <= box[i].hi)) return false;
  return true;
}

bool lex_less(const IVec& a, const IVec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

// Odometer over [-r, r]^dim.
template <class F>
void for_each_window(int dim, int r, F&& f) {
  IVec s = IVec::Constant(dim, -r);
  while (true) {
    f(s);
    int i = 0;
    while (i < dim && s[i] == r) s[i++] = -r;
    if (i == dim) break;
    ++s[i];
  }
}

IVec round_vec(const Vec& c) {
  IVec s(c.size());
  for (int i = 0; i < c.size(); ++i) s[i] = std::llround(c[i]);
  return s;
}

double box_distance(const std::vector<Interval>& box, const Vec& p) {
  double d2 = 0;
  for (size_t i = 0; i < box.size(); ++i) {
    const double x = std::clamp(p[i], box[i].lo, box[i].hi);
    d2 += (p[i] - x) * (p[i] - x);
  }
  return std::sqrt(d2);
}

bool boxes_overlap(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (std::min(a[i].hi, b[i].hi) <= std::max(a[i].lo, b[i].lo)) return false;
  return true;
}

std::vector<Interval> intersect(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<Interval> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = {std::max(a[i].lo, b[i].lo), std::min(a[i].hi, b[i].hi)};
  return r;
}

std::vector<std::vector<Interval>> subtract(std::vector<Interval> b, const std::vector<Interval>& r) {
  if (!boxes_overlap(b, r)) return {b};
  std::vector<std::vector<Interval>> out;
  for (size_t i = 0; i < b.size(); ++i) {
    if (b[i].lo < r[i].lo) {
      auto piece = b;
      piece[i].hi = r[i].lo;
      out.push_back(piece);
      b[i].lo = r[i].lo;
    }
    if (b[i].hi > r[i].hi) {
      auto piece = b;
      piece[i].lo = r[i].hi;
      out.push_back(piece);
      b[i].hi = r[i].hi;
    }
  }
  return out;
}

}  // namespace

std::vector<IVec> voronoi_relevant(const GkpCode& code, int radius) {
  const int dim = code.dim();
  struct Entry {
    double norm2;
    IVec s;
  };
  std::map<std::vector<int>, std::vector<Entry>> cosets;
  for_each_window(dim, radius, [&](const IVec& s) {
    if (s.isZero()) return;
    std::vector<int> key(dim);
    for (int i = 0; i < dim; ++i) key[i] = static_cast<int>(((s[i] % 2) + 2) % 2);
    cosets[key].push_back({code.embed(s).squaredNorm(), s});
  });
  std::vector<IVec> rel;
  for (auto& [key, entries] : cosets) {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) mn = std::min(mn, e.norm2);
    std::vector<IVec> mins;
    for (const auto& e : entries)
      if (e.norm2 <= mn * (1 + 1e-10)) mins.push_back(e.s);
    if (mins.size() == 2) {
      rel.push_back(mins[0]);
      rel.push_back(mins[1]);
    }
  }
  std::sort(rel.begin(), rel.end(), [&](const IVec& x, const IVec& y) {
    const double nx = code.embed(x).squaredNorm(), ny = code.embed(y).squaredNorm();
    if (std::abs(nx - ny) > 1e-12 * (nx + ny)) return nx < ny;
    return lex_less(x, y);
  });
  return rel;
}

struct PrimitiveCell::Impl {
  CellKind kind;
  GkpCode code;
  std::vector<Interval> intervals;
  bool diagonal_fast = false;
  int radius = 3;
  std::vector<IVec> relevant;
  std::vector<Vec> relevant_vecs;
  std::shared_ptr<const PrimitiveCell> base;
  std::vector<Region> regions;
};

PrimitiveCell PrimitiveCell::box(const GkpCode& code, std::vector<Interval> intervals) {
  if (static_cast<int>(intervals.size()) != code.dim()) throw Error(Errc::dimension, "box cell: need 2n intervals");
  auto impl = std::make_shared<Impl>();
  impl->kind = CellKind::box;
  impl->code = code;
  for (const auto& iv : intervals)
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.hi > iv.lo))
      throw Error(Errc::domain, "box cell: intervals must be finite and nonempty");
  impl->intervals = std::move(intervals);
  const Mat& mb = code.dual_basis();
  const Mat off = mb - Mat(mb.diagonal().asDiagonal());
  bool diag = off.cwiseAbs().maxCoeff() <= 1e-14 * mb.cwiseAbs().maxCoeff();
  for (int i = 0; diag && i < code.dim(); ++i) {
    const double w = impl->intervals[i].hi - impl->intervals[i].lo;
    if (std::abs(w - std::abs(mb(i, i))) > 1e-12 * w) diag = false;
  }
  impl->diagonal_fast = diag;
  PrimitiveCell c;
  c.impl_ = impl;
  return c;
}

PrimitiveCell PrimitiveCell::centered_box(const GkpCode& code) {
  const Mat& mb = code.dual_basis();
  std::vector<Interval> iv(code.dim());
  for (int i = 0; i < code.dim(); ++i) {
    const double a = std::abs(mb(i, i));
    iv[i] = {-a / 2, a / 2};
  }
  PrimitiveCell c = box(code, iv);
  if (!c.impl_->diagonal_fast) throw Error(Errc::unsupported, "centered_box: dual basis is not diagonal");
  return c;
}

PrimitiveCell PrimitiveCell::voronoi(const GkpCode& code, int radius) {
  auto impl = std::make_shared<Impl>();
  impl->kind = CellKind::voronoi;
  impl->code = code;
  impl->radius = radius;
  impl->relevant = voronoi_relevant(code, radius);
  for (const auto& s : impl->relevant) impl->relevant_vecs.push_back(code.embed(s));
  PrimitiveCell c;
  c.impl_ = impl;
  return c;
}

PrimitiveCell PrimitiveCell::shifted_union(const PrimitiveCell& base, std::vector<Region> regions) {
  auto impl = std::make_shared<Impl>();
  impl->kind = CellKind::shifted_union;
  impl->code = base.code();
  impl->base = std::make_shared<const PrimitiveCell>(base);
  for (const auto& r : regions)
    if (static_cast<int>(r.box.size()) != base.dim() || r.shift.size() != base.dim())
      throw Error(Errc::dimension, "shifted_union: region dimension mismatch");
  impl->regions = std::move(regions);
  PrimitiveCell c;
  c.impl_ = impl;
  return c;
}

CellKind PrimitiveCell::kind() const { return impl_->kind; }
const GkpCode& PrimitiveCell::code() const { return impl_->code; }
const std::vector<Interval>& PrimitiveCell::intervals() const { return impl_->intervals; }
const std::vector<IVec>& PrimitiveCell::relevant() const { return impl_->relevant; }
const PrimitiveCell& PrimitiveCell::base() const { return *impl_->base; }
const std::vector<Region>& PrimitiveCell::regions() const { return impl_->regions; }
int PrimitiveCell::radius() const { return impl_->radius; }

Remainder PrimitiveCell::remainder(const Vec& v) const {
  const GkpCode& code = impl_->code;
  const int dim = code.dim();
  switch (impl_->kind) {
    case CellKind::box: {
      const auto& iv = impl_->intervals;
      if (impl_->diagonal_fast) {
        const Mat& mb = code.dual_basis();
        IVec s(dim);
        Vec r(dim);
        for (int i = 0; i < dim; ++i) {
          const double a = mb(i, i);
          const double aa = std::abs(a);
          long long k = static_cast<long long>(std::ceil((v[i] - iv[i].hi) / aa));
          double x = v[i] - k * aa;
          if (x > iv[i].hi) { ++k; x -= aa; }
          if (x <= iv[i].lo) { --k; x += aa; }
          s[i] = a > 0 ? k : -k;
          r[i] = x;
        }
        return {r, s};
      }
      Vec center(dim);
      for (int i = 0; i < dim; ++i) center[i] = 0.5 * (iv[i].lo + iv[i].hi);
      const IVec c = round_vec(code.coords(v - center));
      for (int r = 0; r <= 3; ++r) {
        bool found = false;
        Remainder out;
        for_each_window(dim, r, [&](const IVec& d) {
          if (found || d.cwiseAbs().maxCoeff() != r) return;
          const IVec s = c + d;
          const Vec rem = v - code.embed(s);
          if (in_box(iv, rem)) {
            found = true;
            out = {rem, s};
          }
        });
        if (found) return out;
      }
      throw Error(Errc::tiling, "box cell is not a fundamental domain of the dual lattice");
    }
    case CellKind::voronoi: {
      IVec s = round_vec(code.coords(v));
      Vec r = v - code.embed(s);
      const auto& rel = impl_->relevant;
      const auto& rv = impl_->relevant_vecs;
      bool improved = true;
      while (improved) {
        improved = false;
        const double n0 = r.squaredNorm();
        for (size_t k = 0; k < rel.size(); ++k) {
          const double n1 = (r - rv[k]).squaredNorm();
          if (n1 < n0 - 1e-12 * (1 + n0)) {
            r -= rv[k];
            s += rel[k];
            improved = true;
            break;
          }
        }
      }
      // Collect all equidistant nearest points and keep the lexicographically smallest coefficient.
      const double n0 = r.squaredNorm();
      const double tol = 1e-12 * (1 + n0);
      std::vector<IVec> ties{s};
      std::deque<std::pair<Vec, IVec>> queue{{r, s}};
      while (!queue.empty()) {
        auto [rr, ss] = queue.front();
        queue.pop_front();
        for (size_t k = 0; k < rel.size(); ++k) {
          const Vec r2 = rr - rv[k];
          if (std::abs(r2.squaredNorm() - n0) > tol) continue;
          const IVec s2 = ss + rel[k];
          if (std::find(ties.begin(), ties.end(), s2) != ties.end()) continue;
          ties.push_back(s2);
          queue.emplace_back(r2, s2);
        }
      }
      IVec best = ties[0];
      for (const auto& t : ties)
        if (lex_less(t, best)) best = t;
      return {v - code.embed(best), best};
    }
    case CellKind::shifted_union: {
      Remainder r = impl_->base->remainder(v);
      for (const auto& reg : impl_->regions) {
        if (in_box(reg.box, r.rem)) {
          r.rem -= code.embed(reg.shift);
          r.s += reg.shift;
          break;
        }
      }
      return r;
    }
  }
  throw Error(Errc::unsupported, "remainder: unknown cell kind");
}

bool PrimitiveCell::contains(const Vec& v) const {
  switch (impl_->kind) {
    case CellKind::box:
      return in_box(impl_->intervals, v);
    case CellKind::voronoi: {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& p : impl_->relevant_vecs) worst = std::max(worst, 2 * v.dot(p) - p.squaredNorm());
      const double tol = 1e-12 * (1 + v.squaredNorm());
      if (worst < -tol) return true;
      if (worst > tol) return false;
      return remainder(v).s.isZero();
    }
    case CellKind::shifted_union:
      return remainder(v).s.isZero();
  }
  return false;
}

std::vector<std::vector<Interval>> PrimitiveCell::box_pieces() const {
  switch (impl_->kind) {
    case CellKind::box:
      return {impl_->intervals};
    case CellKind::voronoi:
      throw Error(Errc::unsupported, "box_pieces: Voronoi cells are not unions of boxes");
    case CellKind::shifted_union: {
      const GkpCode& code = impl_->code;
      std::vector<std::vector<Interval>> out;
      for (const auto& b : impl_->base->box_pieces()) {
        std::vector<std::vector<Interval>> rest{b};
        for (const auto& reg : impl_->regions) {
          std::vector<std::vector<Interval>> next;
          const Vec shift = code.embed(reg.shift);
          for (const auto& piece : rest) {
            if (boxes_overlap(piece, reg.box)) {
              auto moved = intersect(piece, reg.box);
              for (size_t i = 0; i < moved.size(); ++i) {
                moved[i].lo -= shift[i];
                moved[i].hi -= shift[i];
              }
              out.push_back(moved);
            }
            for (auto& p : subtract(piece, reg.box)) next.push_back(std::move(p));
          }
          rest = std::move(next);
        }
        for (auto& p : rest) out.push_back(std::move(p));
      }
      return out;
    }
  }
  return {};
}

std::vector<Interval> PrimitiveCell::bounding_box() const {
  const int dim = this->dim();
  if (impl_->kind != CellKind::voronoi) {
    std::vector<Interval> bb(dim, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (const auto& p : box_pieces())
      for (int i = 0; i < dim; ++i) {
        bb[i].lo = std::min(bb[i].lo, p[i].lo);
        bb[i].hi = std::max(bb[i].hi, p[i].hi);
      }
    return bb;
  }
  const auto& rv = impl_->relevant_vecs;
  if (dim <= 4) {
    // Exact: vertices are intersections of dim facet hyperplanes x.p = |p|^2/2.
    std::vector<Interval> bb(dim, {0.0, 0.0});
    const int nf = static_cast<int>(rv.size());
    std::vector<int> idx(dim);
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (depth == dim) {
        Mat a(dim, dim);
        Vec b(dim);
        for (int i = 0; i < dim; ++i) {
          a.row(i) = rv[idx[i]].transpose();
          b[i] = 0.5 * rv[idx[i]].squaredNorm();
        }
        Eigen::FullPivLU<Mat> lu(a);
        if (lu.rank() < dim) return;
        const Vec x = lu.solve(b);
        for (const auto& p : rv)
          if (x.dot(p) > 0.5 * p.squaredNorm() * (1 + 1e-9) + 1e-12) return;
        for (int i = 0; i < dim; ++i) {
          bb[i].lo = std::min(bb[i].lo, x[i]);
          bb[i].hi = std::max(bb[i].hi, x[i]);
        }
        return;
      }
      for (int k = start; k < nf; ++k) {
        idx[depth] = k;
        rec(k + 1, depth + 1);
      }
    };
    rec(0, 0);
    return bb;
  }
  // Covering-radius bound from Babai rounding.
  const double mu = 0.5 * std::sqrt(impl_->code.dual_basis().squaredNorm());
  return std::vector<Interval>(dim, {-mu, mu});
}

// ---------------------------------------------------------------------------
// Logical classes and distances

LogicalClass LogicalClass::x(int n, int j) {
  IVec l = IVec::Zero(2 * n);
  l[j] = 1;
  return pauli(l);
}

LogicalClass LogicalClass::z(int n, int j) {
  IVec l = IVec::Zero(2 * n);
  l[j + n] = 1;
  return pauli(l);
}

LogicalClass LogicalClass::y(int n, int j) {
  IVec l = IVec::Zero(2 * n);
  l[j] = 1;
  l[j + n] = 1;
  return pauli(l);
}

bool LogicalClass::matches(const GkpCode& code, const IVec& s) const {
  const IVec l = code.pauli_label(s);
  switch (kind) {
    case Kind::any:
      return !l.isZero();
    case Kind::identity:
      return l.isZero();
    case Kind::label:
      return l == code.pauli_label(label);
  }
  return false;
}

double shortest_error_length(const PrimitiveCell& cell, const LogicalClass& which, int radius) {
  const GkpCode& code = cell.code();
  double best = std::numeric_limits<double>::infinity();
  if (cell.kind() == CellKind::voronoi) {
    const auto rel = radius == cell.radius() ? cell.relevant() : voronoi_relevant(code, radius);
    for (const auto& s : rel)
      if (which.matches(code, s)) best = std::min(best, 0.5 * code.embed(s).norm());
    return best;
  }
  const auto pieces = cell.box_pieces();
  for (const auto& p : pieces)
    for (const auto& iv : p)
      if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi))) throw Error(Errc::domain, "shortest_error_length: unbounded cell");
  // The region decoded with coefficient s is P + lbar(s); its distance from the origin is dist(-lbar(s), P).
  for_each_window(code.dim(), radius, [&](const IVec& s) {
    if (s.isZero() || !which.matches(code, s)) return;
    const Vec p = -code.embed(s);
    for (const auto& piece : pieces) best = std::min(best, box_distance(piece, p));
  });
  return best;
}

double sample_cell_exit_fraction(const Mat& s, const PrimitiveCell& cell, int samples, unsigned seed) {
  const auto bb = cell.bounding_box();
  std::mt19937_64 rng(seed);
  const int dim = cell.dim();
  int accepted = 0, exits = 0, tries = 0;
  Vec x(dim);
  while (accepted < samples && tries < 200 * samples) {
    ++tries;
    for (int i = 0; i < dim; ++i) x[i] = std::uniform_real_distribution<double>(bb[i].lo, bb[i].hi)(rng);
    if (!cell.contains(x)) continue;
    ++accepted;
    if (!cell.contains(s * x)) ++exits;
  }
  return accepted == 0 ? 0.0 : static_cast<double>(exits) / accepted;
}

bool is_cell_invariant(const Mat& s, const PrimitiveCell& cell, int samples, unsigned seed) {
  if (!check_symplectic(s, 1e-9)) throw Error(Errc::domain, "is_cell_invariant: S is not symplectic");
  const int dim = cell.dim();
  if (cell.kind() == CellKind::voronoi) {
    // V = {x : x.h <= 1} over normalized facet normals h = 2p/|p|^2; S V = V iff S^-T permutes them.
    std::vector<Vec> hs;
    for (const auto& c : cell.relevant()) {
      const Vec p = cell.code().embed(c);
      hs.push_back(2 * p / p.squaredNorm());
    }
    const Mat sit = s.inverse().transpose();
    for (const auto& h : hs) {
      const Vec g = sit * h;
      bool hit = false;
      for (const auto& h2 : hs)
        if ((g - h2).norm() <= 1e-9 * (1 + h2.norm())) {
          hit = true;
          break;
        }
      if (!hit) return false;
    }
    return true;
  }
  if (cell.kind() == CellKind::box) {
    const auto& iv = cell.intervals();
    std::vector<Vec> verts;
    for (int mask = 0; mask < (1 << dim); ++mask) {
      Vec v(dim);
      for (int i = 0; i < dim; ++i) v[i] = (mask >> i & 1) ? iv[i].hi : iv[i].lo;
      verts.push_back(v);
    }
    for (const auto& v : verts) {
      const Vec w = s * v;
      bool hit = false;
      for (const auto& u : verts)
        if ((w - u).norm() <= 1e-9 * (1 + u.norm())) {
          hit = true;
          break;
        }
      if (!hit) return false;
    }
    return true;
  }
  return sample_cell_exit_fraction(s, cell, samples, seed) == 0.0 &&
         sample_cell_exit_fraction(s.inverse(), cell, samples, seed + 1) == 0.0;
}

// ---------------------------------------------------------------------------
// Repetition-code cells

namespace {

void check_rep3(const GkpCode& code) {
  if (code.modes() != 3 || code.dims() != std::vector<int>{2, 1, 1})
    throw Error(Errc::domain, "repetition cells need the three-mode repetition code");
}

}  // namespace

PrimitiveCell repetition_concatenated_cell(const GkpCode& rep3) {
  check_rep3(rep3);
  const Mat& mb = rep3.dual_basis();
  const double a = mb(0, 0);  // per-mode rectangular spacing alpha/sqrt(2)
  const double b = mb(3, 3);  // momentum spacing 1/(sqrt(2) alpha)
  const Interval c0{-a / 2, a / 2}, c1{-a / 2, 3 * a / 2}, up{a / 2, 3 * a / 2}, pb{-b / 2, b / 2};
  PrimitiveCell base = PrimitiveCell::box(rep3, {c1, c1, c0, pb, pb, pb});
  // The (1,1,0) cube carries the same syndrome as (0,0,1); move it there.
  Vec shift = Vec::Zero(6);
  shift << a, a, -a, 0, 0, 0;
  return PrimitiveCell::shifted_union(base, {Region{{up, up, c0, pb, pb, pb}, rep3.dual_coeffs(shift)}});
}

PrimitiveCell repetition_symmetric_cell(const GkpCode& rep3) {
  PrimitiveCell concat = repetition_concatenated_cell(rep3);
  const Mat& mb = rep3.dual_basis();
  const double a = mb(0, 0);
  const double b = mb(3, 3);
  const Interval c0{-a / 2, a / 2}, outer{a, 3 * a / 2}, pb{-b / 2, b / 2};
  std::vector<Region> regions;
  for (int j = 0; j < 3; ++j) {
    std::vector<Interval> box{c0, c0, c0, pb, pb, pb};
    box[j] = outer;
    Vec shift = Vec::Zero(6);
    shift[j] = 2 * a;
    regions.push_back({box, rep3.dual_coeffs(shift)});
  }
  return PrimitiveCell::shifted_union(concat, regions);
}

// ---------------------------------------------------------------------------
// Clifford data

IMat clifford_n_hadamard() {
  IMat n(2, 2);
  n << 0, -1, 1, 0;
  return n;
}

IMat clifford_n_phase() {
  IMat n(2, 2);
  n << 1, 0, 1, 1;
  return n;
}

IMat clifford_n_permutation() {
  IMat n(2, 2);
  n << 1, -1, 1, 0;
  return n;
}

IMat clifford_n_cz() {
  IMat n(4, 4);
  n << 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 1, 0, 0, 1;
  return n;
}

IMat clifford_n_cnot() {
  IMat n(4, 4);
  n << 1, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 1;
  return n;
}

Mat logical_symplectic(const GkpCode& code, const IMat& n_a) {
  if (n_a.rows() != code.dim() || n_a.cols() != code.dim()) throw Error(Errc::dimension, "logical_symplectic: size mismatch");
  const Mat n = n_a.cast<double>();
  if (!check_symplectic(n, 1e-12)) throw Error(Errc::domain, "logical_symplectic: N_A is not symplectic");
  return code.sigma() * n * code.sigma().inverse();
}

}  // namespace gkp
