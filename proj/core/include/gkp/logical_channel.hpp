#pragma once

#include <map>
#include <utility>
#include <vector>

#include "gkp/charfun.hpp"
#include "gkp/lattice.hpp"
#include "gkp/types.hpp"

namespace gkp {

// Pauli basis sigma_r = P_d(r), r in [0, d_J) for J = 0..2n-1, indexed in mixed radix with J = 0 most significant.
int pauli_count(const std::vector<int>& dims);
IVec pauli_label(const std::vector<int>& dims, int index);
int pauli_index(const std::vector<int>& dims, const IVec& s);  // reduces s mod d
// P_d(s) = pauli_phase(s) * sigma_{s mod d}.
cplxl pauli_phase(const std::vector<int>& dims, const IVec& s);
// exp(i pi s_j s_{j+n} / d_j) X^{s_j} Z^{s_{j+n}} tensored over modes, mode 0 leftmost.
CMat pauli_matrix(const std::vector<int>& dims, const IVec& s);

struct TruncationSpec {
  int s_max = 1;
};

// N_L(rho) = sum_{s,t} c_{s,t} P_d(s) rho P_d(t)^dag.
class LogicalSuperop {
 public:
  using Key = std::pair<std::vector<long long>, std::vector<long long>>;

  LogicalSuperop() = default;
  LogicalSuperop(std::vector<int> dims, int s_max);
  // Canonical-label coefficients c_{a,b} = chi_ab.
  static LogicalSuperop from_chi(const std::vector<int>& dims, const CMatL& chi);

  const std::vector<int>& dims() const { return dims_; }
  int modes() const { return static_cast<int>(dims_.size()); }
  int logical_dim() const;
  int s_max() const { return s_max_; }

  void add(const IVec& s, const IVec& t, cplxl value);
  cplxl coeff(const IVec& s, const IVec& t) const;
  const std::map<Key, cplxl>& coefficients() const { return coeffs_; }

  // Process matrix in the sigma basis: N(rho) = sum_ab chi_ab sigma_a rho sigma_b^dag.
  CMatL chi() const;
  // d^2 x d^2 matrix acting on column-stacked vec(rho).
  CMat superoperator() const;
  CMat apply(const CMat& rho) const;

  // Largest quadrature error estimate over numerically integrated coefficients (0 when all analytic).
  double integration_error = 0.0;
  bool converged = true;

 private:
  std::vector<int> dims_;
  int s_max_ = 0;
  std::map<Key, cplxl> coeffs_;
};

// Integrand of c_{s,t}(v, v) as amp * exp(-v^T A v + beta^T v + gamma0).
struct DiagonalForm {
  cplx amp;
  CMat A;
  CVec beta;
  cplx gamma0;
  bool zero = false;  // delta kernels off the diagonal s != t
};

DiagonalForm diagonal_form(const GaussianKernel& kernel, const GkpCode& code, const IVec& s, const IVec& t);

// Exact integral over a box or shifted-union cell; the diagonal form must have diagonal A.
cplxl box_cell_integral(const GaussianKernel& kernel, const PrimitiveCell& cell, const IVec& s, const IVec& t);

struct NumericOptions {
  int nodes = 24;       // initial Gauss-Legendre nodes per direction
  int max_nodes = 384;  // doubling stops here
  double rel_tol = 1e-12;
};

struct CellIntegral {
  cplxl value{0.0L, 0.0L};
  double error = 0.0;
  bool converged = true;
};

CellIntegral numeric_cell_integral(const GaussianKernel& kernel, const PrimitiveCell& cell, const IVec& s,
                                   const IVec& t, const NumericOptions& opt = {});

struct LogicalChannelOptions {
  double decay_threshold = 1e-30;
  bool force_numeric = false;
  int threads = 1;
  NumericOptions numeric;
};

LogicalSuperop logical_channel(const GkpCode& code, const PrimitiveCell& cell, const ChannelCharFn& channel,
                               TruncationSpec trunc = {}, const LogicalChannelOptions& opt = {});

}  // namespace gkp
