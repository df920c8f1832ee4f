#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gkp/lattice.hpp"
#include "gkp/types.hpp"

namespace gkp {

// Stabilizer states |mu, k> = W(k)|mu-bar> with W(v) the displacement by sqrt(2 pi) v.
// Logical labels are flattened mixed-radix with mode 0 most significant.

struct ZakPeak {
  long long s = 0;
  double x = 0;  // position sqrt(2 pi)(k1 + a s)
  cplx amp;      // (2 pi a^2)^{1/4} e^{i pi k1 k2} e^{2 i pi a k2 s}
};

// Position-space comb of the single-mode Zak state |k1, k2>_a, |s| <= window.
std::vector<ZakPeak> zak_position_amplitudes(double k1, double k2, double a, int window);

// G = (Sigma, d, P). Built from a lattice cell and then transformed by Gaussian
// maps, unfolding or folding; each step keeps an exact remainder map.
class DecompositionParams {
 public:
  explicit DecompositionParams(const PrimitiveCell& cell);

  const GkpCode& code() const;
  const Mat& sigma() const { return code().sigma(); }
  const std::vector<int>& dims() const { return code().dims(); }
  int modes() const { return code().modes(); }
  int logical_dim() const { return code().logical_dim(); }

  // v = sum_J s_J mbar_J + rem with rem in the cell.
  Remainder remainder(const Vec& v) const;
  bool contains(const Vec& v) const;
  // Axis-aligned box containing the cell closure (exact for box cells).
  std::vector<Interval> bounding_box() const;

  DecompositionParams transformed(const Mat& s) const;
  DecompositionParams unfolded(int j) const;
  // Inverse of unfolded(j) when this is an unfolding of mode j with d levels;
  // otherwise slices the cell into d slabs along mbar_j and checks the tiling.
  DecompositionParams folded(int j, int d) const;

  // Same (Sigma, d) and the same remainder map on a probe set.
  bool equivalent(const DecompositionParams& other, double tol = 1e-9) const;

  // Quadrature nodes covering the cell. Exact tensor Gauss-Legendre rules on box
  // pieces; Voronoi cells fall back to a masked rule over the bounding box.
  struct Node {
    Vec k;
    double w;
  };
  std::vector<Node> grid(int nodes) const;

  struct Impl;

 private:
  explicit DecompositionParams(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct SubsystemPoint {
  Vec k;
  double weight = 1.0;  // quadrature weight; 1 for a discrete product term
  CVec amp;             // index e * logical_dim + mu, e an optional external register
};

// Amplitudes are densities against d^{2n}k: a sampled state is
// sum_points weight * sum_mu amp_mu |mu> (x) |k>.
struct SubsystemKet {
  DecompositionParams params;
  int ext_dim = 1;
  std::vector<SubsystemPoint> points;

  explicit SubsystemKet(DecompositionParams p, int ext = 1) : params(std::move(p)), ext_dim(ext) {}
  int amp_size() const { return ext_dim * params.logical_dim(); }
  double norm2() const;
};

int mu_index(const std::vector<int>& dims, const IVec& mu);
IVec mu_label(const std::vector<int>& dims, int index);

// |psi> (x) |k> with k mapped into the cell by the boundary conditions.
SubsystemKet product_state(const DecompositionParams& params, const CVec& psi, const Vec& k, int ext_dim = 1);

// a_1 |phi_1> + a_2 |phi_2> + ..., merging points whose k agree to tol.
SubsystemKet superpose(const std::vector<std::pair<cplx, SubsystemKet>>& terms, double tol = 1e-10);

// e^{2 i pi k^T Omega m_J}.
cplx stabilizer_eigenvalue(const DecompositionParams& params, const Vec& k, int J);

using Wavefunction = std::function<cplx(const Vec& x)>;

struct DecomposeOptions {
  int window = 12;
  double tail_tol = 1e-10;  // relative to the largest amplitude
};

struct Decomposition {
  SubsystemKet ket;
  double tail_bound = 0;  // largest comb contribution from the outermost shell
};

// <mu, k|phi> on the nodes. psi evaluates <x|U_Sigma^{-1}|phi> (psi itself for Sigma = I).
Decomposition decompose_wavefunction(const Wavefunction& psi, const DecompositionParams& params,
                                     const std::vector<DecompositionParams::Node>& nodes,
                                     const DecomposeOptions& opt = {});

// Position eigenstate |x>_q of a single-mode Sigma = I decomposition with a box cell.
// The result carries an implicit delta(k_q - k_x); nodes sample the momentum side.
SubsystemKet position_eigenstate(const DecompositionParams& params, double x, int nodes);

// Moves every point into new_params' cell: k = lbar + k', mu -> P_d(s) mu, phase e^{i pi k'^T Omega lbar}.
SubsystemKet cell_transform(const SubsystemKet& state, const DecompositionParams& new_params);

// U_S: params -> S params, k -> S k, amplitudes unchanged.
SubsystemKet gaussian_transform(const SubsystemKet& state, const Mat& s);

SubsystemKet unfold(const SubsystemKet& state, int j);
SubsystemKet fold(const SubsystemKet& state, int j, int d, double merge_tol = 1e-10);

// W(v) followed by the boundary conditions of the current cell.
SubsystemKet displace(const SubsystemKet& state, const Vec& v);

// Logical unitary A with A P_d(s) A^dag = P_d(N_A s); the phase makes the largest
// entry of the first column real positive.
CMat clifford_unitary(const std::vector<int>& dims, const IMat& n_a);

// A-bar = U_{S_A}, S_A = Sigma N_A Sigma^-1, then back into the original cell.
SubsystemKet apply_clifford(const SubsystemKet& state, const IMat& n_a);

using KetMixture = std::vector<std::pair<double, SubsystemKet>>;

// Trace over the stabilizer subsystem; the external register (if any) is kept.
CMat partial_trace(const SubsystemKet& state);
CMat partial_trace(const KetMixture& mixture);

enum class PauliAxis { x, y, z };
std::string to_string(PauliAxis p);

// +1 iff {k^T Omega mbar_P}_1 lies in (-1/4, 1/4]; mbar_P = mbar_1, mbar_1 + mbar_2, mbar_2.
int binned_pauli_action(PauliAxis p, const DecompositionParams& params, const Vec& k);

// Tomography with binned Pauli measurements on the code mode, identity on the external register.
CMat binned_lst_decode(const SubsystemKet& state);
CMat binned_lst_decode(const KetMixture& mixture);

namespace wavefunctions {

Wavefunction vacuum();
// Squeezed vacuum with position variance e^{-2r}/2.
Wavefunction squeezed_vacuum(double r);
Wavefunction position_gaussian(double x0, double width);
// e^{-Delta^2 n} sum_s |sqrt(pi)(2s + mu)>_q (unnormalized), via the Mehler kernel.
Wavefunction approximate_codeword(int mu, double delta, int window = 30);

struct Sampled {
  std::vector<double> x;
  std::vector<cplx> y;
};
// Whitespace or comma separated rows "x re im"; '#' starts a comment.
Sampled parse_sampled(const std::string& text);
// Cubic Hermite interpolation, zero outside the table.
Wavefunction interpolated(Sampled table);

}  // namespace wavefunctions

}  // namespace gkp
