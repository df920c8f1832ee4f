#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gkp/types.hpp"

namespace gkp {

bool check_symplectic(const Mat& m, double tol = 1e-12);

// Stabilizer lattice generators m_J = sqrt(d_{J mod n}) * Sigma_J (column J),
// dual generators mbar_J = m_J / d_{J mod n}.
class GkpCode {
 public:
  GkpCode() = default;
  GkpCode(Mat sigma, std::vector<int> dims, std::string name = {});

  int modes() const { return static_cast<int>(dims_.size()); }
  int dim() const { return 2 * modes(); }
  const Mat& sigma() const { return sigma_; }
  const std::vector<int>& dims() const { return dims_; }
  const std::string& name() const { return name_; }
  int logical_dim() const;
  int dim_of(int J) const { return dims_[J % modes()]; }

  // Columns are m_J (resp. mbar_J).
  const Mat& stabilizer_basis() const { return m_; }
  const Mat& dual_basis() const { return mbar_; }

  Vec embed(const IVec& s) const { return mbar_ * s.cast<double>(); }
  // Real coordinates of v in the dual basis.
  Vec coords(const Vec& v) const { return mbar_inv_ * v; }
  // Integral dual coefficients of a dual-lattice vector; throws if not integral.
  IVec dual_coeffs(const Vec& v, double tol = 1e-9) const;

  // Logical Pauli label (s_J mod d_J) of a dual coefficient vector.
  IVec pauli_label(const IVec& s) const;

 private:
  Mat sigma_;
  std::vector<int> dims_;
  std::string name_;
  Mat m_, mbar_, mbar_inv_;
};

GkpCode square_code(int d = 2);
GkpCode square_code_multi(int modes, int d = 2);
GkpCode hexagonal_code();
GkpCode rectangular_code(double alpha);
GkpCode repetition_code(int modes, double alpha);

struct StandardForm {
  Mat sigma;
  std::vector<int> dims;
  IMat unimodular;  // N with rows of N*M forming the standard generators
};

// Rows of m are the stabilizer generators m_J^T.
StandardForm standard_form(const Mat& m, double tol = 1e-9);

// True iff every row of a is an integral combination of the rows of b and vice versa.
bool same_lattice(const Mat& a, const Mat& b, double tol = 1e-9);

struct Interval {
  double lo;
  double hi;  // half-open (lo, hi]
};

struct Remainder {
  Vec rem;
  IVec s;
};

struct Region {
  std::vector<Interval> box;
  IVec shift;  // dual coefficients subtracted from points inside the box
};

enum class CellKind { box, voronoi, shifted_union };

class PrimitiveCell {
 public:
  static PrimitiveCell box(const GkpCode& code, std::vector<Interval> intervals);
  // Symmetric box (-a_i/2, a_i/2] with a_i the diagonal of the dual basis; requires a diagonal dual basis.
  static PrimitiveCell centered_box(const GkpCode& code);
  static PrimitiveCell voronoi(const GkpCode& code, int radius = 3);
  static PrimitiveCell shifted_union(const PrimitiveCell& base, std::vector<Region> regions);

  CellKind kind() const;
  const GkpCode& code() const;
  int dim() const { return code().dim(); }

  Remainder remainder(const Vec& v) const;
  bool contains(const Vec& v) const;

  const std::vector<Interval>& intervals() const;  // box cells
  const std::vector<IVec>& relevant() const;       // voronoi cells (dual coefficients)
  const PrimitiveCell& base() const;               // shifted-union cells
  const std::vector<Region>& regions() const;      // shifted-union cells
  int radius() const;

  // Axis-aligned bounding box of the closure.
  std::vector<Interval> bounding_box() const;
  // Decomposition of the closure into axis-aligned boxes (box and shifted-union cells).
  std::vector<std::vector<Interval>> box_pieces() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Dual vectors J = 0..2n-1 in the relevant-vector set of a Voronoi cell, computed over +-radius.
std::vector<IVec> voronoi_relevant(const GkpCode& code, int radius);

struct LogicalClass {
  enum class Kind { any, identity, label } kind = Kind::any;
  IVec label;

  static LogicalClass any() { return {}; }
  static LogicalClass identity() { return {Kind::identity, {}}; }
  static LogicalClass pauli(const IVec& l) { return {Kind::label, l}; }
  // Single-qubit Paulis on mode j of an n-mode code (other entries zero).
  static LogicalClass x(int n, int j = 0);
  static LogicalClass z(int n, int j = 0);
  static LogicalClass y(int n, int j = 0);

  bool matches(const GkpCode& code, const IVec& s) const;
};

// Infinity when no boundary of the requested class exists.
double shortest_error_length(const PrimitiveCell& cell, const LogicalClass& which, int radius = 3);

bool is_cell_invariant(const Mat& s, const PrimitiveCell& cell, int samples = 2000, unsigned seed = 7);

// Fraction of sampled cell points x with S x outside the cell.
double sample_cell_exit_fraction(const Mat& s, const PrimitiveCell& cell, int samples, unsigned seed);

// Cells of the three-mode repetition code: concatenated decoder cell and its symmetrized version.
PrimitiveCell repetition_concatenated_cell(const GkpCode& rep3);
PrimitiveCell repetition_symmetric_cell(const GkpCode& rep3);

// Clifford symplectic data on Pauli labels.
IMat clifford_n_hadamard();
IMat clifford_n_phase();
IMat clifford_n_permutation();
IMat clifford_n_cz();
IMat clifford_n_cnot();
// S_A = Sigma N_A Sigma^-1.
Mat logical_symplectic(const GkpCode& code, const IMat& n_a);

}  // namespace gkp
