#pragma once

#include "gkp/lattice.hpp"
#include "gkp/types.hpp"

namespace gkp {

// Truncated Fock-space reference simulator for the single-mode square qubit code.

struct FockState {
  CVec amp;
  double tail_mass = 0;  // weight in the top tenth of the levels before normalization
};

struct FockDensity {
  CMat rho;
  double residual = 0;  // trace lost to truncation
};

// c_n ∝ e^{-Delta^2 n} sum_s psi_n(sqrt(pi)(2s + mu)), normalized.
FockState build_approx_codeword(int mu, double delta, int cutoff, double tail_tol = 1e-12);

// Normalized, then Lowdin-orthonormalized, approximate codewords as the columns of a cutoff x 2 matrix.
CMat orthonormal_codewords(double delta, int cutoff, double tail_tol = 1e-12);

double mean_photon_number(const CVec& psi);

// Kraus sum up to j_max lost photons.
FockDensity apply_loss(const CMat& rho, double gamma, int j_max = 40, double tol = 1e-10);
// Gaussian random rotation e^{-i phi n} with phi ~ N(0, sigma^2), Gauss-Hermite in phi.
FockDensity apply_dephasing(const CMat& rho, double sigma, int nodes = 64);

// <mu, k|n> for the square code; the cutoff variant returns all levels n < cutoff as rows mu.
cplx zak_fock_overlap(int mu, const Vec& k, const GkpCode& code, int n);
CMat zak_fock_overlaps(const Vec& k, const GkpCode& code, int cutoff);

struct DecodeOptions {
  int nodes = 64;        // Gauss-Legendre nodes per axis per box piece
  int check_nodes = 48;  // self-convergence reference
  double check_tol = 1e-9;
  int threads = 0;
};

struct DecodedState {
  CMat rho;                   // unit trace
  double trace_defect = 0;    // relative trace change before normalization
  double grid_change = 0;     // max entry change against the reference grid
};

// Partial trace over the stabilizer subsystem by quadrature over the cell.
DecodedState ideal_decode(const CMat& rho, const PrimitiveCell& cell, const DecodeOptions& opt = {});

}  // namespace gkp
