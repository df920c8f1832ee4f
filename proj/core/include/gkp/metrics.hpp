#pragma once

#include "gkp/logical_channel.hpp"
#include "gkp/types.hpp"

namespace gkp {

// Lowdin orthonormalization data. C = c0 (I + delta) with delta small, so that
// channels with infidelities far below double precision keep their digits.
struct OrthoMatrix {
  CMatL gram;       // G_{mu nu} = tr N_L(|nu><mu|)
  long double c0 = 1;
  CMatL delta;
  CMatL C() const;  // c0 (I + delta)
  // Qubit parameters: N_mu, R = |G_01| / (N_0 N_1), phi = arg G_01, R_pm.
  long double n0 = 1, n1 = 1, r = 0, phi = 0, r_plus = 2, r_minus = 0;
};

struct LowdinResult {
  OrthoMatrix ortho;
  LogicalSuperop channel;  // N_L o J[C]
};

CMatL gram_matrix(const LogicalSuperop& e);
LowdinResult lowdin_orthonormalize(const LogicalSuperop& e);
// Uses an externally supplied Gram matrix (for example from the bare envelope channel).
LowdinResult lowdin_orthonormalize(const LogicalSuperop& e, const CMatL& gram);

// chi_00 of the process matrix.
long double entanglement_fidelity(const LogicalSuperop& e);
double average_gate_fidelity(const LogicalSuperop& e);
// (d / (d + 1)) * sum_{a != 0} chi_aa; equals 1 - F for trace-preserving channels.
long double average_gate_infidelity(const LogicalSuperop& e);

struct CptpDiagnostics {
  double tp_defect = 0;            // spectral norm of sum_ab chi_ab sigma_b^dag sigma_a - I
  double min_choi_eigenvalue = 0;  // of the unit-trace Choi state
};
CptpDiagnostics cptp_diagnostics(const LogicalSuperop& e);

// Trivial {|0>, |1>} Fock encodings.
LogicalSuperop fock_qubit_loss_baseline(double gamma);
LogicalSuperop fock_qubit_dephasing_baseline(double sigma);

struct BlochVector {
  double x = 0, y = 0, z = 0;
};
struct BlochResult {
  BlochVector r;
  bool inside_octahedron = true;
};
BlochResult bloch_and_octahedron(const CMat& rho);

// Trace distance between two density matrices.
double trace_distance(const CMat& a, const CMat& b);

}  // namespace gkp
