#pragma once

#include <array>
#include <vector>

#include "gkp/fock.hpp"
#include "gkp/types.hpp"

namespace gkp {

// Cross-check of the characteristic-function pipeline against the Fock oracle for
// loss after the envelope on the square qubit code.

struct OracleOptions {
  int cutoff = 200;
  int j_max = 40;
  int s_max = 2;
  DecodeOptions decode;
};

struct OracleResult {
  double delta_db = 0;
  double gamma = 0;
  std::array<double, 6> trace_distance{};  // inputs |0>, |1>, |+>, |->, |+i>, |-i>
  double max_trace_distance = 0;
  double grid_change = 0;
};

std::array<CMat, 6> pauli_eigenstates();

OracleResult oracle_loss_check(double delta_db, double gamma, const OracleOptions& opt = {});

}  // namespace gkp
