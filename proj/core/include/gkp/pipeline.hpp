#pragma once

#include <string>

#include "gkp/charfun.hpp"
#include "gkp/lattice.hpp"
#include "gkp/logical_channel.hpp"
#include "gkp/metrics.hpp"

namespace gkp {

enum class NoiseFamily { envelope, loss, displacement, dephasing };

NoiseFamily parse_noise_family(const std::string& name);
std::string to_string(NoiseFamily f);

// Envelope followed by the family's noise. param: loss gamma, displacement variance sigma^2,
// dephasing variance sigma^2; ignored for the envelope family.
ChannelCharFn noisy_envelope_channel(NoiseFamily family, double delta, double param, int quadrature_nodes = 64);

struct PointSpec {
  NoiseFamily family = NoiseFamily::envelope;
  double delta_db = 10;
  double param = 0;
  int s_max = 1;
  int quadrature_nodes = 64;
  bool residual = true;  // also evaluate at s_max + 1
};

struct PointResult {
  double delta_db = 0;
  double nbar_est = 0;
  double noise_param = 0;
  long double infidelity = 0;
  double tp_defect = 0;
  double min_choi_eig = 0;
  long double smax_residual = 0;  // |infidelity(s_max + 1) - infidelity(s_max)|
  bool baseline = false;
  LogicalSuperop channel;  // orthonormalized logical channel
};

// Orthonormalized logical channel of the square qubit code over its centered square cell.
LogicalSuperop square_logical_channel(const ChannelCharFn& channel, int s_max, int threads = 1);

PointResult evaluate_point(const PointSpec& spec);

// Trivial Fock encoding under the same physical noise (loss or dephasing).
PointResult baseline_point(NoiseFamily family, double param);

double nbar_estimate(double delta);

}  // namespace gkp
