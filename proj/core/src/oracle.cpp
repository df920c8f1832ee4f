#include "gkp/oracle.hpp"

#include <algorithm>

#include "gkp/lattice.hpp"
#include "gkp/metrics.hpp"
#include "gkp/pipeline.hpp"

namespace gkp {

std::array<CMat, 6> pauli_eigenstates() {
  const double r = 1 / std::sqrt(2.0);
  const std::array<CVec, 6> kets = {
      (CVec(2) << 1, 0).finished(),           (CVec(2) << 0, 1).finished(),
      (CVec(2) << r, r).finished(),           (CVec(2) << r, -r).finished(),
      (CVec(2) << r, cplx(0, r)).finished(), (CVec(2) << r, cplx(0, -r)).finished()};
  std::array<CMat, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = kets[i] * kets[i].adjoint();
  return out;
}

OracleResult oracle_loss_check(double delta_db, double gamma, const OracleOptions& opt) {
  OracleResult out;
  out.delta_db = delta_db;
  out.gamma = gamma;

  PointSpec spec;
  spec.family = gamma > 0 ? NoiseFamily::loss : NoiseFamily::envelope;
  spec.delta_db = delta_db;
  spec.param = gamma;
  spec.s_max = opt.s_max;
  spec.residual = false;
  const LogicalSuperop pipeline = evaluate_point(spec).channel;

  const double delta = delta_from_db(delta_db);
  const CMat w = orthonormal_codewords(delta, opt.cutoff);
  const PrimitiveCell cell = PrimitiveCell::centered_box(square_code());
  const auto inputs = pauli_eigenstates();
  for (int i = 0; i < 6; ++i) {
    const CMat encoded = w * inputs[i] * w.adjoint();
    const CMat noisy = gamma > 0 ? apply_loss(encoded, gamma, opt.j_max).rho : encoded;
    const DecodedState dec = ideal_decode(noisy, cell, opt.decode);
    out.grid_change = std::max(out.grid_change, dec.grid_change);
    out.trace_distance[i] = trace_distance(dec.rho, pipeline.apply(inputs[i]));
    out.max_trace_distance = std::max(out.max_trace_distance, out.trace_distance[i]);
  }
  return out;
}

}  // namespace gkp
