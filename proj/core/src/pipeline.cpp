#include "gkp/pipeline.hpp"

#include <cmath>

namespace gkp {

NoiseFamily parse_noise_family(const std::string& name) {
  if (name == "envelope") return NoiseFamily::envelope;
  if (name == "loss") return NoiseFamily::loss;
  if (name == "displacement") return NoiseFamily::displacement;
  if (name == "dephasing") return NoiseFamily::dephasing;
  throw Error(Errc::config, "unknown noise family '" + name + "'");
}

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::envelope:
      return "envelope";
    case NoiseFamily::loss:
      return "loss";
    case NoiseFamily::displacement:
      return "displacement";
    case NoiseFamily::dephasing:
      return "dephasing";
  }
  return {};
}

double nbar_estimate(double delta) { return 0.5 / (delta * delta) - 0.5; }

ChannelCharFn noisy_envelope_channel(NoiseFamily family, double delta, double param, int quadrature_nodes) {
  const ChannelCharFn env = single(envelope_charfun(delta));
  switch (family) {
    case NoiseFamily::envelope:
      return env;
    case NoiseFamily::loss:
      return param == 0 ? env : compose(loss_charfun(param), env);
    case NoiseFamily::displacement:
      return param == 0 ? env : compose(random_displacement_charfun(std::sqrt(param)), env);
    case NoiseFamily::dephasing:
      return dephased_envelope_charfun(std::sqrt(param), delta, quadrature_nodes);
  }
  return env;
}

LogicalSuperop square_logical_channel(const ChannelCharFn& channel, int s_max, int threads) {
  static const GkpCode code = square_code();
  static const PrimitiveCell cell = PrimitiveCell::centered_box(code);
  LogicalChannelOptions opt;
  opt.threads = threads;
  return lowdin_orthonormalize(logical_channel(code, cell, channel, {s_max}, opt)).channel;
}

PointResult evaluate_point(const PointSpec& spec) {
  const double delta = delta_from_db(spec.delta_db);
  const ChannelCharFn ch = noisy_envelope_channel(spec.family, delta, spec.param, spec.quadrature_nodes);
  PointResult r;
  r.delta_db = spec.delta_db;
  r.nbar_est = nbar_estimate(delta);
  r.noise_param = spec.param;
  r.channel = square_logical_channel(ch, spec.s_max);
  r.infidelity = average_gate_infidelity(r.channel);
  const CptpDiagnostics d = cptp_diagnostics(r.channel);
  r.tp_defect = d.tp_defect;
  r.min_choi_eig = d.min_choi_eigenvalue;
  if (spec.residual) {
    const LogicalSuperop next = square_logical_channel(ch, spec.s_max + 1);
    r.smax_residual = std::fabs(average_gate_infidelity(next) - r.infidelity);
  }
  return r;
}

PointResult baseline_point(NoiseFamily family, double param) {
  PointResult r;
  r.baseline = true;
  r.noise_param = param;
  r.delta_db = std::nan("");
  r.nbar_est = std::nan("");
  switch (family) {
    case NoiseFamily::loss:
      r.channel = fock_qubit_loss_baseline(param);
      break;
    case NoiseFamily::dephasing:
      r.channel = fock_qubit_dephasing_baseline(std::sqrt(param));
      break;
    default:
      throw Error(Errc::unsupported, "baseline_point: Fock baselines exist for loss and dephasing only");
  }
  r.infidelity = average_gate_infidelity(r.channel);
  const CptpDiagnostics d = cptp_diagnostics(r.channel);
  r.tp_defect = d.tp_defect;
  r.min_choi_eig = d.min_choi_eigenvalue;
  return r;
}

}  // namespace gkp
