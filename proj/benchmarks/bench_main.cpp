#include <benchmark/benchmark.h>

#include "gkp/fock.hpp"
#include "gkp/logical_channel.hpp"
#include "gkp/metrics.hpp"
#include "gkp/pipeline.hpp"

using namespace gkp;

static void BM_BoxIntegral(benchmark::State& state) {
  const PrimitiveCell cell = PrimitiveCell::centered_box(square_code());
  const GaussianKernel k = envelope_charfun(delta_from_db(10));
  IVec s(2), t(2);
  s << 1, -1;
  t << 0, 2;
  for (auto _ : state) benchmark::DoNotOptimize(box_cell_integral(k, cell, s, t));
}
BENCHMARK(BM_BoxIntegral);

static void BM_NumericIntegral(benchmark::State& state) {
  const PrimitiveCell cell = PrimitiveCell::centered_box(square_code());
  const GaussianKernel k = envelope_charfun(delta_from_db(10));
  IVec s(2), t(2);
  s << 1, -1;
  t << 0, 2;
  for (auto _ : state) benchmark::DoNotOptimize(numeric_cell_integral(k, cell, s, t));
}
BENCHMARK(BM_NumericIntegral)->Unit(benchmark::kMicrosecond);

static void BM_LogicalChannel(benchmark::State& state) {
  const ChannelCharFn ch = compose(loss_charfun(0.01), single(envelope_charfun(delta_from_db(10))));
  const int s_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(square_logical_channel(ch, s_max));
}
BENCHMARK(BM_LogicalChannel)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_Lowdin(benchmark::State& state) {
  const ChannelCharFn ch = single(envelope_charfun(delta_from_db(6)));
  const LogicalSuperop raw = logical_channel(square_code(), PrimitiveCell::centered_box(square_code()), ch, TruncationSpec{2});
  for (auto _ : state) benchmark::DoNotOptimize(lowdin_orthonormalize(raw));
}
BENCHMARK(BM_Lowdin)->Unit(benchmark::kMicrosecond);

static void BM_SweepPoint(benchmark::State& state) {
  PointSpec p;
  p.family = static_cast<NoiseFamily>(state.range(0));
  p.param = p.family == NoiseFamily::dephasing ? 1e-3 : 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_point(p));
}
BENCHMARK(BM_SweepPoint)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void BM_IdealDecode(benchmark::State& state) {
  const FockState c = build_approx_codeword(0, delta_from_db(10), 200);
  const CMat rho = c.amp * c.amp.adjoint();
  const PrimitiveCell cell = PrimitiveCell::centered_box(square_code());
  for (auto _ : state) benchmark::DoNotOptimize(ideal_decode(rho, cell));
}
BENCHMARK(BM_IdealDecode)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
