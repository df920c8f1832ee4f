#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gkp/logical_channel.hpp"
#include "gkp/metrics.hpp"
#include "gkp/special.hpp"

using namespace gkp;

namespace {

IVec iv(long long a, long long b) {
  IVec s(2);
  s << a, b;
  return s;
}

cplx to_d(cplxl z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

double rel(cplxl a, cplxl b) { return static_cast<double>(std::abs(a - b) / std::max(std::abs(b), 1e-300L)); }

long double infidelity_o(const GkpCode& code, const PrimitiveCell& cell, const ChannelCharFn& ch, int s_max) {
  return average_gate_infidelity(lowdin_orthonormalize(logical_channel(code, cell, ch, {s_max})).channel);
}

CMat random_hermitian(std::mt19937& rng, int d) {
  std::normal_distribution<double> n;
  CMat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
  return a + a.adjoint();
}

}  // namespace

TEST(Pauli, PhaseConvention) {
  const CMat y = pauli_matrix({2}, iv(1, 1));
  CMat want(2, 2);
  want << 0, cplx(0, -1), cplx(0, 1), 0;
  EXPECT_LT((y - want).norm(), 1e-15);
  EXPECT_EQ(pauli_count({2}), 4);
  EXPECT_EQ(pauli_count({2, 1, 1}), 4);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(pauli_index({2}, pauli_label({2}, i)), i);
}

TEST(Pauli, LabelReductionPhase) {
  // P(s + 2 e_0) = X^2 P(s) up to the convention phase; X^2 = I for a qubit.
  const CMat a = pauli_matrix({2}, iv(3, 1));
  const CMat b = pauli_matrix({2}, iv(1, 1));
  EXPECT_LT((a - to_d(pauli_phase({2}, iv(3, 1))) * b / to_d(pauli_phase({2}, iv(1, 1)))).norm(), 1e-14);
}

TEST(BoxIntegral, EnvelopeOriginMatchesQuadrature) {
  const double delta = 0.5;
  const GkpCode sq = square_code();
  const PrimitiveCell cell = PrimitiveCell::centered_box(sq);
  const double a = 1 / std::sqrt(2.0), coth = 1 / std::tanh(delta * delta / 2);
  const double kappa = 1 / (1 - std::exp(-delta * delta));
  const QuadRule r = gauss_legendre(200, -a / 2, a / 2);
  long double sum = 0;
  for (size_t i = 0; i < r.x.size(); ++i)
    for (size_t j = 0; j < r.x.size(); ++j)
      sum += r.w[i] * r.w[j] * kappa * kappa * std::exp(-kPi * coth * (r.x[i] * r.x[i] + r.x[j] * r.x[j]));
  EXPECT_LT(rel(box_cell_integral(envelope_charfun(delta), cell, iv(0, 0), iv(0, 0)), sum), 1e-10);
}

TEST(BoxIntegral, AgreesWithNumericAcrossWindow) {
  const GkpCode sq = square_code();
  const PrimitiveCell cell = PrimitiveCell::centered_box(sq);
  for (double delta : {0.3, 0.5, 0.94}) {
    const GaussianKernel k = envelope_charfun(delta);
    for (int s0 = -1; s0 <= 1; ++s0)
      for (int s1 = -1; s1 <= 1; ++s1)
        for (int t0 = -1; t0 <= 1; ++t0) {
          const IVec s = iv(s0, s1), t = iv(t0, s1 - s0);
          const cplxl exact = box_cell_integral(k, cell, s, t);
          const CellIntegral num = numeric_cell_integral(k, cell, s, t);
          ASSERT_TRUE(num.converged);
          ASSERT_LT(static_cast<double>(std::abs(exact - num.value)), 1e-8 * static_cast<double>(std::abs(exact)) + 1e-300)
              << delta << " " << s.transpose() << " " << t.transpose();
        }
  }
}

TEST(BoxIntegral, GeneralKernelAgreesWithNumeric) {
  const GkpCode sq = square_code();
  const PrimitiveCell cell = PrimitiveCell::centered_box(sq);
  const ChannelCharFn c = compose(loss_charfun(0.05), single(envelope_charfun(0.5)));
  const GaussianKernel& k = c.terms[0].kernel;
  for (const auto& [s, t] : {std::pair{iv(1, 0), iv(0, 0)}, std::pair{iv(1, -1), iv(0, 1)}}) {
    const cplxl exact = box_cell_integral(k, cell, s, t);
    EXPECT_LT(rel(numeric_cell_integral(k, cell, s, t).value, exact), 1e-8);
  }
}

TEST(BoxIntegral, ConjugateSymmetry) {
  const GkpCode sq = square_code();
  const PrimitiveCell cell = PrimitiveCell::centered_box(sq);
  const GaussianKernel k = envelope_charfun(0.8);
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> u(-2, 2);
  for (int i = 0; i < 20; ++i) {
    const IVec s = iv(u(rng), u(rng)), t = iv(u(rng), u(rng));
    const cplxl a = box_cell_integral(k, cell, s, t), b = std::conj(box_cell_integral(k, cell, t, s));
    EXPECT_LE(static_cast<double>(std::abs(a - b)), 1e-14 * static_cast<double>(std::abs(a)) + 1e-300);
  }
}

TEST(BoxIntegral, NonBoxCellUnsupported) {
  try {
    box_cell_integral(envelope_charfun(0.5), PrimitiveCell::voronoi(hexagonal_code()), iv(0, 0), iv(0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported);
  }
}

TEST(NumericIntegral, HexagonalSelfConvergence) {
  const PrimitiveCell cell = PrimitiveCell::voronoi(hexagonal_code());
  const GaussianKernel k = envelope_charfun(0.5);
  const CellIntegral a = numeric_cell_integral(k, cell, iv(0, 0), iv(0, 0), {48, 48, 1e-12});
  const CellIntegral b = numeric_cell_integral(k, cell, iv(0, 0), iv(0, 0), {96, 96, 1e-12});
  EXPECT_LT(rel(a.value, b.value), 1e-8);
}

TEST(NumericIntegral, ZeroKernel) {
  GaussianKernel k = envelope_charfun(0.5);
  k.form.amp = 0;
  const CellIntegral r = numeric_cell_integral(k, PrimitiveCell::voronoi(hexagonal_code()), iv(1, 0), iv(0, 0));
  EXPECT_EQ(to_d(r.value), cplx(0.0));
}

TEST(LogicalChannel, IdentityChannel) {
  const GkpCode sq = square_code();
  const LogicalSuperop e = logical_channel(sq, PrimitiveCell::centered_box(sq), single(identity_kernel(1)));
  EXPECT_LT((e.superoperator() - CMat::Identity(4, 4)).norm(), 1e-14);
  EXPECT_LT(static_cast<double>(average_gate_infidelity(e)), 1e-15);
}

TEST(LogicalChannel, NumericPathMatchesAnalytic) {
  const GkpCode sq = square_code();
  const PrimitiveCell cell = PrimitiveCell::centered_box(sq);
  const ChannelCharFn ch = single(envelope_charfun(0.6));
  LogicalChannelOptions opt;
  opt.force_numeric = true;
  const CMat a = logical_channel(sq, cell, ch).superoperator();
  const CMat b = logical_channel(sq, cell, ch, {}, opt).superoperator();
  EXPECT_LT((a - b).norm(), 1e-8 * a.norm());
}

TEST(LogicalChannel, LargeEnvelopeLimit) {
  const GkpCode sq = square_code();
  const long double inf = infidelity_o(sq, PrimitiveCell::centered_box(sq), single(envelope_charfun(delta_from_db(30))), 1);
  EXPECT_LT(inf, 1e-12L);
  EXPECT_GE(inf, 0.0L);
}

TEST(LogicalChannel, LossOnIdealCodestatesViolatesDecay) {
  const GkpCode sq = square_code();
  try {
    logical_channel(sq, PrimitiveCell::centered_box(sq), loss_charfun(0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::decay_violation);
    EXPECT_NE(std::string(e.what()).find("shell"), std::string::npos);
  }
}

TEST(LogicalChannel, TruncationConvergenceNearHalfPhoton) {
  const GkpCode sq = square_code();
  const PrimitiveCell cell = PrimitiveCell::centered_box(sq);
  const ChannelCharFn ch = single(envelope_charfun(delta_from_db(3.1)));
  const long double f1 = infidelity_o(sq, cell, ch, 1), f2 = infidelity_o(sq, cell, ch, 2),
                    f3 = infidelity_o(sq, cell, ch, 3);
  const double r12 = static_cast<double>(std::abs(f2 - f1) / f2), r23 = static_cast<double>(std::abs(f3 - f2) / f3);
  EXPECT_GT(r12, 7e-4 / 2);
  EXPECT_LT(r12, 7e-4 * 2);
  EXPECT_GT(r23, 4e-9 / 2);
  EXPECT_LT(r23, 4e-9 * 2);
}

TEST(LogicalChannel, TruncationMonotonicity) {
  const GkpCode sq = square_code();
  const PrimitiveCell cell = PrimitiveCell::centered_box(sq);
  for (double delta : {0.3, 0.5, 0.94}) {
    const ChannelCharFn ch = single(envelope_charfun(delta));
    long double prev = infidelity_o(sq, cell, ch, 1), prev_res = -1;
    for (int s_max = 2; s_max <= 4; ++s_max) {
      const long double cur = infidelity_o(sq, cell, ch, s_max);
      const long double res = std::abs(cur - prev);
      if (prev_res >= 0) EXPECT_LE(res, prev_res) << delta << " " << s_max;
      prev_res = res;
      prev = cur;
    }
  }
}

TEST(LogicalChannel, CoefficientDecay) {
  const GkpCode sq = square_code();
  const LogicalSuperop e = logical_channel(sq, PrimitiveCell::centered_box(sq), single(envelope_charfun(0.5)), {2});
  const long double c00 = std::abs(e.coeff(iv(0, 0), iv(0, 0)));
  double c_fit = 1e300;
  for (const auto& [key, val] : e.coefficients()) {
    const auto& [s, t] = key;
    double n2 = 0;
    for (long long x : s) n2 += x * x;
    for (long long x : t) n2 += x * x;
    if (n2 == 0 || std::abs(val) == 0) continue;
    c_fit = std::min(c_fit, -std::log(static_cast<double>(std::abs(val) / c00)) / n2);
  }
  EXPECT_GT(c_fit, 0.0);
}

TEST(LogicalChannel, Hermitivity) {
  const GkpCode sq = square_code();
  const ChannelCharFn chans[] = {single(envelope_charfun(0.5)), compose(loss_charfun(0.05), single(envelope_charfun(0.5))),
                                 dephased_envelope_charfun(0.1, 0.5, 16)};
  std::mt19937 rng(9);
  for (const ChannelCharFn& ch : chans) {
    const LogicalSuperop e = logical_channel(sq, PrimitiveCell::centered_box(sq), ch, {1});
    for (const auto& [key, val] : e.coefficients()) {
      IVec s(2), t(2);
      for (int j = 0; j < 2; ++j) {
        s[j] = key.first[j];
        t[j] = key.second[j];
      }
      ASSERT_LE(static_cast<double>(std::abs(val - std::conj(e.coeff(t, s)))), 1e-14 * static_cast<double>(std::abs(val)) + 1e-300);
    }
    for (int i = 0; i < 20; ++i) {
      const CMat out = e.apply(random_hermitian(rng, 2));
      ASSERT_LT((out - out.adjoint()).norm(), 1e-12 * std::max(1.0, out.norm()));
    }
  }
}

TEST(LogicalSuperop, ChiRoundTrip) {
  CMatL chi = CMatL::Zero(4, 4);
  chi(0, 0) = 0.7L;
  chi(1, 1) = 0.2L;
  chi(3, 3) = 0.1L;
  chi(0, 3) = cplxl(0.05L, 0.02L);
  chi(3, 0) = std::conj(chi(0, 3));
  const LogicalSuperop e = LogicalSuperop::from_chi({2}, chi);
  EXPECT_LT(static_cast<double>((e.chi() - chi).norm()), 1e-18);
}
