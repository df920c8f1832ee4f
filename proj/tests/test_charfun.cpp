#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gkp/charfun.hpp"

using namespace gkp;

namespace {

Vec rvec(std::mt19937& rng, double scale = 0.6) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(2);
  v << u(rng), u(rng);
  return v;
}

Mat rotation(double th) {
  Mat r(2, 2);
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return r;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void expect_pointwise_equal(const ChannelCharFn& a, const ChannelCharFn& b, double tol, unsigned seed = 1) {
  std::mt19937 rng(seed);
  for (int i = 0; i < 100; ++i) {
    const Vec u = rvec(rng), v = rvec(rng);
    ASSERT_LT(std::abs(a.evaluate(u, v) - b.evaluate(u, v)), tol * std::max(1.0, std::abs(b.evaluate(u, v))));
    ASSERT_LT(std::abs(a.diagonal(u) - b.diagonal(u)), tol * std::max(1.0, std::abs(b.diagonal(u))));
  }
}

}  // namespace

TEST(UnitaryCharfun, QuarterRotation) {
  const double th = kPi / 2;
  const GaussianForm f = gaussian_unitary_charfun(rotation(th));
  std::mt19937 rng(2);
  for (int i = 0; i < 20; ++i) {
    const Vec v = rvec(rng, 1.5);
    const cplx want = std::exp(cplx(0, -kPi / 2) / std::tan(th / 2) * v.squaredNorm()) / (2 * std::sin(th / 2));
    EXPECT_LT(rel(f(v), want), 1e-13);
  }
  EXPECT_LT((f.Q - f.Q.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(UnitaryCharfun, HalfRotationIsFlat) {
  const GaussianForm f = gaussian_unitary_charfun(rotation(kPi));
  EXPECT_LT(f.Q.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(std::abs(f.amp - 0.5), 0.0, 1e-12);
}

TEST(UnitaryCharfun, IdentityIsSingular) {
  try {
    gaussian_unitary_charfun(Mat::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::singular);
  }
}

TEST(GaussianChannel, UnitaryConjugationConsistency) {
  const Mat s = rotation(0.7) * (Mat(2, 2) << 1.3, 0, 0, 1 / 1.3).finished();
  const GaussianForm cs = gaussian_unitary_charfun(s);
  const GaussianKernel k = gaussian_channel_charfun(s, Mat::Zero(2, 2));
  std::mt19937 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec u = rvec(rng), v = rvec(rng);
    ASSERT_LT(rel(k.evaluate(u, v), cs(u) * std::conj(cs(v))), 1e-10);
  }
}

TEST(GaussianChannel, LossAndAmplificationConstructors) {
  const double gamma = 0.3, g = 1.4;
  expect_pointwise_equal(
      single(gaussian_channel_charfun(std::sqrt(1 - gamma) * Mat::Identity(2, 2), gamma / 2 * Mat::Identity(2, 2))),
      loss_charfun(gamma), 1e-12);
  expect_pointwise_equal(
      single(gaussian_channel_charfun(std::sqrt(g) * Mat::Identity(2, 2), (g - 1) / 2 * Mat::Identity(2, 2))),
      amplification_charfun(g), 1e-12);
}

TEST(Loss, ExponentCoefficient) {
  for (double gamma : {0.5, 0.1, 0.01, 1e-3}) {
    const ChannelCharFn l = loss_charfun(gamma);
    const double tau = std::sqrt(1 - gamma);
    const Vec z = Vec::Zero(2);
    const cplx c0 = l.evaluate(z, z);
    EXPECT_LT(rel(c0, 1 / ((1 - tau) * (1 - tau))), 1e-12);
    std::mt19937 rng(4);
    for (int i = 0; i < 20; ++i) {
      const Vec u = rvec(rng, 0.05), v = rvec(rng, 0.05);
      const double want = -kPi / 2 * (1 + tau) * (1 + tau) / gamma * (u - v).squaredNorm();
      EXPECT_NEAR(std::log(std::abs(l.evaluate(u, v) / c0)), want, 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(Loss, DomainErrors) {
  EXPECT_THROW(loss_charfun(0.0), Error);
  EXPECT_THROW(loss_charfun(1.0), Error);
  EXPECT_THROW(amplification_charfun(1.0), Error);
  EXPECT_THROW(random_displacement_charfun(0.0), Error);
}

TEST(Envelope, KernelShape) {
  const double delta = 1.0;
  const GaussianKernel k = envelope_charfun(delta);
  const double coth_half = 2.16395341373865284877;
  const double kappa = 1 / (1 - std::exp(-delta * delta));
  const Vec z = Vec::Zero(2);
  EXPECT_LT(rel(k.evaluate(z, z), kappa * kappa), 1e-14);
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Vec u = rvec(rng), v = rvec(rng);
    const double want = kappa * kappa * std::exp(-kPi / 2 * coth_half * (u.squaredNorm() + v.squaredNorm()));
    EXPECT_LT(rel(k.evaluate(u, v), want), 1e-13);
  }
}

TEST(Envelope, WideEnvelopeLimit) {
  // coth(Delta^2 / 2) -> 1: the Gaussian width approaches pi / 2.
  const GaussianKernel k = envelope_charfun(6.0);
  Vec u(2);
  u << 0.4, 0;
  const Vec z = Vec::Zero(2);
  EXPECT_NEAR(std::log(std::abs(k.evaluate(u, z) / k.evaluate(z, z))), -kPi / 2 * 0.16, 1e-12);
}

TEST(Envelope, NonPositiveDeltaIsDomainError) {
  for (double d : {0.0, -0.3}) {
    try {
      envelope_charfun(d);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::domain);
    }
  }
}

TEST(RandomDisplacement, DeltaDensity) {
  const double sigma = 0.3;
  const ChannelCharFn r = random_displacement_charfun(sigma);
  ASSERT_EQ(r.terms.size(), 1u);
  EXPECT_TRUE(r.terms[0].kernel.delta_constrained());
  Vec u(2), v(2);
  u << 0.2, -0.1;
  v << 0.25, -0.1;
  EXPECT_LT(rel(r.diagonal(u), std::exp(-kPi * u.squaredNorm() / (sigma * sigma)) / (sigma * sigma)), 1e-14);
  EXPECT_EQ(r.evaluate(u, v), cplx(0.0));
}

TEST(DephasedEnvelope, NodeKernel) {
  const double sigma = 0.05, delta = 0.4;
  const ChannelCharFn c = dephased_envelope_charfun(sigma, delta, 16);
  ASSERT_TRUE(c.quadrature.has_value());
  ASSERT_EQ(c.terms.size(), c.quadrature->phi.size());
  for (size_t j = 0; j < c.terms.size(); ++j) {
    const double phi = c.quadrature->phi[j];
    const cplx z(delta * delta, -phi);
    const GaussianKernel& k = c.terms[j].kernel;
    const Vec zero = Vec::Zero(2);
    EXPECT_LT(rel(k.evaluate(zero, zero), 1 / std::norm(1.0 - std::exp(-z))), 1e-12);
    Vec u(2);
    u << 0.3, 0.1;
    const cplx coth = 1.0 / std::tanh(z / 2.0);
    const cplx want = std::exp(-kPi / 2 * coth * u.squaredNorm()) / (1.0 - std::exp(-z));
    EXPECT_LT(rel(k.evaluate(u, zero), want * std::conj(1.0 / (1.0 - std::exp(-z)))), 1e-12);
  }
}

TEST(DephasedEnvelope, WeightsAreAProbabilityMeasure) {
  const ChannelCharFn c = dephased_envelope_charfun(0.1, 0.5, 32);
  double s = 0, m2 = 0;
  for (size_t j = 0; j < c.quadrature->phi.size(); ++j) {
    s += c.quadrature->weight[j];
    m2 += c.quadrature->weight[j] * c.quadrature->phi[j] * c.quadrature->phi[j];
  }
  EXPECT_NEAR(s, 1.0, 1e-13);
  EXPECT_NEAR(m2, 0.01, 1e-14);
}

TEST(DephasedEnvelope, SmallSigmaReducesToEnvelope) {
  expect_pointwise_equal(dephased_envelope_charfun(1e-7, 0.5, 16), single(envelope_charfun(0.5)), 1e-9);
}

TEST(DephasedEnvelope, NodeDoublingConverges) {
  const double sigma = std::sqrt(1e-3), delta = delta_from_db(10);
  const ChannelCharFn a = dephased_envelope_charfun(sigma, delta, 32), b = dephased_envelope_charfun(sigma, delta, 64);
  std::mt19937 rng(6);
  for (int i = 0; i < 100; ++i) {
    const Vec u = rvec(rng, 2.0), v = rvec(rng, 2.0);
    const cplx cb = b.evaluate(u, v);
    if (std::abs(cb) < 1e-200) continue;
    ASSERT_LT(rel(a.evaluate(u, v), cb), 1e-10);
  }
}

TEST(DephasedEnvelope, TooFewNodesRejected) { EXPECT_THROW(dephased_envelope_charfun(0.1, 0.5, 4), Error); }

TEST(Compose, IdentityIsNeutral) {
  const ChannelCharFn id = single(identity_kernel(1));
  for (const ChannelCharFn& c : {loss_charfun(0.2), single(envelope_charfun(0.7)), random_displacement_charfun(0.2)}) {
    expect_pointwise_equal(compose(id, c), c, 1e-12);
    expect_pointwise_equal(compose(c, id), c, 1e-12);
  }
}

TEST(Compose, AmplificationAfterLossIsDisplacement) {
  for (double gamma : {0.05, 0.1, 0.4}) {
    const ChannelCharFn c = compose(amplification_charfun(1 / (1 - gamma)), loss_charfun(gamma));
    ASSERT_EQ(c.terms.size(), 1u);
    EXPECT_TRUE(c.terms[0].kernel.delta_constrained());
    expect_pointwise_equal(c, random_displacement_charfun(std::sqrt(gamma / (1 - gamma))), 1e-10);
  }
}

TEST(Compose, LossSemigroup) {
  const double g1 = 0.2, g2 = 0.3;
  expect_pointwise_equal(compose(loss_charfun(g1), loss_charfun(g2)), loss_charfun(1 - (1 - g1) * (1 - g2)), 1e-10);
}

TEST(Compose, Associativity) {
  const ChannelCharFn a = loss_charfun(0.1), b = single(envelope_charfun(0.6)), c = loss_charfun(0.25);
  const ChannelCharFn d = random_displacement_charfun(0.15);
  expect_pointwise_equal(compose(a, compose(b, c)), compose(compose(a, b), c), 1e-10);
  expect_pointwise_equal(compose(d, compose(a, b)), compose(compose(d, a), b), 1e-10);
}

TEST(Compose, TermCountMultiplies) {
  const ChannelCharFn deph = dephased_envelope_charfun(0.1, 0.5, 16);
  EXPECT_EQ(compose(deph, loss_charfun(0.1)).terms.size(), 16u);
  EXPECT_EQ(compose(deph, deph).terms.size(), 256u);
}

TEST(Compose, ModeMismatchRejected) { EXPECT_THROW(compose(loss_charfun(0.1, 2), loss_charfun(0.1, 1)), Error); }

TEST(Properties, Hermitivity) {
  const ChannelCharFn chans[] = {loss_charfun(0.2), amplification_charfun(1.3), single(envelope_charfun(0.5)),
                                 compose(loss_charfun(0.05), single(envelope_charfun(0.5))),
                                 dephased_envelope_charfun(0.1, 0.5, 16)};
  std::mt19937 rng(7);
  for (const ChannelCharFn& c : chans) {
    for (int i = 0; i < 1000; ++i) {
      const Vec u = rvec(rng), v = rvec(rng);
      const cplx a = c.evaluate(u, v), b = std::conj(c.evaluate(v, u));
      ASSERT_LT(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST(Properties, GaussianStateTransformationLaw) {
  Mat v(2, 2);
  v << 1.3, 0.2, 0.2, 0.7;
  Vec mu(2);
  mu << 0.4, -0.1;
  Mat t1(2, 2), n1(2, 2);
  t1 << 0.9, 0.1, 0.0, 0.8;
  n1 << 0.6, 0.1, 0.1, 0.5;
  const std::pair<Mat, Mat> cases[] = {
      {std::sqrt(0.7) * Mat::Identity(2, 2), 0.15 * Mat::Identity(2, 2)},
      {std::sqrt(1.5) * Mat::Identity(2, 2), 0.25 * Mat::Identity(2, 2)},
      {t1, n1},
  };
  for (const auto& [t, n] : cases) {
    const GaussianForm out = apply_channel(single(gaussian_channel_charfun(t, n)), gaussian_state_charfun(mu, v));
    Vec m2;
    Mat v2;
    gaussian_state_moments(out, m2, v2);
    EXPECT_LT((v2 - (t * v * t.transpose() + n)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((m2 - t * mu).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(std::abs(out.amp - 1.0), 0.0, 1e-9);
  }
}

TEST(Properties, TraceResidual) {
  EXPECT_LT(tp_residual(loss_charfun(0.2)), 1e-12);
  EXPECT_LT(tp_residual(amplification_charfun(1.5)), 1e-12);
  EXPECT_LT(tp_residual(random_displacement_charfun(0.3)), 1e-12);
  EXPECT_LT(tp_residual(single(kraus_kernel(gaussian_unitary_charfun(rotation(kPi / 2)), 1))), 1e-12);
  EXPECT_LT(tp_residual(compose(amplification_charfun(1.2), loss_charfun(0.1))), 1e-12);
  // The envelope shrinks the trace of most states.
  EXPECT_GT(tp_residual(single(envelope_charfun(0.3))), 1e-2);
}
