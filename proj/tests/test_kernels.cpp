#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "permanental/kernels.hpp"
#include "permanental/matrixcore.hpp"

using namespace permanental;

namespace {
const double pi = std::numbers::pi;
}

TEST(Kernels, BrownianMinIsMin) {
  const auto k = KernelSpec::brownian_hit0(ScalarFn::zero());
  EXPECT_DOUBLE_EQ(k.eval(2.0, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(k.eval(3.0, 2.0), 2.0);
  EXPECT_THROW(k.eval(0.0, 1.0), domain_error);
}

TEST(Kernels, BrownianWithPotentialAndOrigin) {
  const auto k = KernelSpec::brownian_hit0(ScalarFn::power(1.0, 0.5), true);
  EXPECT_DOUBLE_EQ(k.eval(1.0, 4.0), 1.0 + 2.0);
  EXPECT_DOUBLE_EQ(k.eval(0.0, 4.0), 2.0);
  EXPECT_DOUBLE_EQ(k.eval(4.0, 0.0), 1.0);
  EXPECT_FALSE(k.symmetric());
  // convex f is rejected
  EXPECT_THROW(KernelSpec::brownian_hit0(ScalarFn::power(1.0, 2.0)), parameter_error);
}

TEST(Kernels, CGammaBetaClosedForms) {
  // Gamma(-1/2) = -2 sqrt(pi), sin(3 pi/4) = sqrt(2)/2
  EXPECT_NEAR(c_gamma_beta(0.5, 0.0), std::sqrt(2.0 / pi), 1e-15);
  EXPECT_NEAR(c_gamma_beta(0.5, 1.0), 1.0 / std::sqrt(2.0 * pi), 1e-15);
  EXPECT_NEAR(c_gamma_beta(0.5, 0.0), 0.797885, 1e-6);
  EXPECT_NEAR(c_gamma_beta(0.5, 1.0), 0.398942, 1e-6);
  EXPECT_THROW(c_gamma_beta(1.0, 0.0), parameter_error);
  EXPECT_THROW(c_gamma_beta(0.5, 1.5), parameter_error);
}

TEST(Kernels, CGammaBetaPositiveOnGrid) {
  for (int i = 1; i < 20; ++i)
    for (int j = -4; j <= 4; ++j) EXPECT_GT(c_gamma_beta(i / 20.0, j / 4.0), 0.0);
}

TEST(Kernels, FbmqDiagonal) {
  const auto k = KernelSpec::fbmq(0.5, 0.0);
  EXPECT_NEAR(k.eval(1.0, 1.0), 2.0 * std::sqrt(2.0 / pi), 1e-14);
  EXPECT_NEAR(k.eval(1.0, 1.0), 1.59577, 1e-5);
  for (double g : {0.2, 0.5, 0.8})
    for (double b : {-1.0, 0.0, 0.4})
      for (double x : {-2.0, 0.3, 5.0}) {
        const auto kk = KernelSpec::fbmq(g, b);
        EXPECT_NEAR(kk.eval(x, x), 2.0 * c_gamma_beta(g, b) * std::pow(std::fabs(x), g), 1e-12);
      }
}

TEST(Kernels, FbmqSkewAntisymmetricPart) {
  // u(x,y) - u(y,x) flips sign with beta
  const auto kp = KernelSpec::fbmq(0.4, 0.6), km = KernelSpec::fbmq(0.4, -0.6);
  for (double x : {-1.0, 0.5, 2.0})
    for (double y : {-0.3, 1.5}) EXPECT_NEAR(kp.eval(x, y), km.eval(y, x), 1e-13);
}

TEST(Kernels, LevyDiagonalConstant) {
  // rho = 1, gamma = 1/2, beta = 0: (1/pi) int_0^inf dl / (1 + l^{3/2}) = 4 / (3 sqrt 3)
  const double d = levy_d_constant(1.0, 0.5, 0.0);
  EXPECT_NEAR(d, 4.0 / (3.0 * std::sqrt(3.0)), 1e-7);
  const auto k = KernelSpec::levy_exp_killed(1.0, 0.5, 0.0);
  EXPECT_NEAR(k.eval(0.7, 0.7), d, 1e-9);
  EXPECT_NEAR(k.eval(-3.0, -3.0), d, 1e-9);
}

TEST(Kernels, LevySymmetryAndReflection) {
  const auto k0 = KernelSpec::levy_exp_killed(1.0, 0.5, 0.0);
  EXPECT_NEAR(k0.eval(0.2, 1.1), k0.eval(1.1, 0.2), 1e-9);
  // the sin term is odd in beta and in x - y
  const auto kp = KernelSpec::levy_exp_killed(2.0, 0.6, 0.5), km = KernelSpec::levy_exp_killed(2.0, 0.6, -0.5);
  EXPECT_NEAR(kp.eval(0.0, 0.8), km.eval(0.8, 0.0), 1e-8);
  // symmetric part does not depend on the sign of beta
  EXPECT_NEAR(kp.eval(0.0, 0.8) + kp.eval(0.8, 0.0), km.eval(0.0, 0.8) + km.eval(0.8, 0.0), 1e-8);
  EXPECT_LT(kp.eval(0.0, 0.8), kp.eval(0.0, 0.0));
}

TEST(Kernels, ExpKilledValidation) {
  EXPECT_NO_THROW(KernelSpec::exp_killed(1.0, ScalarFn::exponential(1.0, -1.0)));
  // f'' = 4 f > lambda^2 f
  EXPECT_THROW(KernelSpec::exp_killed(1.0, ScalarFn::exponential(1.0, 2.0)), parameter_error);
  const auto k = KernelSpec::exp_killed(2.0, ScalarFn::constant(0.5));
  EXPECT_NEAR(k.eval(1.0, 1.5), std::exp(-1.0) + 0.5, 1e-15);
}

TEST(Kernels, SigmaBasics) {
  const auto k = KernelSpec::fbmq(0.5, 0.3);
  EXPECT_EQ(sigma(k, 0.4, 0.4), 0.0);
  Matrix id = Matrix::Identity(2, 2);
  EXPECT_NEAR(sigma(KernelSpec::explicit_matrix(id), 0.0, 1.0), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(sigma(k, 0.4, 1.3), sigma(k, 1.3, 0.4));
}

TEST(Kernels, FbmqSigmaMajorant) {
  for (double g : {0.3, 0.5, 0.9})
    for (double b : {0.0, 0.5, -1.0}) {
      const auto k = KernelSpec::fbmq(g, b);
      const auto phi = EnvelopeFn::power(std::sqrt(2.0 * (1.0 + std::fabs(b)) * c_gamma_beta(g, b)), g / 2.0);
      std::vector<double> grid;
      for (int i = -10; i <= 10; ++i) grid.push_back(0.37 * i);
      const auto r = majorant_audit(k, phi, grid);
      EXPECT_TRUE(r.pass) << "gamma=" << g << " beta=" << b << " worst=" << r.worst;
    }
}

TEST(Kernels, SymmetricDecomposition) {
  const auto k = KernelSpec::brownian_hit0(ScalarFn::zero());
  const auto d = sigma_decomposition(k, 0.5, 2.0);
  EXPECT_EQ(d.asym2, 0.0);
  EXPECT_NEAR(rho_metric(k, 0.5, 2.0), sigma(k, 0.5, 2.0), 1e-15);
}

TEST(Kernels, AsymmetricSigmaBound) {
  // u = v + h with v(s,t) = e^{-|s-t|}, h = e^{-t}; on [0,1] u >= delta = 2/e
  const auto k = KernelSpec::exp_killed(1.0, ScalarFn::exponential(1.0, -1.0));
  const double delta = 2.0 * std::exp(-1.0);
  for (double s = 0.0; s <= 1.0; s += 0.125)
    for (double t = s + 0.125; t <= 1.0; t += 0.125) {
      const double s2 = sigma(k, s, t) * sigma(k, s, t);
      const double v = 2.0 - 2.0 * std::exp(-(t - s));
      const double dh = std::exp(-s) - std::exp(-t);
      EXPECT_LE(s2, v + dh * dh / (4.0 * delta) + 1e-14);
    }
}

TEST(Kernels, ExpKilledNearZeroSigma) {
  // sigma^2(0,h) = 2 lambda h - (7/8) h^2 + O(h^3) for lambda = 1, f = e^{-t}
  const auto k = KernelSpec::exp_killed(1.0, ScalarFn::exponential(1.0, -1.0));
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const double s2 = sigma(k, 0.0, h) * sigma(k, 0.0, h);
    EXPECT_LE(s2, 2.0 * h);
    EXPECT_NEAR(s2, 2.0 * h - 0.875 * h * h, h * h * h + 1e-15);
  }
}

TEST(Kernels, Normalize) {
  Matrix m(2, 2);
  m << 4, 2, 2, 4;
  const auto n = normalize(KernelSpec::explicit_matrix(m));
  EXPECT_DOUBLE_EQ(n.eval(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(n.eval(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(n.eval(0, 1), 0.5);
  const auto f = normalize(KernelSpec::fbmq(0.5, 0.2));
  for (double s : {-1.0, 0.5, 3.0}) EXPECT_DOUBLE_EQ(f.eval(s, s), 1.0);
}

TEST(Kernels, NormalizedSigmaInequality) {
  // sigma~^2 <= sigma^2 / (u(s,s) u(t,t))^{1/2}, from 2 sqrt(ab) <= a + b
  const auto k = KernelSpec::fbmq(0.5, 0.0);
  const auto n = normalize(k);
  for (int i = 1; i <= 20; ++i)
    for (int j = i + 1; j <= 20; ++j) {
      const double s = 0.2 * i, t = 0.2 * j;
      const double st = sigma(n, s, t), sg = sigma(k, s, t);
      EXPECT_LE(st * st, sg * sg / std::sqrt(k.eval(s, s) * k.eval(t, t)) + 1e-12);
    }
}

TEST(Kernels, MajorantFailsWithZeroEnvelope) {
  const auto r = majorant_audit(KernelSpec::fbmq(0.5, 0.0), EnvelopeFn::power(0.0, 1.0), {0.0, 0.5, 1.0});
  EXPECT_FALSE(r.pass);
}

TEST(Kernels, ExpKilledMajorant) {
  // phi^2(h) = 2 lambda h
  const auto k = KernelSpec::exp_killed(1.0, ScalarFn::exponential(1.0, -1.0));
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.01 * i / 20.0);
  EXPECT_TRUE(majorant_audit(k, EnvelopeFn::power(std::sqrt(2.0), 0.5), grid).pass);
}

TEST(Kernels, JsonRoundTrip) {
  const std::vector<KernelSpec> ks = {
      KernelSpec::fbmq(0.5, 0.25), KernelSpec::levy_exp_killed(2.0, 0.5, 0.0),
      KernelSpec::exp_killed(1.0, ScalarFn::exponential(1.0, -1.0)),
      KernelSpec::brownian_hit0(ScalarFn::power(1.0, 0.5), true),
      KernelSpec::discrete_seq(SeqFn::geometric(1.0, 0.5), SeqFn::one_minus(SeqFn::geometric(1.0, 0.5)),
                               SeqFn::constant(0.5)),
      normalize(KernelSpec::fbmq(0.3, 0.0))};
  for (const auto& k : ks) {
    const auto back = KernelSpec::from_json(k.to_json());
    EXPECT_EQ(back.to_json(), k.to_json());
    EXPECT_DOUBLE_EQ(back.eval(1.0, 2.0), k.eval(1.0, 2.0));
  }
}

TEST(Kernels, DiscreteSequenceEntries) {
  const auto k = KernelSpec::discrete_seq(SeqFn::geometric(1.0, 0.5), SeqFn::constant(0.25), SeqFn::constant(0.5));
  EXPECT_DOUBLE_EQ(k.eval(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(k.eval(3, 0), 1.25);
  EXPECT_DOUBLE_EQ(k.eval(0, 3), 1.5);
  EXPECT_DOUBLE_EQ(k.eval(2, 2), 0.25 + 1.0 + 0.125);
  EXPECT_DOUBLE_EQ(k.eval(2, 5), 1.125);
  EXPECT_THROW(k.eval(1.5, 2), domain_error);
}
