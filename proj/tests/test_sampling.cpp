#include <cmath>
#include <numbers>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "permanental/experiments.hpp"
#include "permanental/sampling.hpp"
#include "permanental/stats.hpp"

using namespace permanental;

TEST(Rng, KeyedStreamsAreReproducible) {
  Rng a(42, 1, 7), b(42, 1, 7), c(42, 1, 8), d(43, 1, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    EXPECT_NE(x, d.next());
  }
}

TEST(Rng, UniformIsOpenInterval) {
  Rng r(1, 2, 3);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 100000.0, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / 100000.0));
}

TEST(Rng, PoissonAndNegativeBinomialMeans) {
  Rng r(5, 0, 0);
  for (double mean : {0.5, 4.0, 30.0, 500.0}) {
    double s = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) s += r.poisson(mean);
    EXPECT_NEAR(s / n, mean, 4.0 * std::sqrt(mean / n)) << mean;
  }
  // mean r (1-p)/p, variance r (1-p)/p^2
  const double rr = 0.7, p = 0.3;
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += r.negative_binomial(rr, p);
  EXPECT_NEAR(s / n, rr * (1 - p) / p, 4.0 * std::sqrt(rr * (1 - p) / (p * p) / n));
}

TEST(GammaSampler, LaplaceTransform) {
  for (double alpha : {0.5, 1.3}) {
    const auto b = sample_gamma(alpha, 1.0, 200000, 99);
    for (double s : {0.5, 1.0, 2.0}) {
      const auto m = empirical_laplace(b, {s});
      EXPECT_NEAR(m.mean, std::pow(1.0 + s, -alpha), 3.0 * m.se) << "alpha=" << alpha << " s=" << s;
    }
  }
}

TEST(GammaSampler, ExponentialMeanAndRate) {
  const auto b = sample_gamma(1.0, 1.0, 200000, 3);
  const auto m = mean_se(b.draws);
  EXPECT_NEAR(m.mean, 1.0, 4.0 * m.se);
  const auto b2 = sample_gamma(1.0, 4.0, 200000, 3);
  EXPECT_DOUBLE_EQ(b2.draws[17], b.draws[17] / 4.0);
}

TEST(GammaSampler, KsAgainstBoost) {
  const auto b = sample_gamma(0.3, 1.0, 100000, 8);
  boost::math::gamma_distribution<double> g(0.3, 1.0);
  const double ks = ks_distance(b.draws, [&](double x) { return boost::math::cdf(g, x); });
  EXPECT_LT(ks, ks_critical_1pct(100000));
}

TEST(Bessel, ZeroArgument) {
  EXPECT_DOUBLE_EQ(bessel_i(0.0, 0.0).value, 1.0);
  EXPECT_EQ(bessel_i(0.5, 0.0).value, 0.0);
}

TEST(Bessel, AgainstBoost) {
  EXPECT_NEAR(bessel_i(0.0, 1.0).value, 1.2660658777520082, 1e-14);
  for (double nu : {-0.5, -0.3, 0.0, 0.3, 1.0, 2.5})
    for (double z : {1e-6, 0.1, 1.0, 7.5, 29.0, 31.0, 80.0, 400.0}) {
      const double ref = boost::math::cyl_bessel_i(nu, z);
      const auto e = bessel_i(nu, z);
      EXPECT_NEAR(e.value / ref, 1.0, 1e-12) << "nu=" << nu << " z=" << z;
      EXPECT_NEAR(e.log_value, std::log(ref), 1e-12 * std::max(1.0, std::fabs(std::log(ref))));
      EXPECT_GT(e.terms_used, 0);
    }
}

TEST(Bessel, SmallArgumentLeadingTerm) {
  for (double nu : {-0.5, 0.0, 0.7}) {
    const double z = 1e-8;
    EXPECT_NEAR(bessel_i(nu, z).value / (std::pow(z / 2, nu) / std::tgamma(nu + 1.0)), 1.0, 1e-12);
  }
}

TEST(Bessel, HugeArgumentStaysFiniteInLogs) {
  const auto e = bessel_i(0.3, 2000.0);
  EXPECT_TRUE(std::isinf(e.value));
  EXPECT_NEAR(e.log_value, 2000.0 - 0.5 * std::log(2.0 * std::numbers::pi * 2000.0), 1e-3);
}

TEST(Density, NormalizesAndHasGammaMarginal) {
  const auto k = PairKernel::from_values(1.0, 1.0, 0.5);
  EXPECT_NEAR(detail::density_total(k, 1.0), 1.0, 1e-6);
  boost::math::gamma_distribution<double> gx(1.0, k.b);
  for (double x : {0.05, 0.7, 3.0}) EXPECT_NEAR(detail::density_marginal_x(k, 1.0, x), boost::math::pdf(gx, x), 1e-8);
}

TEST(Density, FiniteLimitAtOriginForAlphaOne) {
  const auto k = PairKernel::from_values(1.0, 1.0, 0.5);
  const double g0 = bivariate_density(k, 1.0, 1e-12, 1e-12);
  // I_0(0) = 1: g -> 1/delta
  EXPECT_NEAR(g0, 1.0 / k.delta, 1e-9);
  EXPECT_THROW(bivariate_density(k, 1.0, 0.0, 1.0), domain_error);
  EXPECT_THROW(bivariate_density(PairKernel::from_values(1.0, 1.0, 1.0), 1.0, 1.0, 1.0), invalid_kernel);
}

TEST(Bivariate, LaplaceOnFiveByFiveGrid) {
  const auto k = PairKernel::from_values(1.0, 4.0, 1.5);
  for (double alpha : {0.7, 1.3}) {
    const auto b = sample_bivariate(k, alpha, 100000, 21);
    double worst = 0.0;
    for (double s1 : {0.1, 0.3, 1.0, 3.0, 10.0})
      for (double s2 : {0.1, 0.3, 1.0, 3.0, 10.0}) {
        const auto m = empirical_laplace(b, {s1, s2});
        worst = std::max(worst, std::fabs(m.mean - laplace_transform(k.matrix(), alpha, {s1, s2})) / m.se);
      }
    EXPECT_LE(worst, 4.0) << "alpha=" << alpha;
  }
}

TEST(Bivariate, DegeneratePairIsIdentical) {
  const auto k = PairKernel::from_values(2.0, 2.0, 2.0);
  const auto b = sample_bivariate(k, 0.7, 1000, 4);
  for (std::size_t r = 0; r < b.n_rep; ++r) EXPECT_EQ(b(r, 0), b(r, 1));
}

TEST(Bivariate, MeanIsAlphaTimesDiagonal) {
  const auto k = PairKernel::from_values(2.0, 0.5, 0.9);
  const auto b = sample_bivariate(k, 0.7, 200000, 6);
  std::vector<double> x(b.n_rep), y(b.n_rep);
  for (std::size_t r = 0; r < b.n_rep; ++r) {
    x[r] = b(r, 0);
    y[r] = b(r, 1);
  }
  const auto mx = mean_se(x), my = mean_se(y);
  EXPECT_NEAR(mx.mean, 0.7 * 2.0, 4.0 * mx.se);
  EXPECT_NEAR(my.mean, 0.7 * 0.5, 4.0 * my.se);
}

TEST(HalfInteger, SinglePointIsHalfChiSquare) {
  const auto b = sample_halfint_field(KernelSpec::explicit_matrix(Matrix::Identity(1, 1)), 1, {0.0}, 200000, 12);
  for (double s : {0.5, 1.0, 2.0}) {
    const auto m = empirical_laplace(b, {s});
    EXPECT_NEAR(m.mean, std::pow(1.0 + s, -0.5), 4.0 * m.se);
  }
}

TEST(HalfInteger, TwoIndependentExponentials) {
  const auto b = sample_halfint_field(KernelSpec::explicit_matrix(Matrix::Identity(2, 2)), 2, {0.0, 1.0}, 200000, 13);
  for (double s1 : {0.5, 2.0})
    for (double s2 : {0.25, 1.0}) {
      const auto m = empirical_laplace(b, {s1, s2});
      EXPECT_NEAR(m.mean, 1.0 / ((1.0 + s1) * (1.0 + s2)), 4.0 * m.se);
    }
}

TEST(HalfInteger, BrownianDyadicGrid) {
  std::vector<double> pts;
  for (int j = 1; j <= 8; ++j) pts.push_back(j / 8.0);
  const PermanentalSpec spec(0.5, KernelSpec::brownian_hit0(ScalarFn::zero()), pts);
  const auto b = sample_path_grid(spec, 50000, 14);
  EXPECT_EQ(b.sampler, SamplerId::halfint);
  for (const auto& s : default_s_grid(spec)) {
    const auto m = empirical_laplace(b, s);
    EXPECT_NEAR(m.mean, laplace_transform(spec, s), 4.0 * m.se);
  }
}

TEST(PathGrid, Dispatch) {
  const PermanentalSpec two(0.7, KernelSpec::fbmq(0.5, 0.0), {0.5, 1.0});
  EXPECT_EQ(sample_path_grid(two, 10, 1).sampler, SamplerId::bivariate);
  const PermanentalSpec three(0.7, KernelSpec::fbmq(0.5, 0.0), {0.5, 1.0, 1.5});
  EXPECT_THROW(sample_path_grid(three, 10, 1), capability_error);
  EXPECT_EQ(sample_path_grid(three, 10, 1, 1, PathMode::pairwise).sampler, SamplerId::pairwise);
  const PermanentalSpec skew(0.5, KernelSpec::fbmq(0.5, 0.5), {0.5, 1.0, 1.5});
  EXPECT_THROW(sample_path_grid(skew, 10, 1), capability_error);
  std::vector<double> grid;
  for (int i = 1; i <= 1024; ++i) grid.push_back(i / 1024.0);
  const PermanentalSpec bm(0.5, KernelSpec::brownian_hit0(ScalarFn::zero()), grid);
  const auto b = sample_path_grid(bm, 4, 2);
  EXPECT_EQ(b.n_points(), 1024u);
}

TEST(PathGrid, WorkerCountDoesNotChangeDraws) {
  std::vector<double> pts;
  for (int j = 1; j <= 40; ++j) pts.push_back(j / 40.0);
  const PermanentalSpec spec(1.5, KernelSpec::fbmq(0.5, 0.0), pts);
  const auto a = sample_path_grid(spec, 3000, 77, 1);
  const auto b = sample_path_grid(spec, 3000, 77, 4);
  EXPECT_EQ(a.draws, b.draws);
  const auto k = PairKernel::from_values(1.0, 4.0, 1.5);
  EXPECT_EQ(sample_bivariate(k, 0.7, 5000, 9, 1).draws, sample_bivariate(k, 0.7, 5000, 9, 3).draws);
}

TEST(PathGrid, NotPsdIsRejected) {
  Matrix m(3, 3);
  m << 1, 0.9, 0, 0.9, 1, 0.9, 0, 0.9, 1;
  EXPECT_THROW(sample_halfint_field(KernelSpec::explicit_matrix(m), 1, {0, 1, 2}, 10, 1), not_psd);
}
