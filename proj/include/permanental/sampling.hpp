#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <boost/math/special_functions/gamma.hpp>

#include "permanental/errors.hpp"
#include "permanental/kernels.hpp"
#include "permanental/matrixcore.hpp"
#include "permanental/parallel.hpp"
#include "permanental/rng.hpp"

namespace permanental {

// ---- modified Bessel function of the first kind ----

struct BesselEval {
  double order = 0.0;
  double argument = 0.0;
  double value = 0.0;
  double log_value = 0.0;
  int terms_used = 0;
};

namespace detail {

// Power series in log-scaled form; every term is nonnegative, so there is no
// cancellation and truncation happens once terms fall below 1e-17 of the sum.
inline BesselEval bessel_series(double nu, double z) {
  BesselEval e{nu, z, 0.0, 0.0, 0};
  const double h = 0.5 * z;
  const double h2 = h * h;
  int n0 = 0;
  if (nu + 1.0 <= 0.0) n0 = 1;  // nu = -1: the n=0 term has 1/Gamma(0) = 0
  const double lt0 = (2.0 * n0 + nu) * std::log(h) - boost::math::lgamma(n0 + nu + 1.0) -
                     boost::math::lgamma(n0 + 1.0);
  double sum = 1.0, term = 1.0, log_scale = 0.0;
  int n = n0;
  for (;; ++n) {
    term *= h2 / ((n + 1.0) * (n + nu + 1.0));
    sum += term;
    ++e.terms_used;
    if (sum > 1e280) {
      sum *= 1e-280;
      term *= 1e-280;
      log_scale += 280.0 * std::log(10.0);
    }
    if (n + 1.0 > h && term < 1e-17 * sum) break;
    if (e.terms_used > 100000) throw numeric_error("bessel_i: series did not terminate");
  }
  e.terms_used += 1;
  e.log_value = lt0 + log_scale + std::log(sum);
  e.value = std::exp(e.log_value);
  return e;
}

// e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k; returns false when the
// series starts diverging before reaching 1e-17.
inline bool bessel_asymptotic(double nu, double z, BesselEval& e) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  int k = 1;
  for (; k < 200; ++k) {
    const double next = -term * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * z);
    if (std::fabs(next) > std::fabs(term)) return false;
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  if (k >= 200 || !(sum > 0.0)) return false;
  e.terms_used = k + 1;
  e.log_value = z - 0.5 * std::log(2.0 * std::numbers::pi * z) + std::log(sum);
  e.value = std::exp(e.log_value);
  return true;
}

}  // namespace detail

inline BesselEval bessel_i(double nu, double z) {
  if (!(nu >= -1.0)) throw domain_error("bessel_i needs order >= -1");
  if (!(z >= 0.0)) throw domain_error("bessel_i needs argument >= 0");
  if (z == 0.0) {
    BesselEval e{nu, z, 0.0, -std::numeric_limits<double>::infinity(), 1};
    if (nu == 0.0) {
      e.value = 1.0;
      e.log_value = 0.0;
    } else if (nu < 0.0 && nu > -1.0) {
      e.value = std::numeric_limits<double>::infinity();
      e.log_value = e.value;
    }
    return e;
  }
  if (z >= 30.0) {
    BesselEval e{nu, z, 0.0, 0.0, 0};
    if (detail::bessel_asymptotic(nu, z, e)) return e;
  }
  return detail::bessel_series(nu, z);
}

// ---- bivariate density ----

// Density of (X(s), X(t)) for pair kernel K and shape alpha, with
// delta = |K| > 0 and gamma > 0.
inline double bivariate_log_density(const PairKernel& k, double alpha, double x, double y) {
  if (!(alpha > 0.0)) throw parameter_error("alpha must be positive");
  if (!(k.delta > 0.0) || !(k.gamma_off > 0.0))
    throw invalid_kernel("bivariate density needs delta > 0 and gamma > 0; use sample_bivariate for degenerate pairs");
  if (!(x > 0.0 && y > 0.0)) throw domain_error("bivariate density needs x, y > 0");
  const double g = k.gamma_off, d = k.delta;
  const double log_z = std::log(2.0 * g / d) + 0.5 * (std::log(x) + std::log(y));
  // I_nu(z) ~ (z/2)^nu / Gamma(nu+1) once z underflows; nu = alpha-1 > -1
  const double li = log_z < -600.0 ? (alpha - 1.0) * (log_z - std::log(2.0)) - boost::math::lgamma(alpha)
                                   : bessel_i(alpha - 1.0, std::exp(log_z)).log_value;
  const double lg = (1.0 - alpha) * std::log(g) - boost::math::lgamma(alpha) - std::log(d) + li -
                    0.5 * (1.0 - alpha) * (std::log(x) + std::log(y)) - (k.a * x + k.b * y) / d;
  return lg;
}

inline double bivariate_density(const PairKernel& k, double alpha, double x, double y) {
  return std::exp(bivariate_log_density(k, alpha, x, y));
}

// ---- batches ----

enum class SamplerId : std::uint64_t { gamma = 1, bivariate = 2, halfint = 3, pairwise = 4 };

inline std::string sampler_name(SamplerId id) {
  switch (id) {
    case SamplerId::gamma: return "gamma";
    case SamplerId::bivariate: return "bivariate";
    case SamplerId::halfint: return "halfint_field";
    case SamplerId::pairwise: return "pairwise";
  }
  return "unknown";
}

struct SampleBatch {
  std::vector<double> points;
  std::vector<double> draws;  // row-major n_rep x n_points
  std::size_t n_rep = 0;
  std::uint64_t seed = 0;
  SamplerId sampler = SamplerId::gamma;

  std::size_t n_points() const { return points.size(); }
  double operator()(std::size_t r, std::size_t j) const { return draws[r * points.size() + j]; }
  double& operator()(std::size_t r, std::size_t j) { return draws[r * points.size() + j]; }
  const double* row(std::size_t r) const { return draws.data() + r * points.size(); }
};

inline SampleBatch make_batch(std::vector<double> pts, std::size_t n, std::uint64_t seed, SamplerId id) {
  SampleBatch b;
  b.points = std::move(pts);
  b.n_rep = n;
  b.seed = seed;
  b.sampler = id;
  b.draws.assign(n * b.points.size(), 0.0);
  return b;
}

// i.i.d. draws with density v^alpha x^{alpha-1} e^{-vx} / Gamma(alpha): v is a rate.
inline SampleBatch sample_gamma(double alpha, double v, std::size_t n, std::uint64_t seed, unsigned workers = 1) {
  if (!(alpha > 0.0) || !(v > 0.0)) throw parameter_error("sample_gamma needs alpha > 0 and v > 0");
  if (n == 0) throw parameter_error("sample_gamma needs n >= 1");
  auto b = make_batch({0.0}, n, seed, SamplerId::gamma);
  parallel_for(n, workers, [&](std::size_t r) {
    Rng rng(seed, static_cast<std::uint64_t>(SamplerId::gamma), r);
    b.draws[r] = rng.gamma(alpha) / v;
  });
  return b;
}

// One draw of (X(s), X(t)): negative-binomial mixture of independent gamma pairs.
inline void bivariate_draw(const PairKernel& k, double alpha, Rng& rng, double& x, double& y) {
  if (k.delta == 0.0) {
    const double xi = rng.gamma(alpha);
    x = k.b * xi;
    y = k.a * xi;
    return;
  }
  if (k.gamma_off == 0.0) {
    x = k.b * rng.gamma(alpha);
    y = k.a * rng.gamma(alpha);
    return;
  }
  const double p = k.delta / (k.a * k.b);
  const double n = rng.negative_binomial(alpha, p);
  x = rng.gamma(alpha + n) * k.delta / k.a;
  y = rng.gamma(alpha + n) * k.delta / k.b;
}

inline SampleBatch sample_bivariate(const PairKernel& k, double alpha, std::size_t n, std::uint64_t seed,
                                    unsigned workers = 1, std::vector<double> pts = {0.0, 1.0}) {
  if (!(alpha > 0.0)) throw parameter_error("alpha must be positive");
  if (n == 0) throw parameter_error("sample_bivariate needs n >= 1");
  if (k.gamma_off > 0.0 && k.a * k.b == 0.0) throw invalid_kernel("ab = 0 with gamma > 0");
  if (k.a < 0.0 || k.b < 0.0 || k.delta < 0.0) throw invalid_kernel("invalid pair kernel");
  auto b = make_batch(std::move(pts), n, seed, SamplerId::bivariate);
  parallel_for(n, workers, [&](std::size_t r) {
    Rng rng(seed, static_cast<std::uint64_t>(SamplerId::bivariate), r);
    bivariate_draw(k, alpha, rng, b.draws[2 * r], b.draws[2 * r + 1]);
  });
  return b;
}

// ---- Gaussian factor ----

struct GaussFactor {
  Matrix L;  // n x rank, L L^T = U
  bool pivoted = false;
};

inline constexpr double psd_clip = 1e-10;

// Diagonal-pivoted Cholesky. Pivots below 1e-13 of the largest diagonal end
// the factorization; any remaining diagonal below -1e-10 relative is rejected.
inline GaussFactor pivoted_cholesky(const Matrix& u) {
  const auto n = u.rows();
  Matrix a = u;
  std::vector<Eigen::Index> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
  const double scale = std::max(u.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (a(i, i) > a(p, p)) p = i;
    if (a(p, p) <= 1e-13 * scale) {
      for (Eigen::Index i = k; i < n; ++i)
        if (a(i, i) < -psd_clip * scale) throw not_psd("kernel matrix is not positive semidefinite on these points");
      break;
    }
    if (p != k) {
      a.row(k).swap(a.row(p));
      a.col(k).swap(a.col(p));
      std::swap(perm[k], perm[p]);
    }
    const double d = std::sqrt(a(k, k));
    a(k, k) = d;
    for (Eigen::Index i = k + 1; i < n; ++i) a(i, k) /= d;
    for (Eigen::Index j = k + 1; j < n; ++j) {
      const double ljk = a(j, k);
      for (Eigen::Index i = j; i < n; ++i) a(i, j) -= a(i, k) * ljk;
    }
    ++rank;
  }
  for (Eigen::Index i = rank; i < n; ++i)
    if (a(i, i) < -psd_clip * scale) throw not_psd("kernel matrix is not positive semidefinite on these points");
  GaussFactor g;
  g.pivoted = true;
  g.L = Matrix::Zero(n, rank);
  for (Eigen::Index j = 0; j < rank; ++j)
    for (Eigen::Index i = j; i < n; ++i) g.L(perm[i], j) = a(i, j);
  return g;
}

inline GaussFactor gaussian_factor(const Matrix& u) {
  Eigen::LLT<Matrix> llt(u);
  if (llt.info() == Eigen::Success) {
    Matrix l = llt.matrixL();
    const double scale = u.diagonal().maxCoeff();
    if (l.diagonal().minCoeff() > 1e-7 * std::sqrt(scale)) return {std::move(l), false};
  }
  return pivoted_cholesky(u);
}

inline bool half_integer(double alpha, int* k = nullptr) {
  const double twice = 2.0 * alpha;
  const double r = std::round(twice);
  if (r < 1.0 || std::fabs(twice - r) > 1e-12) return false;
  if (k) *k = static_cast<int>(r);
  return true;
}

// sum_{i<=k} G_i(t)^2 / 2 with G_i i.i.d. centered Gaussian with covariance u.
inline SampleBatch sample_halfint_field(const KernelSpec& kernel, int k, const std::vector<double>& pts,
                                        std::size_t n, std::uint64_t seed, unsigned workers = 1) {
  if (k < 1) throw parameter_error("sample_halfint_field needs k >= 1");
  if (n == 0 || pts.empty()) throw parameter_error("sample_halfint_field needs n >= 1 and points");
  Matrix u = kernel_matrix(kernel, pts);
  const double scale = std::max(u.cwiseAbs().maxCoeff(), 1e-300);
  if ((u - u.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw domain_error("sample_halfint_field needs a symmetric kernel on the points");
  u = 0.5 * (u + u.transpose());
  const GaussFactor fac = gaussian_factor(u);
  const auto np = static_cast<Eigen::Index>(pts.size());
  const auto rank = fac.L.cols();
  auto b = make_batch(pts, n, seed, SamplerId::halfint);
  if (rank == 0) return b;

  constexpr std::size_t block = 256;
  const std::size_t nblocks = (n + block - 1) / block;
  parallel_for(nblocks, workers, [&](std::size_t bi) {
    const std::size_t r0 = bi * block, r1 = std::min(n, r0 + block);
    const auto cols = static_cast<Eigen::Index>((r1 - r0) * k);
    Matrix z(rank, cols);
    for (std::size_t r = r0; r < r1; ++r) {
      Rng rng(seed, static_cast<std::uint64_t>(SamplerId::halfint), r);
      for (int i = 0; i < k; ++i) {
        const auto c = static_cast<Eigen::Index>((r - r0) * k + i);
        for (Eigen::Index q = 0; q < rank; ++q) z(q, c) = rng.normal();
      }
    }
    Matrix g = fac.L * z;
    for (std::size_t r = r0; r < r1; ++r)
      for (Eigen::Index t = 0; t < np; ++t) {
        double x = 0.0;
        for (int i = 0; i < k; ++i) {
          const double v = g(t, static_cast<Eigen::Index>((r - r0) * k + i));
          x += 0.5 * v * v;
        }
        b.draws[r * np + t] = x;
      }
  });
  return b;
}

enum class PathMode { joint, pairwise };

// Routes a spec to the exact sampler that supports it.
inline SampleBatch sample_path_grid(const PermanentalSpec& spec, std::size_t n, std::uint64_t seed,
                                    unsigned workers = 1, PathMode mode = PathMode::joint) {
  spec.validate();
  const auto& pts = spec.points;
  if (mode == PathMode::pairwise) {
    if (pts.size() < 2) throw parameter_error("pairwise mode needs at least two points");
    std::vector<double> cols;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      cols.push_back(pts[i]);
      cols.push_back(pts[i + 1]);
    }
    auto b = make_batch(cols, n, seed, SamplerId::pairwise);
    const std::size_t m = pts.size() - 1;
    std::vector<PairKernel> ks;
    for (std::size_t i = 0; i < m; ++i) ks.push_back(pair_kernel(spec, i, i + 1));
    parallel_for(n, workers, [&](std::size_t r) {
      Rng rng(seed, static_cast<std::uint64_t>(SamplerId::pairwise), r);
      for (std::size_t i = 0; i < m; ++i) bivariate_draw(ks[i], spec.alpha, rng, b(r, 2 * i), b(r, 2 * i + 1));
    });
    return b;
  }
  if (pts.size() == 1) {
    const double d = spec.kernel.eval(pts[0], pts[0]);
    auto b = sample_gamma(spec.alpha, 1.0, n, seed, workers);
    for (double& x : b.draws) x *= d;
    b.points = pts;
    return b;
  }
  if (pts.size() == 2) return sample_bivariate(pair_kernel(spec, 0, 1), spec.alpha, n, seed, workers, pts);
  int k = 0;
  if (half_integer(spec.alpha, &k)) {
    const Matrix u = spec.matrix();
    const double scale = std::max(u.cwiseAbs().maxCoeff(), 1e-300);
    if ((u - u.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw capability_error("no exact joint sampler for an asymmetric kernel on " + std::to_string(pts.size()) +
                             " points; supported: 2 points (any alpha), half-integer alpha with a symmetric "
                             "kernel, or pairwise mode");
    return sample_halfint_field(spec.kernel, k, pts, n, seed, workers);
  }
  throw capability_error("no exact sampler for alpha=" + std::to_string(spec.alpha) + " on " +
                         std::to_string(pts.size()) +
                         " points; supported: 2 points (any alpha), half-integer alpha with a symmetric kernel, "
                         "or pairwise mode");
}

}  // namespace permanental
