#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "permanental/errors.hpp"
#include "permanental/sampling.hpp"

namespace permanental {

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
};

// Sequential two-pass mean and standard error; summation order is the
// replicate order, so results do not depend on scheduling.
inline MeanSE mean_se(const std::vector<double>& v) {
  MeanSE m;
  if (v.empty()) return m;
  double s = 0.0;
  for (double x : v) s += x;
  m.mean = s / static_cast<double>(v.size());
  if (v.size() < 2) return m;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return m;
}

// Mean and standard error of exp(-<s, X>) over the batch.
inline MeanSE empirical_laplace(const SampleBatch& b, const std::vector<double>& s) {
  if (s.size() != b.n_points()) throw parameter_error("s must have one entry per batch column");
  std::vector<double> v(b.n_rep);
  for (std::size_t r = 0; r < b.n_rep; ++r) {
    double e = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) e += s[j] * b(r, j);
    v[r] = std::exp(-e);
  }
  return mean_se(v);
}

inline double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Asymptotic 1% critical value of the one-sample Kolmogorov-Smirnov statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

inline double gamma_cdf(double alpha, double rate, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(alpha, rate * x);
}

inline double chi2_pvalue(double stat, double dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + m);
  return 0.5 * (lo + hi);
}

// Least-squares slope of y on x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace permanental
