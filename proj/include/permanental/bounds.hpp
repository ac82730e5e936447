#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "permanental/calibration_table.hpp"
#include "permanental/envelope.hpp"
#include "permanental/errors.hpp"
#include "permanental/matrixcore.hpp"
#include "permanental/report.hpp"

namespace permanental {

// ---- increment and marginal tails ----

inline double tail_exponent(double alpha) { return std::max(4.0 * alpha - 2.0, 0.0); }

// C_alpha lambda^{(4 alpha - 2) v 0} e^{-lambda^2}, lambda >= 1. C_alpha comes
// from the shipped calibration table unless given explicitly.
inline double sqrt_increment_tail_bound(const PairKernel& k, double alpha, double lambda,
                                        std::optional<double> c_alpha = std::nullopt) {
  if (!(lambda >= 1.0)) throw domain_error("sqrt_increment_tail_bound needs lambda >= 1");
  if (k.sigma == 0.0) return 0.0;
  const double c = c_alpha ? *c_alpha : calibrated_c_alpha(alpha);
  return c * std::pow(lambda, tail_exponent(alpha)) * std::exp(-lambda * lambda);
}

// 2 lambda^{alpha-1} e^{-lambda} / Gamma(alpha), for lambda >= 2(alpha-1) v 0.
inline double marginal_tail_upper(double alpha, double lambda) {
  if (!(alpha > 0.0)) throw parameter_error("alpha must be positive");
  if (!(lambda > 0.0) || lambda < std::max(2.0 * (alpha - 1.0), 0.0))
    throw domain_error("marginal upper tail bound needs lambda >= 2(alpha-1) v 0 and lambda > 0");
  return 2.0 * std::pow(lambda, alpha - 1.0) * std::exp(-lambda) / boost::math::tgamma(alpha);
}

// One third of the upper bound, for lambda >= 2.
inline double marginal_tail_lower(double alpha, double lambda) {
  if (!(alpha > 0.0)) throw parameter_error("alpha must be positive");
  if (!(lambda >= 2.0)) throw domain_error("marginal lower tail bound needs lambda >= 2");
  return 2.0 * std::pow(lambda, alpha - 1.0) * std::exp(-lambda) / boost::math::tgamma(alpha) / 3.0;
}

struct TailPair {
  double upper, lower;
};

inline TailPair marginal_tail_bounds(double alpha, double lambda) {
  return {marginal_tail_upper(alpha, lambda), marginal_tail_lower(alpha, lambda)};
}

// ---- Orlicz psi_2 constants ----

namespace detail {

// Largest root of K y^n e^{-y^2} = 1, or 0 when there is none.
inline double orlicz_y0(double k, double n) {
  if (n == 0.0) return std::sqrt(std::log(k));
  auto g = [&](double y) { return std::log(k) + n * std::log(y) - y * y; };
  const double ystar = std::sqrt(n / 2.0);
  if (g(ystar) < 0.0) return 0.0;
  double lo = ystar, hi = ystar + 1.0;
  while (g(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Left side of the defining equation for c*; the root of orlicz_equation = 2.
// n_pow = 0: K^{1/c^2} c^2/(c^2-1).
// n_pow > 0: e^{y0^2/c^2} + (2K/c^2) int_{y0}^inf l (l^n + 1) e^{-l^2 (1-1/c^2)} dl.
inline double orlicz_equation(double k, double n_pow, double c) {
  const double c2 = c * c;
  if (n_pow == 0.0) return std::pow(k, 1.0 / c2) * c2 / (c2 - 1.0);
  const double y0 = detail::orlicz_y0(k, n_pow);
  const double b = 1.0 - 1.0 / c2;
  const double x0 = b * y0 * y0;
  // int_{y0}^inf l^{m} e^{-b l^2} dl = Gamma((m+1)/2, b y0^2) / (2 b^{(m+1)/2})
  const double i_pow = boost::math::tgamma((n_pow + 2.0) / 2.0, x0) / (2.0 * std::pow(b, (n_pow + 2.0) / 2.0));
  const double i_lin = std::exp(-x0) / (2.0 * b);
  return std::exp(y0 * y0 / c2) + 2.0 * k / c2 * (i_pow + i_lin);
}

// c* certifying ||Z||_{psi_2} <= c* when P(|Z| >= l) <= K (l^n + 1) e^{-l^2}
// (n_pow > 0) or K e^{-l^2} (n_pow = 0). Bisection on (1, 1e3).
inline double orlicz_psi2_const(double k, double n_pow) {
  if (!(k >= 1.0)) throw parameter_error("orlicz_psi2_const needs K >= 1");
  if (!(n_pow >= 0.0)) throw parameter_error("orlicz_psi2_const needs n_pow >= 0");
  double lo = 1.0, hi = 1e3;
  if (!(orlicz_equation(k, n_pow, hi) < 2.0)) throw numeric_error("orlicz_psi2_const: no root in (1, 1e3)");
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (orlicz_equation(k, n_pow, mid) > 2.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Smallest c with mean(exp(Z^2/c^2) - 1) <= 1.
inline double empirical_psi2_norm(const std::vector<double>& z) {
  if (z.empty()) throw parameter_error("empirical_psi2_norm needs samples");
  double m = 0.0;
  for (double x : z) m = std::max(m, std::fabs(x));
  if (m == 0.0) return 0.0;
  const double n = static_cast<double>(z.size());
  auto excess = [&](double c) {
    double s = 0.0;
    for (double x : z) {
      const double e = (x / c) * (x / c);
      if (e > 700.0) return std::numeric_limits<double>::infinity();
      s += std::exp(e) - 1.0;
    }
    return s / n;
  };
  double lo = m / std::sqrt(std::log(n + 1.0)), hi = m / std::sqrt(std::log(2.0));
  if (excess(lo) <= 1.0) return lo;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

// ---- chaining ----

// Tail function F through log F, so the n(p)^2 F(kappa(p)) products can be
// formed without overflow.
class TailFn {
 public:
  static TailFn zero() {
    return TailFn([](double) { return -std::numeric_limits<double>::infinity(); });
  }
  // C l^q e^{-l^2}
  static TailFn gaussian(double c = 1.0, double q = 0.0) {
    return TailFn([c, q](double l) { return std::log(c) + (q == 0.0 ? 0.0 : q * std::log(l)) - l * l; });
  }
  static TailFn custom(std::function<double(double)> f) {
    return TailFn([f](double l) { return std::log(f(l)); });
  }
  double log_value(double l) const { return log_f_(l); }
  double operator()(double l) const { return std::exp(log_f_(l)); }

 private:
  explicit TailFn(std::function<double(double)> lf) : log_f_(std::move(lf)) {}
  std::function<double(double)> log_f_;
};

struct ChainingParams {
  double n = 2.0;                       // base, n(p) = n^{2^p}
  double a = 1.0;                       // threshold multiplier at scale S
  std::function<double(int)> kappa;     // kappa(p) >= 1
  double S = 1.0;                       // horizon
};

struct ChainingResult {
  double threshold = 0.0;
  double probability = 0.0;
  bool diverged = false;
  int terms = 0;
};

// a phi(S) + sum_p kappa(p) phi(S/n(p))  and  n^2 F(a) + sum_p n(p)^2 F(kappa(p)).
inline ChainingResult chaining_tail_bound(const TailFn& f, const EnvelopeFn& phi, const ChainingParams& prm,
                                          int max_terms = 1000) {
  if (!(prm.n >= 2.0)) throw parameter_error("chaining needs n >= 2");
  if (!prm.kappa) throw parameter_error("chaining needs kappa");
  ChainingResult r;
  const double ln = std::log(prm.n), ls = std::log(prm.S);
  r.threshold = prm.a * phi.at_log(ls);
  r.probability = std::exp(2.0 * ln + f.log_value(prm.a));
  bool thr_done = false, prob_done = false;
  for (int p = 1; p <= max_terms; ++p) {
    const double k = prm.kappa(p);
    if (!(k >= 1.0)) throw parameter_error("kappa(p) must be >= 1");
    const double lnp = std::ldexp(ln, p);  // log n(p) = 2^p log n
    const double tt = thr_done ? 0.0 : k * phi.at_log(ls - lnp);
    const double lf = f.log_value(k);
    const double tp = prob_done ? 0.0 : (std::isinf(lf) && lf < 0 ? 0.0 : std::exp(2.0 * lnp + lf));
    r.threshold += tt;
    r.probability += tp;
    r.terms = p;
    // Super-exponential schedules make the tail after a term below 1e-17
    // negligible; require two consecutive small terms to be safe.
    thr_done = thr_done || (p > 1 && tt <= 1e-17 * std::max(r.threshold, 1e-300));
    prob_done = prob_done || (p > 1 && tp <= 1e-17 && tp <= 1e-17 * std::max(r.probability, 1e-300));
    if (!std::isfinite(r.probability) || r.probability >= 1.0) {
      r.diverged = true;
      r.probability = 1.0;
      prob_done = true;
    }
    if (thr_done && prob_done) break;
    if (!std::isfinite(ls - lnp)) break;
  }
  if (!thr_done) r.threshold = std::numeric_limits<double>::infinity();
  if (!prob_done) {
    r.diverged = true;
    r.probability = 1.0;
  }
  return r;
}

// ---- entropy integral ----

struct JResult {
  double value = 0.0;
  bool converged = true;
  std::size_t grid = 0;
};

// sup_t int_0^a (log 1/mu(B(t,u)))^{1/2} du on a finite metric space. Ball
// masses are step functions of u, so the integral is summed exactly.
inline JResult entropy_integral_J(const Matrix& d, const std::vector<double>& mu, double a) {
  const auto n = d.rows();
  if (d.cols() != n || static_cast<Eigen::Index>(mu.size()) != n) throw parameter_error("entropy_integral_J: size mismatch");
  if (!(a >= 0.0)) throw domain_error("entropy_integral_J needs a >= 0");
  JResult r;
  r.grid = static_cast<std::size_t>(n);
  if (a == 0.0) return r;
  std::vector<std::pair<double, double>> row(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index j = 0; j < n; ++j) row[j] = {d(t, j), mu[j]};
    std::sort(row.begin(), row.end());
    double mass = 0.0, u = 0.0, acc = 0.0;
    std::size_t j = 0;
    while (j < row.size() && row[j].first <= 0.0) mass += row[j++].second;
    while (u < a) {
      const double next = j < row.size() ? std::min(row[j].first, a) : a;
      if (next > u) {
        if (mass <= 0.0) {
          r.value = std::numeric_limits<double>::infinity();
          r.converged = false;
          return r;
        }
        acc += (next - u) * std::sqrt(std::max(0.0, -std::log(std::min(mass, 1.0))));
        u = next;
      }
      if (j < row.size() && row[j].first <= u) {
        const double dj = row[j].first;
        while (j < row.size() && row[j].first == dj) mass += row[j++].second;
      } else if (j >= row.size()) {
        break;
      }
    }
    r.value = std::max(r.value, acc);
  }
  return r;
}

// Uniform-weight grid proxy of [lo, hi] with metric dist, doubled from n0
// points until the value changes by less than 0.5%.
inline JResult entropy_integral_J_refined(const std::function<double(double, double)>& dist, double lo, double hi,
                                          double a, std::size_t n0 = 256, std::size_t n_max = 4096) {
  JResult prev;
  bool have = false;
  for (std::size_t n = n0; n <= n_max; n *= 2) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * (n == 1 ? 0.0 : double(i) / double(n - 1));
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = dist(x[i], x[j]);
    std::vector<double> mu(n, 1.0 / double(n));
    JResult cur = entropy_integral_J(d, mu, a);
    if (have && prev.value > 0.0 && std::fabs(cur.value - prev.value) < 0.005 * prev.value) {
      cur.converged = true;
      return cur;
    }
    if (have && prev.value == 0.0 && cur.value == 0.0) return cur;
    prev = cur;
    have = true;
  }
  prev.converged = false;
  return prev;
}

// ---- integrals over log scales and envelopes ----

struct LogScaleIntegral {
  double value = 0.0;
  double error = 0.0;
  bool finite = true;
};

// int_{v0}^inf g(v) dv for v0 > 0 via v = v0/w on (0,1]. Algebraic tails
// become endpoint singularities, which tanh-sinh resolves; a non-integrable
// tail shows up as an error estimate that will not settle.
inline LogScaleIntegral log_scale_integral(const std::function<double(double)>& g, double v0, double tol = 1e-10) {
  if (!(v0 > 0.0)) throw domain_error("log_scale_integral needs v0 > 0");
  boost::math::quadrature::tanh_sinh<double> ts(12);
  auto f = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double v = v0 / w;
    if (!std::isfinite(v)) return 0.0;
    const double gv = g(v);
    if (gv == 0.0) return 0.0;
    return gv * v * (v / v0);  // = g(v) v0 / w^2 without overflowing w^2
  };
  LogScaleIntegral r;
  double l1 = 0.0;
  try {
    r.value = ts.integrate(f, 0.0, 1.0, tol, &r.error, &l1);
  } catch (const std::exception&) {
    r.finite = false;
    r.value = std::numeric_limits<double>::infinity();
    return r;
  }
  if (!std::isfinite(r.value) || r.error > 1e-6 * std::fabs(r.value)) {
    r.finite = false;
    r.value = std::numeric_limits<double>::infinity();
  }
  return r;
}

// int_0^{U} phi(c u) / (u (log 1/u)^{1/2}) du for 0 < U < 1
inline LogScaleIntegral envelope_integral(const EnvelopeFn& phi, double c, double upper) {
  if (!(upper > 0.0 && upper < 1.0)) throw domain_error("envelope_integral needs 0 < U < 1");
  const double lc = std::log(c);
  return log_scale_integral([&](double v) { return phi.at_log(lc - v) / std::sqrt(v); }, -std::log(upper));
}

// Integrability of phi(u)/(u (log 1/u)^{1/2}) on (0, 1/2].
inline bool envelope_integrable(const EnvelopeFn& phi) { return envelope_integral(phi, 1.0, 0.5).finite; }

enum class EnvelopeKind { tau_local, tau_infinity, theta };

inline double envelope_eval(EnvelopeKind kind, const EnvelopeFn& phi, double h) {
  const double ee = std::exp(-std::numbers::e);
  if (kind == EnvelopeKind::tau_infinity) {
    if (!(h > std::numbers::e)) throw domain_error("tau_infinity needs T > e");
  } else if (!(h > 0.0 && h < ee)) {
    throw domain_error("tau_local and theta need 0 < h < e^{-e}");
  }
  if (kind == EnvelopeKind::theta) {
    const auto I = envelope_integral(phi, 1.0, h * h);
    if (!I.finite) throw numeric_error("envelope integral diverges: phi fails the integrability condition");
    return I.value + phi(h) * std::sqrt(std::log(1.0 / h));
  }
  const auto I = envelope_integral(phi, h, 0.5);
  if (!I.finite) throw numeric_error("envelope integral diverges: phi fails the integrability condition");
  const double ll = kind == EnvelopeKind::tau_local ? std::log(std::log(1.0 / h)) : std::log(std::log(h));
  return phi(h) * std::sqrt(ll) + I.value / std::log(2.0);
}

// ---- pair kernel inequalities ----

inline BoundReport kernel_inequality_audit(const PairKernel& k) {
  BoundReport r;
  r.name = "kernel_inequality_audit";
  const double scale = std::max({k.a, k.b, 1e-300});
  const double slack = 1e-12 * scale;
  const double am = 0.5 * (k.a + k.b), gm = std::sqrt(k.a * k.b);
  const double m_amgm = am - gm, m_gmg = gm - k.gamma_off;
  const double m_det_lo = k.delta;
  const double m_det_hi = std::min(k.a, k.b) * k.sigma * k.sigma - k.delta;
  r.values = {{"amgm_margin", m_amgm}, {"gm_gamma_margin", m_gmg}, {"delta_margin", m_det_lo},
              {"delta_upper_margin", m_det_hi}};
  if (m_amgm < -slack) r.fail("(a+b)/2 >= sqrt(ab) violated");
  if (m_gmg < -slack) r.fail("sqrt(ab) >= gamma violated");
  if (m_det_lo < -slack * scale) r.fail("delta >= 0 violated");
  if (m_det_hi < -slack * scale) r.fail("delta <= (a^b) sigma^2 violated");
  double worst = std::min({m_amgm, m_gmg, m_det_lo / scale, m_det_hi / scale});
  if (k.delta > 0.0 && k.sigma > 0.0) {
    const double ma = std::sqrt(k.a) - std::fabs(k.a - k.gamma_off) / k.sigma;
    const double mb = std::sqrt(k.b) - std::fabs(k.b - k.gamma_off) / k.sigma;
    r.values.push_back({"plac_a_margin", ma});
    r.values.push_back({"plac_b_margin", mb});
    if (ma < -1e-9 * std::sqrt(scale)) r.fail("|a-gamma|/sigma <= sqrt(a) violated");
    if (mb < -1e-9 * std::sqrt(scale)) r.fail("|b-gamma|/sigma <= sqrt(b) violated");
    worst = std::min({worst, ma, mb});
  } else {
    r.values.push_back({"plac_skipped", 1.0});
  }
  r.worst = worst;
  return r;
}

// ---- lower-bound conditions ----

struct LowerBoundConditions {
  double eps1 = 0.0, eps2 = 0.0, phi_star = 0.0, predicted_constant = 1.0;

  nlohmann::json to_json() const {
    return {{"eps1", eps1}, {"eps2", eps2}, {"phi_star", phi_star}, {"predicted_constant", predicted_constant}};
  }
};

inline LowerBoundConditions lower_bound_conditions(const Matrix& ut) {
  const auto n = ut.rows();
  if (n < 2 || ut.cols() != n) throw domain_error("lower_bound_conditions needs a square matrix with n >= 2");
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::fabs(ut(i, i) - 1.0) > 1e-12) throw parameter_error("lower_bound_conditions needs a unit diagonal");
  double e1 = -std::numeric_limits<double>::infinity();
  double phi2 = std::numeric_limits<double>::infinity();
  double asym = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = ut(i, j) + ut(j, i);
      e1 = std::max(e1, s);
      phi2 = std::min(phi2, 2.0 - s);
      asym = std::max(asym, std::fabs(ut(i, j) - ut(j, i)));
    }
  LowerBoundConditions c;
  c.eps1 = e1;
  c.phi_star = std::sqrt(std::max(phi2, 0.0));
  c.eps2 = phi2 > 0.0 ? asym / phi2 : (asym > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  c.predicted_constant = 1.0 - 3.0 * (c.eps1 + c.eps2);
  return c;
}

}  // namespace permanental
