#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "permanental/envelope.hpp"
#include "permanental/errors.hpp"
#include "permanental/functions.hpp"
#include "permanental/report.hpp"

namespace permanental {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double c_gamma_beta(double g, double beta) {
  if (!(g > 0.0 && g < 1.0)) throw parameter_error("C_{gamma,beta} needs 0 < gamma < 1");
  if (!(std::fabs(beta) <= 1.0)) throw parameter_error("C_{gamma,beta} needs |beta| <= 1");
  const double pi = std::numbers::pi;
  const double tn = std::tan((g + 1.0) * pi / 2.0);
  return -std::sin((g + 1.0) * pi / 2.0) * boost::math::tgamma(-g) / (pi * (1.0 + beta * beta * tn * tn));
}

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

namespace family {

struct FBMQ {
  double gamma, beta;
};
struct LevyExpKilled {
  double rho, gamma, beta;
};
// e^{-lambda|s-t|} + f(t)
struct ExpKilled {
  double lambda;
  ScalarFn f;
};
// min(s,t) + f(t); with_origin adds the point 0 with u(0,t)=f(t), u(s,0)=u(0,0)=1
struct BrownianHit0 {
  ScalarFn f;
  bool with_origin;
};
// points are state indices: 0 is the cemetery/rebirth point, 1..n the states
struct Rebirth {
  Matrix base;
  std::vector<double> mu;
  Matrix full;  // (n+1)x(n+1), filled on construction
};
// indices 0,1,2,...
struct DiscreteSeq {
  SeqFn lambda, f, g;
};
struct ExplicitMatrix {
  std::vector<double> points;
  Matrix matrix;
};

}  // namespace family

class KernelSpec;
using KernelPtr = std::shared_ptr<const KernelSpec>;

namespace family {
struct Normalized {
  KernelPtr inner;
};
}  // namespace family

double levy_exp_killed_eval(double rho, double g, double beta, double x, double y);

class KernelSpec {
 public:
  using Family = std::variant<family::FBMQ, family::LevyExpKilled, family::ExpKilled, family::BrownianHit0,
                              family::Rebirth, family::DiscreteSeq, family::ExplicitMatrix, family::Normalized>;

  static KernelSpec fbmq(double g, double beta) {
    if (!(g > 0.0 && g < 1.0)) throw parameter_error("FBMQ needs 0 < gamma < 1");
    if (!(std::fabs(beta) <= 1.0)) throw parameter_error("FBMQ needs |beta| <= 1");
    return KernelSpec(family::FBMQ{g, beta});
  }

  static KernelSpec levy_exp_killed(double rho, double g, double beta) {
    if (!(rho > 0.0)) throw parameter_error("LevyExpKilled needs rho > 0");
    if (!(g > 0.0 && g < 1.0)) throw parameter_error("LevyExpKilled needs 0 < gamma < 1");
    if (!(std::fabs(beta) <= 1.0)) throw parameter_error("LevyExpKilled needs |beta| <= 1");
    return KernelSpec(family::LevyExpKilled{rho, g, beta});
  }

  // f is spot-checked on a 64-point grid of [0, window]: f >= 0 and f'' <= lambda^2 f.
  static KernelSpec exp_killed(double lambda, ScalarFn f, double window = 10.0) {
    if (!(lambda > 0.0)) throw parameter_error("ExpKilled needs lambda > 0");
    const double tol = f.kind() == ScalarFn::Kind::custom ? 1e-5 : 1e-12;
    for (int i = 0; i < 64; ++i) {
      const double t = window * i / 63.0;
      const double v = f(t);
      if (!(v >= 0.0)) throw parameter_error("ExpKilled: f must be nonnegative");
      if (f.second_derivative(t) > lambda * lambda * v + tol * (1.0 + std::fabs(v)))
        throw parameter_error("ExpKilled: f'' <= lambda^2 f fails at t=" + std::to_string(t));
    }
    return KernelSpec(family::ExpKilled{lambda, std::move(f)});
  }

  // f is spot-checked on (0, window]: f >= 0 and concave.
  static KernelSpec brownian_hit0(ScalarFn f, bool with_origin = false, double window = 10.0) {
    const double tol = f.kind() == ScalarFn::Kind::custom ? 1e-5 : 1e-12;
    for (int i = 1; i <= 64; ++i) {
      const double t = window * i / 64.0;
      const double v = f(t);
      if (!(v >= 0.0)) throw parameter_error("BrownianHit0: f must be nonnegative");
      if (f.second_derivative(t) > tol * (1.0 + std::fabs(v)))
        throw parameter_error("BrownianHit0: f must be concave");
    }
    return KernelSpec(family::BrownianHit0{std::move(f), with_origin});
  }

  // Green matrix U of a finite chain and rebirth measure mu. Index 0 is the
  // star point; u(x,y)=U(x,y)+f(y), u(x,*)=u(*,*)=1, u(*,y)=f(y), f = mu^T U.
  static KernelSpec rebirth(const Matrix& base, const std::vector<double>& mu) {
    const auto n = base.rows();
    if (base.cols() != n || static_cast<Eigen::Index>(mu.size()) != n)
      throw parameter_error("Rebirth: U must be square and mu must match its size");
    for (double m : mu)
      if (!(m >= 0.0)) throw parameter_error("Rebirth: mu must be nonnegative");
    Vector muv = Eigen::Map<const Vector>(mu.data(), n);
    Vector f = base.transpose() * muv;
    Matrix full(n + 1, n + 1);
    full(0, 0) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) full(0, j + 1) = f(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      full(i + 1, 0) = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) full(i + 1, j + 1) = base(i, j) + f(j);
    }
    return KernelSpec(family::Rebirth{base, mu, std::move(full)});
  }

  static KernelSpec discrete_seq(SeqFn lambda, SeqFn f, SeqFn g) {
    return KernelSpec(family::DiscreteSeq{std::move(lambda), std::move(f), std::move(g)});
  }

  static KernelSpec explicit_matrix(std::vector<double> points, Matrix m) {
    if (m.rows() != m.cols() || m.rows() != static_cast<Eigen::Index>(points.size()))
      throw parameter_error("ExplicitMatrix: matrix must be square and match the points");
    return KernelSpec(family::ExplicitMatrix{std::move(points), std::move(m)});
  }

  static KernelSpec explicit_matrix(Matrix m) {
    std::vector<double> pts(m.rows());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = static_cast<double>(i);
    return explicit_matrix(std::move(pts), std::move(m));
  }

  const Family& family() const { return fam_; }

  std::string name() const {
    static const char* names[] = {"fbmq", "levy_exp_killed", "exp_killed", "brownian_hit0",
                                  "rebirth", "discrete_seq", "explicit", "normalized"};
    return names[fam_.index()];
  }

  double operator()(double s, double t) const { return eval(s, t); }

  double eval(double s, double t) const {
    return std::visit([&](const auto& k) { return eval_impl(k, s, t); }, fam_);
  }

  // Symmetry known from the parameters. Explicit matrices are checked entrywise.
  bool symmetric() const {
    return std::visit(
        [](const auto& k) -> bool {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, family::FBMQ> || std::is_same_v<T, family::LevyExpKilled>)
            return k.beta == 0.0;
          else if constexpr (std::is_same_v<T, family::ExpKilled>)
            return k.f.kind() == ScalarFn::Kind::zero;
          else if constexpr (std::is_same_v<T, family::BrownianHit0>)
            return k.f.kind() == ScalarFn::Kind::zero && !k.with_origin;
          else if constexpr (std::is_same_v<T, family::Rebirth>)
            return (k.full - k.full.transpose()).cwiseAbs().maxCoeff() == 0.0;
          else if constexpr (std::is_same_v<T, family::DiscreteSeq>)
            return k.f.to_json() == k.g.to_json();
          else if constexpr (std::is_same_v<T, family::ExplicitMatrix>)
            return (k.matrix - k.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0;
          else
            return k.inner->symmetric();
        },
        fam_);
  }

  nlohmann::json to_json() const;
  static KernelSpec from_json(const nlohmann::json& j);

 private:
  explicit KernelSpec(Family f) : fam_(std::move(f)) {}

  static double eval_impl(const family::FBMQ& k, double x, double y) {
    const double c = c_gamma_beta(k.gamma, k.beta);
    const double g = k.gamma;
    const double ax = std::pow(std::fabs(x), g), ay = std::pow(std::fabs(y), g);
    const double axy = std::pow(std::fabs(x - y), g);
    const double r = c * (ax + ay - axy);
    const double h = k.beta * c * (sgn(x) * ax - sgn(y) * ay - sgn(x - y) * axy);
    return r + h;
  }

  static double eval_impl(const family::LevyExpKilled& k, double x, double y) {
    return levy_exp_killed_eval(k.rho, k.gamma, k.beta, x, y);
  }

  static double eval_impl(const family::ExpKilled& k, double s, double t) {
    if (s < 0.0 || t < 0.0) throw domain_error("ExpKilled is defined for s,t >= 0");
    return std::exp(-k.lambda * std::fabs(s - t)) + k.f(t);
  }

  static double eval_impl(const family::BrownianHit0& k, double s, double t) {
    if (s < 0.0 || t < 0.0) throw domain_error("BrownianHit0 is defined for s,t >= 0");
    if (s == 0.0 || t == 0.0) {
      if (!k.with_origin) throw domain_error("BrownianHit0 at 0 needs with_origin");
      if (s == 0.0 && t > 0.0) return k.f(t);
      return 1.0;
    }
    return std::min(s, t) + k.f(t);
  }

  static Eigen::Index index_of(double s, Eigen::Index n, const char* who) {
    if (s < 0.0 || s != std::floor(s) || s >= static_cast<double>(n))
      throw domain_error(std::string(who) + ": point must be an integer index in range");
    return static_cast<Eigen::Index>(s);
  }

  static double eval_impl(const family::Rebirth& k, double s, double t) {
    const auto n = k.full.rows();
    return k.full(index_of(s, n, "Rebirth"), index_of(t, n, "Rebirth"));
  }

  static double eval_impl(const family::DiscreteSeq& k, double s, double t) {
    const auto big = std::numeric_limits<Eigen::Index>::max();
    const auto j = index_of(s, big, "DiscreteSeq");
    const auto m = index_of(t, big, "DiscreteSeq");
    if (j == 0 && m == 0) return 2.0;
    if (m == 0) return 1.0 + k.f(static_cast<int>(j));
    if (j == 0) return 1.0 + k.g(static_cast<int>(m));
    return (j == m ? k.lambda(static_cast<int>(j)) : 0.0) + 1.0 +
           k.f(static_cast<int>(j)) * k.g(static_cast<int>(m));
  }

  static double eval_impl(const family::ExplicitMatrix& k, double s, double t) {
    auto find = [&](double p) {
      for (std::size_t i = 0; i < k.points.size(); ++i)
        if (k.points[i] == p) return static_cast<Eigen::Index>(i);
      throw domain_error("ExplicitMatrix: point not in the matrix index set");
    };
    return k.matrix(find(s), find(t));
  }

  static double eval_impl(const family::Normalized& k, double s, double t) {
    const double ss = k.inner->eval(s, s), tt = k.inner->eval(t, t);
    if (ss <= 0.0 || tt <= 0.0) throw domain_error("normalize: u(t,t) must be positive");
    if (s == t) return 1.0;
    return k.inner->eval(s, t) / std::sqrt(ss * tt);
  }

  Family fam_;

  friend KernelSpec normalize(const KernelSpec& k);
};

inline KernelSpec normalize(const KernelSpec& k) {
  return KernelSpec(family::Normalized{std::make_shared<const KernelSpec>(k)});
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  if (n == 0) throw parameter_error("empty matrix");
  const auto m = static_cast<Eigen::Index>(j.at(0).size());
  Matrix a(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(j.at(i).size()) != m) throw parameter_error("ragged matrix");
    for (Eigen::Index c = 0; c < m; ++c) a(i, c) = j.at(i).at(c).get<double>();
  }
  return a;
}

inline nlohmann::json matrix_to_json(const Matrix& a) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(i, c));
    j.push_back(std::move(row));
  }
  return j;
}

inline nlohmann::json KernelSpec::to_json() const {
  using nlohmann::json;
  json params = std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, family::FBMQ>)
          return {{"gamma", k.gamma}, {"beta", k.beta}};
        else if constexpr (std::is_same_v<T, family::LevyExpKilled>)
          return {{"rho", k.rho}, {"gamma", k.gamma}, {"beta", k.beta}};
        else if constexpr (std::is_same_v<T, family::ExpKilled>)
          return {{"lambda", k.lambda}, {"f", k.f.to_json()}};
        else if constexpr (std::is_same_v<T, family::BrownianHit0>)
          return {{"f", k.f.to_json()}, {"with_origin", k.with_origin}};
        else if constexpr (std::is_same_v<T, family::Rebirth>)
          return {{"base", matrix_to_json(k.base)}, {"mu", k.mu}};
        else if constexpr (std::is_same_v<T, family::DiscreteSeq>)
          return {{"lambda", k.lambda.to_json()}, {"f", k.f.to_json()}, {"g", k.g.to_json()}};
        else if constexpr (std::is_same_v<T, family::ExplicitMatrix>)
          return {{"points", k.points}, {"matrix", matrix_to_json(k.matrix)}};
        else
          return {{"inner", k.inner->to_json()}};
      },
      fam_);
  return {{"family", name()}, {"params", params}};
}

inline KernelSpec KernelSpec::from_json(const nlohmann::json& j) {
  const std::string f = j.at("family").get<std::string>();
  const nlohmann::json p = j.contains("params") ? j.at("params") : nlohmann::json::object();
  if (f == "fbmq") return fbmq(p.at("gamma").get<double>(), p.value("beta", 0.0));
  if (f == "levy_exp_killed")
    return levy_exp_killed(p.at("rho").get<double>(), p.at("gamma").get<double>(), p.value("beta", 0.0));
  if (f == "exp_killed")
    return exp_killed(p.at("lambda").get<double>(),
                      p.contains("f") ? ScalarFn::from_json(p.at("f")) : ScalarFn::zero());
  if (f == "brownian_hit0")
    return brownian_hit0(p.contains("f") ? ScalarFn::from_json(p.at("f")) : ScalarFn::zero(),
                         p.value("with_origin", false));
  if (f == "rebirth")
    return rebirth(matrix_from_json(p.at("base")), p.at("mu").get<std::vector<double>>());
  if (f == "discrete_seq")
    return discrete_seq(SeqFn::from_json(p.at("lambda")), SeqFn::from_json(p.at("f")),
                        SeqFn::from_json(p.at("g")));
  if (f == "explicit") {
    Matrix m = matrix_from_json(p.at("matrix"));
    if (p.contains("points")) return explicit_matrix(p.at("points").get<std::vector<double>>(), m);
    return explicit_matrix(m);
  }
  if (f == "normalized") return normalize(from_json(p.at("inner")));
  throw parameter_error("unknown kernel family '" + f + "'");
}

inline Matrix kernel_matrix(const KernelSpec& k, const std::vector<double>& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = k.eval(pts[i], pts[j]);
  return m;
}

// ---- Levy process killed at an exponential time ----

namespace detail {

struct LevyIntegrand {
  double rho, g, tb;  // tb = beta tan(gamma pi / 2)
  // Re(rho+psi)/|rho+psi|^2 and Im(psi)/|rho+psi|^2 at lambda > 0
  std::pair<double, double> parts(double l) const {
    const double p = std::pow(l, g + 1.0);
    if (p > 1e150) {
      const double q = 1.0 / (p * (1.0 + tb * tb));
      return {q, -tb * q};
    }
    const double re = rho + p, im = -tb * p;
    const double m2 = re * re + im * im;
    return {re / m2, im / m2};
  }
};

// Integral over [a, infinity) of the re (which=0) or im (which=1) part,
// through lambda = a / w. The algebraic decay becomes an integrable endpoint
// singularity w^{gamma-1} at w=0, which tanh-sinh handles; near w=0 the
// integrand is evaluated from its leading power so nothing overflows.
inline double algebraic_tail(const LevyIntegrand& I, int which, double a, double tol, double* err) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double la = std::log(a);
  auto f = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double lw = std::log(w);
    const double lp = (I.g + 1.0) * (la - lw);
    if (lp > 300.0) {
      const double q = std::exp(la - 2.0 * lw - lp) / (1.0 + I.tb * I.tb);
      return which == 0 ? q : -I.tb * q;
    }
    const auto pr = I.parts(a / w);
    return (which == 0 ? pr.first : pr.second) * a / (w * w);
  };
  double l1 = 0.0;
  return ts.integrate(f, 0.0, 1.0, tol, err, &l1);
}

}  // namespace detail

// u_{rho;gamma,beta}(x,y): the cos panel uses adaptive Gauss-Kronrod on
// [0,1] and [1,Lambda] with Lambda = max(1, 1/|x-y|); beyond Lambda the
// oscillatory tail goes to Ooura's double-exponential Fourier rule.
inline double levy_exp_killed_eval(double rho, double g, double beta, double x, double y) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(rho > 0.0)) throw parameter_error("LevyExpKilled needs rho > 0");
  if (!(g > 0.0 && g < 1.0)) throw parameter_error("LevyExpKilled needs 0 < gamma < 1");
  if (!(std::fabs(beta) <= 1.0)) throw parameter_error("LevyExpKilled needs |beta| <= 1");
  const detail::LevyIntegrand I{rho, g, beta * std::tan(g * std::numbers::pi / 2.0)};
  const double d = x - y;
  const double tol = 1e-10;
  double err = 0.0, total_err = 0.0;

  auto re_part = [&](double l) { return I.parts(l).first; };
  auto im_part = [&](double l) { return I.parts(l).second; };

  if (d == 0.0) {
    double v = gauss_kronrod<double, 61>::integrate(re_part, 0.0, 1.0, 15, tol, &err);
    total_err += err;
    v += detail::algebraic_tail(I, 0, 1.0, tol, &err);
    total_err += err;
    if (!(std::isfinite(v)) || total_err > 1e-7 * std::fabs(v))
      throw numeric_error("levy_exp_killed_eval: diagonal quadrature did not converge (err=" +
                          std::to_string(total_err) + ")");
    return v / std::numbers::pi;
  }

  const double w = std::fabs(d);
  const double sd = sgn(d);
  const double big = std::max(1.0, 1.0 / w);
  auto cos_f = [&](double l) { return std::cos(l * w) * re_part(l); };
  auto sin_f = [&](double l) { return sd * std::sin(l * w) * im_part(l); };

  double c = gauss_kronrod<double, 61>::integrate(cos_f, 0.0, 1.0, 15, tol, &err);
  total_err += err;
  double s = gauss_kronrod<double, 61>::integrate(sin_f, 0.0, 1.0, 15, tol, &err);
  total_err += err;
  if (big > 1.0) {
    c += gauss_kronrod<double, 61>::integrate(cos_f, 1.0, big, 20, tol, &err);
    total_err += err;
    s += gauss_kronrod<double, 61>::integrate(sin_f, 1.0, big, 20, tol, &err);
    total_err += err;
  }

  // Tail: cos(w(L+t)) = cos(wL)cos(wt) - sin(wL)sin(wt), same for sin.
  thread_local boost::math::quadrature::ooura_fourier_cos<double> oc(1e-11);
  thread_local boost::math::quadrature::ooura_fourier_sin<double> os(1e-11);
  auto re_sh = [&](double t) { return re_part(big + t); };
  auto im_sh = [&](double t) { return im_part(big + t); };
  const double cw = std::cos(w * big), sw = std::sin(w * big);
  auto [rc, ec] = oc.integrate(re_sh, w);
  auto [rs, es] = os.integrate(re_sh, w);
  c += cw * rc - sw * rs;
  double tail_err = ec * std::fabs(rc) + es * std::fabs(rs);
  if (beta != 0.0) {
    auto [ic, eic] = oc.integrate(im_sh, w);
    auto [is, eis] = os.integrate(im_sh, w);
    s += sd * (sw * ic + cw * is);
    tail_err += eic * std::fabs(ic) + eis * std::fabs(is);
  } else {
    s = 0.0;
  }
  total_err += tail_err;
  const double v = (c + s) / std::numbers::pi;
  const double scale = std::max(std::fabs(c) + std::fabs(s), 1e-300);
  if (!std::isfinite(v) || total_err > 1e-6 * scale)
    throw numeric_error("levy_exp_killed_eval: oscillatory quadrature did not converge (err=" +
                        std::to_string(total_err) + ", scale=" + std::to_string(scale) + ")");
  return v;
}

// D_{rho,gamma,beta} = u_{rho;gamma,beta}(x,x)
inline double levy_d_constant(double rho, double g, double beta) {
  return levy_exp_killed_eval(rho, g, beta, 0.0, 0.0);
}

// ---- sigma function and friends ----

struct PairValues {
  double ss, tt, st, ts;
};

inline PairValues pair_values(const KernelSpec& k, double s, double t) {
  return {k.eval(s, s), k.eval(t, t), k.eval(s, t), k.eval(t, s)};
}

// Relative rounding allowance for identities that hold exactly in real
// arithmetic (u(s,t)u(t,s) >= 0 and the resulting sigma^2 >= 0).
inline constexpr double rounding_slack = 1e-12;

inline double offdiag_product(const PairValues& p) {
  const double prod = p.st * p.ts;
  if (prod < 0.0) {
    if (prod < -rounding_slack * std::max(1e-300, std::fabs(p.ss * p.tt)))
      throw invariant_violation("u(s,t)u(t,s) < 0: kernel is not permanental-admissible on this pair");
    return 0.0;
  }
  return prod;
}

inline double sigma_squared(const PairValues& p) {
  const double s2 = p.ss + p.tt - 2.0 * std::sqrt(offdiag_product(p));
  if (s2 < 0.0) {
    if (s2 < -rounding_slack * (std::fabs(p.ss) + std::fabs(p.tt)))
      throw invariant_violation("sigma^2 < 0: u(s,t)u(t,s) > u(s,s)u(t,t) on this pair");
    return 0.0;
  }
  return s2;
}

inline double sigma(const KernelSpec& k, double s, double t) {
  if (s == t) return 0.0;
  // Order the pair so the floating-point result is symmetric in (s,t).
  if (t < s) std::swap(s, t);
  return std::sqrt(sigma_squared(pair_values(k, s, t)));
}

struct SigmaDecomposition {
  double rho2;  // u(s,s)+u(t,t)-(u(s,t)+u(t,s))
  double asym2; // (u(s,t)^{1/2}-u(t,s)^{1/2})^2
};

inline SigmaDecomposition sigma_decomposition(const KernelSpec& k, double s, double t) {
  const auto p = pair_values(k, s, t);
  if (p.st < 0.0 || p.ts < 0.0)
    throw invariant_violation("sigma decomposition needs u(s,t) >= 0 and u(t,s) >= 0");
  const double d = std::sqrt(p.st) - std::sqrt(p.ts);
  return {p.ss + p.tt - (p.st + p.ts), d * d};
}

inline double rho_metric(const KernelSpec& k, double s, double t) {
  const auto d = sigma_decomposition(k, s, t);
  return std::sqrt(std::max(0.0, d.rho2));
}

// max over grid pairs of sigma(s,t)/phi(|t-s|); pass iff <= 1+1e-9.
inline BoundReport majorant_audit(const KernelSpec& k, const EnvelopeFn& phi, const std::vector<double>& grid) {
  BoundReport r;
  r.name = "majorant_audit";
  r.tolerance = 1.0 + 1e-9;
  double worst = 0.0, ws = 0.0, wt = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double sg = sigma(k, grid[i], grid[j]);
      const double ph = phi(std::fabs(grid[j] - grid[i]));
      double ratio;
      if (ph > 0.0)
        ratio = sg / ph;
      else
        ratio = sg > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      if (ratio > worst) {
        worst = ratio;
        ws = grid[i];
        wt = grid[j];
      }
    }
  r.worst = worst;
  r.values = {{"max_ratio", worst}, {"argmax_s", ws}, {"argmax_t", wt}};
  if (!(worst <= r.tolerance)) r.fail("sigma exceeds phi at (" + std::to_string(ws) + ", " + std::to_string(wt) + ")");
  return r;
}

}  // namespace permanental
