#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "permanental/errors.hpp"
#include "permanental/kernels.hpp"

namespace permanental {

// alpha together with a kernel restricted to finitely many points. An explicit
// matrix is carried as an ExplicitMatrix kernel over index points 0..n-1.
struct PermanentalSpec {
  double alpha = 0.5;
  KernelSpec kernel = KernelSpec::explicit_matrix(Matrix::Identity(1, 1));
  std::vector<double> points{0.0};

  PermanentalSpec() = default;
  PermanentalSpec(double a, KernelSpec k, std::vector<double> pts)
      : alpha(a), kernel(std::move(k)), points(std::move(pts)) {
    validate();
  }

  static PermanentalSpec from_matrix(double a, const Matrix& u) {
    auto k = KernelSpec::explicit_matrix(u);
    std::vector<double> pts(u.rows());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = static_cast<double>(i);
    return PermanentalSpec(a, std::move(k), std::move(pts));
  }

  std::size_t size() const { return points.size(); }
  Matrix matrix() const { return kernel_matrix(kernel, points); }

  void validate() const {
    if (!(alpha > 0.0)) throw parameter_error("alpha must be positive");
    if (points.empty()) throw parameter_error("a permanental spec needs at least one point");
    for (double p : points)
      if (kernel.eval(p, p) < 0.0) throw invalid_kernel("negative diagonal entry u(t,t)");
  }

  nlohmann::json to_json() const {
    return {{"alpha", alpha}, {"kernel", kernel.to_json()}, {"points", points}};
  }

  static PermanentalSpec from_json(const nlohmann::json& j) {
    const double a = j.at("alpha").get<double>();
    if (j.contains("matrix")) return from_matrix(a, matrix_from_json(j.at("matrix")));
    return PermanentalSpec(a, KernelSpec::from_json(j.at("kernel")), j.at("points").get<std::vector<double>>());
  }
};

// ---- long double LU with partial pivoting ----

class LongLU {
 public:
  explicit LongLU(const Matrix& m) : n_(static_cast<int>(m.rows())), a_(n_ * n_), piv_(n_) {
    if (m.rows() != m.cols()) throw parameter_error("LU needs a square matrix");
    long double scale = 0.0L;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        a_[i * n_ + j] = m(i, j);
        scale = std::max(scale, std::fabs(static_cast<long double>(m(i, j))));
      }
    for (int k = 0; k < n_; ++k) {
      int p = k;
      for (int i = k + 1; i < n_; ++i)
        if (std::fabs(a_[i * n_ + k]) > std::fabs(a_[p * n_ + k])) p = i;
      piv_[k] = p;
      if (p != k) {
        sign_ = -sign_;
        for (int j = 0; j < n_; ++j) std::swap(a_[k * n_ + j], a_[p * n_ + j]);
      }
      const long double d = a_[k * n_ + k];
      if (std::fabs(d) <= 1e-15L * scale) singular_ = true;
      if (d == 0.0L) continue;
      for (int i = k + 1; i < n_; ++i) {
        const long double l = a_[i * n_ + k] / d;
        a_[i * n_ + k] = l;
        if (l == 0.0L) continue;
        for (int j = k + 1; j < n_; ++j) a_[i * n_ + j] -= l * a_[k * n_ + j];
      }
    }
  }

  bool singular() const { return singular_; }

  long double determinant() const {
    long double d = sign_;
    for (int k = 0; k < n_; ++k) d *= a_[k * n_ + k];
    return d;
  }

  Matrix inverse() const {
    if (singular_) throw singular_matrix("matrix is numerically singular");
    Matrix inv(n_, n_);
    std::vector<long double> x(n_);
    for (int c = 0; c < n_; ++c) {
      std::fill(x.begin(), x.end(), 0.0L);
      x[c] = 1.0L;
      for (int k = 0; k < n_; ++k) std::swap(x[k], x[piv_[k]]);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < i; ++j) x[i] -= a_[i * n_ + j] * x[j];
      for (int i = n_ - 1; i >= 0; --i) {
        for (int j = i + 1; j < n_; ++j) x[i] -= a_[i * n_ + j] * x[j];
        x[i] /= a_[i * n_ + i];
      }
      for (int r = 0; r < n_; ++r) inv(r, c) = static_cast<double>(x[r]);
    }
    return inv;
  }

 private:
  int n_;
  std::vector<long double> a_;
  std::vector<int> piv_;
  int sign_ = 1;
  bool singular_ = false;
};

inline Matrix inverse(const Matrix& m) { return LongLU(m).inverse(); }

// |I+US|^{-alpha}
inline double laplace_transform(const Matrix& u, double alpha, const std::vector<double>& s) {
  const auto n = u.rows();
  if (static_cast<Eigen::Index>(s.size()) != n) throw parameter_error("s must have one entry per point");
  for (double v : s)
    if (!(v >= 0.0)) throw domain_error("Laplace transform needs s >= 0");
  Matrix m = u;
  for (Eigen::Index j = 0; j < n; ++j) m.col(j) *= s[j];
  m += Matrix::Identity(n, n);
  const long double det = LongLU(m).determinant();
  if (!(det > 0.0L))
    throw invalid_kernel("|I+US| <= 0: spec is not alpha-permanental consistent at this s");
  return static_cast<double>(std::pow(det, -static_cast<long double>(alpha)));
}

inline double laplace_transform(const PermanentalSpec& spec, const std::vector<double>& s) {
  return laplace_transform(spec.matrix(), spec.alpha, s);
}

// ---- pair kernels ----

// K = [[b, gamma], [gamma, a]] with b = u(s,s), a = u(t,t).
struct PairKernel {
  double b = 0, a = 0, gamma_off = 0, delta = 0, sigma = 0;

  static PairKernel from_values(double b, double a, double g) {
    if (!(a >= 0.0 && b >= 0.0 && g >= 0.0)) throw invalid_kernel("pair kernel entries must be nonnegative");
    if (g > 0.0 && a * b == 0.0) throw invalid_kernel("ab = 0 with gamma > 0");
    PairKernel k;
    k.b = b;
    k.a = a;
    k.gamma_off = g;
    double d = a * b - g * g;
    if (d < 0.0) {
      if (d < -rounding_slack * a * b) throw invalid_kernel("gamma^2 > ab: determinant is negative");
      d = 0.0;
    }
    k.delta = d;
    double s2 = a + b - 2.0 * g;
    if (s2 < 0.0) s2 = 0.0;  // only reachable through rounding once delta >= 0
    k.sigma = std::sqrt(s2);
    return k;
  }

  Matrix matrix() const {
    Matrix m(2, 2);
    m << b, gamma_off, gamma_off, a;
    return m;
  }

  nlohmann::json to_json() const {
    return {{"b", b}, {"a", a}, {"gamma", gamma_off}, {"delta", delta}, {"sigma", sigma}};
  }
};

inline PairKernel pair_kernel(const KernelSpec& k, double s, double t) {
  const auto p = pair_values(k, s, t);
  const double prod = offdiag_product(p);
  PairKernel pk;
  pk.b = p.ss;
  pk.a = p.tt;
  pk.gamma_off = std::sqrt(prod);
  double d = p.ss * p.tt - prod;
  if (d < 0.0) {
    if (d < -rounding_slack * std::fabs(p.ss * p.tt))
      throw invariant_violation("u(s,t)u(t,s) > u(s,s)u(t,t) on this pair");
    d = 0.0;
  }
  pk.delta = d;
  pk.sigma = std::sqrt(sigma_squared(p));
  return pk;
}

inline PairKernel pair_kernel(const PermanentalSpec& spec, std::size_t i, std::size_t j) {
  return pair_kernel(spec.kernel, spec.points.at(i), spec.points.at(j));
}

// ---- M-matrix admissibility ----

struct AdmissibilityReport {
  bool inverse_exists = false;
  bool offdiag_nonpositive = false;
  bool row_sums_positive = false;
  double worst_entry = 0.0;     // largest off-diagonal entry of U^{-1}
  double worst_row_sum = 0.0;   // smallest row sum of U^{-1}
  Matrix inverse;

  bool pass() const { return inverse_exists && offdiag_nonpositive && row_sums_positive; }

  nlohmann::json to_json() const {
    return {{"inverse_exists", inverse_exists}, {"offdiag_nonpositive", offdiag_nonpositive},
            {"row_sums_positive", row_sums_positive}, {"worst_entry", worst_entry},
            {"worst_row_sum", worst_row_sum}, {"pass", pass()}};
  }
};

inline constexpr double mmatrix_tolerance = 1e-10;

inline AdmissibilityReport mmatrix_admissible(const Matrix& u) {
  if (u.rows() != u.cols()) throw parameter_error("mmatrix_admissible needs a square matrix");
  AdmissibilityReport r;
  r.inverse = inverse(u);
  r.inverse_exists = true;
  const auto n = u.rows();
  double worst = -std::numeric_limits<double>::infinity();
  double min_row = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      row += r.inverse(i, j);
      if (i != j) worst = std::max(worst, r.inverse(i, j));
    }
    min_row = std::min(min_row, row);
  }
  if (n == 1) worst = 0.0;
  r.worst_entry = worst;
  r.worst_row_sum = min_row;
  r.offdiag_nonpositive = worst <= mmatrix_tolerance;
  r.row_sums_positive = min_row > -mmatrix_tolerance;
  return r;
}

// ---- rebirth ----

struct RebirthKernel {
  Matrix u_tilde;  // index 0 is the star point
  Vector f;
  double rebirth_mass = 0.0;
};

inline RebirthKernel rebirth_kernel(const Matrix& u, const std::vector<double>& mu) {
  const auto adm = mmatrix_admissible(u);
  if (!adm.pass()) throw invalid_potential("U is not an admissible potential (inverse is not an M-matrix with nonnegative row sums)");
  const auto k = KernelSpec::rebirth(u, mu);
  const auto& fam = std::get<family::Rebirth>(k.family());
  RebirthKernel r;
  r.u_tilde = fam.full;
  r.f = fam.full.row(0).tail(u.rows()).transpose();
  for (double m : mu) r.rebirth_mass += m;
  return r;
}

// ---- augmented matrices and closed-form inverses ----

// U_f: row 0 = (1, f), row i = (1, U_{i.} + f)
inline Matrix augmented_matrix(const Matrix& u, const Vector& f) {
  const auto n = u.rows();
  if (u.cols() != n || f.size() != n) throw parameter_error("augmented_matrix: size mismatch");
  Matrix m(n + 1, n + 1);
  m(0, 0) = 1.0;
  m.block(0, 1, 1, n) = f.transpose();
  m.block(1, 0, n, 1).setOnes();
  m.block(1, 1, n, n) = u + Vector::Ones(n) * f.transpose();
  return m;
}

// sum_{i,j} f(i) U^{ij}
inline double schur_rho(const Matrix& u_inv, const Vector& f) { return f.dot(u_inv * Vector::Ones(f.size())); }

// Closed form: [0,0] = 1+rho, [0,j] = -sum_i f_i U^{ij}, [i,0] = -sum_j U^{ij}, [i,j] = U^{ij}.
inline Matrix augmented_inverse(const Matrix& u, const Vector& f) {
  const auto n = u.rows();
  if (u.cols() != n || f.size() != n) throw parameter_error("augmented_inverse: size mismatch");
  const Matrix ui = inverse(u);
  Matrix m(n + 1, n + 1);
  m(0, 0) = 1.0 + schur_rho(ui, f);
  m.block(0, 1, 1, n) = -(f.transpose() * ui);
  m.block(1, 0, n, 1) = -(ui * Vector::Ones(n));
  m.block(1, 1, n, n) = ui;
  return m;
}

// W(n)_{ij} = s_i ^ s_j for increasing positive s
inline Matrix min_matrix(const std::vector<double>& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Matrix w(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = std::min(s[i], s[j]);
  return w;
}

// Tridiagonal inverse of W(n) with t_j = s_j - s_{j-1} (s_0 = 0):
// diagonal 1/t_j + 1/t_{j+1}, last 1/t_n, off-diagonal -1/t_{j+1}.
inline Matrix min_matrix_inverse(const std::vector<double>& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  if (n == 0) throw parameter_error("empty grid");
  std::vector<double> t(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    t[j] = s[j] - (j == 0 ? 0.0 : s[j - 1]);
    if (!(t[j] > 0.0)) throw parameter_error("min_matrix_inverse needs strictly increasing positive points");
  }
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    w(j, j) = 1.0 / t[j] + (j + 1 < n ? 1.0 / t[j + 1] : 0.0);
    if (j + 1 < n) w(j, j + 1) = w(j + 1, j) = -1.0 / t[j + 1];
  }
  return w;
}

}  // namespace permanental
