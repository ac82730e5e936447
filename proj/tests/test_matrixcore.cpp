#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "permanental/matrixcore.hpp"
#include "permanental/rng.hpp"

using namespace permanental;

TEST(Laplace, ScalarAndIdentity) {
  Matrix one = Matrix::Ones(1, 1);
  EXPECT_DOUBLE_EQ(laplace_transform(one, 1.0, {1.0}), 0.5);
  EXPECT_DOUBLE_EQ(laplace_transform(Matrix::Identity(2, 2), 0.5, {1.0, 1.0}), 0.5);
  EXPECT_DOUBLE_EQ(laplace_transform(Matrix::Identity(3, 3), 0.7, {0.0, 0.0, 0.0}), 1.0);
}

TEST(Laplace, PairDeterminant) {
  const double b = 1.0, a = 4.0, g = 1.5;
  const auto k = PairKernel::from_values(b, a, g);
  for (double s1 : {0.1, 1.0, 3.0})
    for (double s2 : {0.2, 2.0}) {
      const double det = 1.0 + s1 * b + s2 * a + s1 * s2 * k.delta;
      EXPECT_NEAR(laplace_transform(k.matrix(), 1.0, {s1, s2}), 1.0 / det, 1e-15);
      EXPECT_NEAR(laplace_transform(k.matrix(), 0.7, {s1, s2}), std::pow(det, -0.7), 1e-14);
    }
}

TEST(Laplace, AsymmetricMatchesEigenDeterminant) {
  Matrix u(3, 3);
  u << 2.0, 0.5, 0.1, 0.3, 1.5, 0.4, 0.2, 0.1, 1.0;
  const std::vector<double> s = {0.3, 1.2, 0.7};
  Matrix m = Matrix::Identity(3, 3) + u * Eigen::Vector3d(s[0], s[1], s[2]).asDiagonal();
  EXPECT_NEAR(laplace_transform(u, 1.3, s), std::pow(m.fullPivLu().determinant(), -1.3), 1e-14);
  EXPECT_NEAR(static_cast<double>(LongLU(m).determinant()), m.fullPivLu().determinant(), 1e-13);
}

TEST(Laplace, NegativeDeterminantRejected) {
  Matrix u(2, 2);
  u << 1.0, 3.0, 3.0, 1.0;
  EXPECT_ANY_THROW(laplace_transform(u, 0.5, {1.0, 1.0}));
}

TEST(MMatrix, IdentityPasses) {
  const auto r = mmatrix_admissible(Matrix::Identity(4, 4));
  EXPECT_TRUE(r.pass());
  EXPECT_DOUBLE_EQ(r.worst_entry, 0.0);
  EXPECT_DOUBLE_EQ(r.worst_row_sum, 1.0);
}

TEST(MMatrix, IndefiniteCounterexampleFails) {
  Matrix u(2, 2);
  u << 1.0, 2.0, 2.0, 1.0;
  const auto r = mmatrix_admissible(u);
  EXPECT_FALSE(r.pass());
  EXPECT_FALSE(r.offdiag_nonpositive);
}

namespace {

// u(j,k) = lambda_j delta_jk + 1 + f_j f_k on 1..m with lambda_j = 2^{-j}, f = 1 - p
Matrix example_block(int m, bool squared) {
  const auto k = KernelSpec::discrete_seq(
      SeqFn::geometric(1.0, 0.5), SeqFn::one_minus(SeqFn::geometric(1.0, squared ? 0.25 : 0.5)),
      SeqFn::one_minus(SeqFn::geometric(1.0, squared ? 0.25 : 0.5)));
  std::vector<double> pts;
  for (int j = 1; j <= m; ++j) pts.push_back(j);
  return kernel_matrix(k, pts);
}

}  // namespace

// Reference values from numpy.linalg.inv on the same blocks.
TEST(MMatrix, SequenceExampleWithLinearPFailsFromFourPoints) {
  struct Ref {
    int m;
    double min_row, max_off;
  };
  const Ref refs[] = {{3, 0.0737327188940093, -0.516129032258064},
                      {4, -0.105960264900662, -0.370860927152318},
                      {7, -0.56365607501705, 0.0271813843282415},
                      {12, -1.34345544102894, 0.840463887993524}};
  for (const auto& ref : refs) {
    const auto r = mmatrix_admissible(example_block(ref.m, false));
    EXPECT_NEAR(r.worst_row_sum, ref.min_row, 1e-10) << "m=" << ref.m;
    EXPECT_NEAR(r.worst_entry, ref.max_off, 1e-10) << "m=" << ref.m;
    EXPECT_EQ(r.pass(), ref.m < 4) << "m=" << ref.m;
  }
}

TEST(MMatrix, SequenceExampleWithSquaredPPasses) {
  for (int m = 1; m <= 12; ++m) EXPECT_TRUE(mmatrix_admissible(example_block(m, true)).pass()) << "m=" << m;
  EXPECT_NEAR(mmatrix_admissible(example_block(12, true)).worst_row_sum, 0.00391051107314411, 1e-12);
}

TEST(Rebirth, NoRebirthMeasure) {
  Matrix u(2, 2);
  u << 2, 1, 1, 2;
  const auto r = rebirth_kernel(u, {0.0, 0.0});
  EXPECT_EQ(r.f.norm(), 0.0);
  EXPECT_DOUBLE_EQ(r.u_tilde(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(r.u_tilde(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(r.u_tilde(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(r.u_tilde(1, 2), 1.0);
}

TEST(Rebirth, TwoStatePotential) {
  Matrix u(2, 2);
  u << 2, 1, 1, 2;
  const auto r = rebirth_kernel(u, {0.5, 0.0});
  EXPECT_DOUBLE_EQ(r.f(0), 1.0);
  EXPECT_DOUBLE_EQ(r.f(1), 0.5);
  EXPECT_DOUBLE_EQ(r.rebirth_mass, 0.5);
  EXPECT_DOUBLE_EQ(r.u_tilde(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(r.u_tilde(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(r.u_tilde(2, 1), 2.0);
  // the star row is f
  EXPECT_DOUBLE_EQ(r.u_tilde(0, 2), 0.5);
}

TEST(Rebirth, RejectsNonPotential) {
  Matrix u(2, 2);
  u << 1, 2, 2, 1;
  EXPECT_THROW(rebirth_kernel(u, {0.1, 0.1}), invalid_potential);
}

TEST(ClosedForms, MinMatrixUnitSteps) {
  std::vector<double> s;
  for (int j = 1; j <= 6; ++j) s.push_back(j);
  const Matrix w = min_matrix_inverse(s);
  for (int j = 0; j < 6; ++j) EXPECT_DOUBLE_EQ(w(j, j), j < 5 ? 2.0 : 1.0);
  for (int j = 0; j + 1 < 6; ++j) EXPECT_DOUBLE_EQ(w(j, j + 1), -1.0);
  EXPECT_DOUBLE_EQ(w(0, 2), 0.0);
  EXPECT_LT((w * min_matrix(s) - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ClosedForms, GeometricGridDiagonal) {
  const int n = 8;
  std::vector<double> s;
  for (int j = 1; j <= n; ++j) s.push_back(std::pow(2.0, j));
  const Matrix w = min_matrix_inverse(s);
  EXPECT_DOUBLE_EQ(w(1, 1), 0.75);  // j = 2
  EXPECT_DOUBLE_EQ(w(n - 1, n - 1), 2.0 / std::pow(2.0, n));
  const Matrix ref = min_matrix(s).fullPivLu().inverse();
  EXPECT_LT((w - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ClosedForms, AugmentedInverseAgainstEigen) {
  Rng rng(11, 0, 0);
  for (int n = 1; n <= 8; ++n) {
    Matrix u(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) u(i, j) = rng.uniform() + (i == j ? n : 0.0);
    Vector f(n);
    for (int i = 0; i < n; ++i) f(i) = rng.uniform();
    const Matrix ref = augmented_matrix(u, f).fullPivLu().inverse();
    EXPECT_LT((augmented_inverse(u, f) - ref).cwiseAbs().maxCoeff(), 1e-12) << "n=" << n;
  }
}

TEST(PairKernel, SymmetricOffDiagonal) {
  const auto k = KernelSpec::brownian_hit0(ScalarFn::zero());
  const auto p = pair_kernel(k, 1.0, 3.0);
  EXPECT_DOUBLE_EQ(p.gamma_off, 1.0);
  EXPECT_DOUBLE_EQ(p.b, 1.0);
  EXPECT_DOUBLE_EQ(p.a, 3.0);
  EXPECT_DOUBLE_EQ(p.delta, 2.0);
}

TEST(PairKernel, DegenerateSigmaForcesEqualDiagonal) {
  const auto k = PairKernel::from_values(2.0, 2.0, 2.0);
  EXPECT_EQ(k.sigma, 0.0);
  EXPECT_EQ(k.delta, 0.0);
  EXPECT_THROW(PairKernel::from_values(1.0, 1.0, 1.5), invalid_kernel);
  EXPECT_THROW(PairKernel::from_values(0.0, 1.0, 0.5), invalid_kernel);
}

TEST(Spec, JsonRoundTripAndValidation) {
  const PermanentalSpec s(0.5, KernelSpec::fbmq(0.5, 0.0), {0.5, 1.0});
  const auto back = PermanentalSpec::from_json(s.to_json());
  EXPECT_EQ(back.to_json(), s.to_json());
  EXPECT_THROW(PermanentalSpec(0.0, KernelSpec::fbmq(0.5, 0.0), {1.0}), parameter_error);
  EXPECT_THROW(PermanentalSpec(0.5, KernelSpec::fbmq(0.5, 0.0), {}), parameter_error);
  const auto m = PermanentalSpec::from_json({{"alpha", 0.7}, {"matrix", {{1.0, 0.5}, {0.5, 1.0}}}});
  EXPECT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m.matrix()(0, 1), 0.5);
}
