#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

namespace adapca {
namespace {

using testing::random_symmetric;
using testing::Rng;

TEST(SymEigen, IdentityReconstructsExactly) {
  const EigenPair eig = sym_eigen(SymMatrix::identity(3));
  EXPECT_TRUE(eig.values.isApprox(Vector::Ones(3)));
  EXPECT_LE((eig.vectors.transpose() * eig.vectors - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((eig.reconstruct() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SymEigen, DiagonalSortedDescendingWithAxisVectors) {
  Vector diag(3);
  diag << 3, 1, 2;
  const EigenPair eig = sym_eigen(SymMatrix(Matrix(diag.asDiagonal())));
  EXPECT_DOUBLE_EQ(eig.values(0), 3.0);
  EXPECT_DOUBLE_EQ(eig.values(1), 2.0);
  EXPECT_DOUBLE_EQ(eig.values(2), 1.0);
  EXPECT_NEAR(eig.vectors(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(eig.vectors(2, 1), 1.0, 1e-14);
  EXPECT_NEAR(eig.vectors(1, 2), 1.0, 1e-14);
}

TEST(SymEigen, RandomReconstruction) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix a = random_symmetric(5, rng);
    const EigenPair eig = sym_eigen(a);
    EXPECT_LE((eig.reconstruct() - a.matrix()).cwiseAbs().maxCoeff(), 1e-8);
    for (Index j = 0; j + 1 < 5; ++j) EXPECT_GE(eig.values(j), eig.values(j + 1));
  }
}

TEST(SymEigen, SignConventionIsCanonical) {
  Rng rng(3);
  const SymMatrix a = random_symmetric(6, rng);
  const EigenPair eig = sym_eigen(a);
  const EigenPair again = sym_eigen(SymMatrix(-1.0 * a.matrix() * -1.0));
  EXPECT_EQ(eig.vectors, again.vectors);
  for (Index j = 0; j < 6; ++j) {
    for (Index i = 0; i < 6; ++i) {
      if (std::abs(eig.vectors(i, j)) > 1e-10) {
        EXPECT_GT(eig.vectors(i, j), 0.0);
        break;
      }
    }
  }
}

TEST(SymEigen, RejectsNonFinite) {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(sym_eigen(SymMatrix(a)), InvalidInput);
}

TEST(SymMatrix, RejectsNonSquare) { EXPECT_THROW(SymMatrix(Matrix::Zero(2, 3)), InvalidInput); }

TEST(MatrixLog, UniformSpectrum) {
  const SymMatrix log_w = matrix_log(DensityMatrix::uniform(4));
  EXPECT_LE((log_w.matrix() - std::log(0.25) * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(MatrixLog, HalfHalfInRotatedBasis) {
  const double c = std::cos(0.3), s = std::sin(0.3);
  Matrix basis(2, 2);
  basis << c, -s, s, c;
  const DensityMatrix w = DensityMatrix::from_spectrum(basis, Vector::Constant(2, 0.5));
  EXPECT_LE((matrix_log(w).matrix() - std::log(0.5) * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(MatrixLog, FloorsZeroEigenvalues) {
  Vector spectrum(2);
  spectrum << 1.0, 0.0;
  const DensityMatrix w = DensityMatrix::from_spectrum(Matrix::Identity(2, 2), spectrum);
  EXPECT_NEAR(matrix_log(w).matrix()(1, 1), std::log(kLogFloor), 1e-12);
  EXPECT_NEAR(matrix_log(w, 1e-6).matrix()(1, 1), std::log(1e-6), 1e-12);
  EXPECT_THROW(matrix_log(w, 0.0), InvalidInput);
}

TEST(MatrixExpNormalized, ZeroIsUniform) {
  const DensityMatrix w = matrix_exp_normalized(SymMatrix::zero(3));
  EXPECT_LE((w.matrix() - Matrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MatrixExpNormalized, ScalarDiagonalIsUniform) {
  for (double a : {-700.0, -1.0, 0.0, 5.0, 800.0}) {
    const DensityMatrix w = matrix_exp_normalized(SymMatrix(Matrix(a * Matrix::Identity(2, 2))));
    EXPECT_LE((w.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15) << a;
  }
}

TEST(MatrixExpNormalized, InvertsLogOnDiagonal) {
  Vector diag(2);
  diag << std::log(0.8), std::log(0.2);
  const DensityMatrix w = matrix_exp_normalized(SymMatrix(Matrix(diag.asDiagonal())));
  EXPECT_NEAR(w.matrix()(0, 0), 0.8, 1e-15);
  EXPECT_NEAR(w.matrix()(1, 1), 0.2, 1e-15);
  EXPECT_NEAR(w.matrix()(0, 1), 0.0, 1e-15);
}

TEST(MatrixExpNormalized, ShiftInvariance) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix s = random_symmetric(5, rng);
    const double shift = std::uniform_real_distribution<double>(-50.0, 50.0)(rng);
    const DensityMatrix a = matrix_exp_normalized(s);
    const DensityMatrix b = matrix_exp_normalized(s + shift * SymMatrix::identity(5));
    EXPECT_LE((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(MatrixExpNormalized, LargeSpectrumDoesNotOverflow) {
  Vector diag(3);
  diag << 1000.0, 999.0, -1000.0;
  const DensityMatrix w = matrix_exp_normalized(SymMatrix(Matrix(diag.asDiagonal())));
  EXPECT_TRUE(w.matrix().allFinite());
  EXPECT_NEAR(w.spectrum()(0), 1.0 / (1.0 + std::exp(-1.0)), 1e-14);
}

TEST(MatrixExpNormalized, ExpOfLogRoundTrip) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector spectrum = testing::random_probability(6, rng).array() + 0.01;
    const Matrix basis = random_orthogonal(6, rng);
    const DensityMatrix w = DensityMatrix::from_spectrum(basis, spectrum / spectrum.sum());
    const DensityMatrix back = matrix_exp_normalized(matrix_log(w));
    EXPECT_LE((back.matrix() - w.matrix()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(DensityMatrix, ValidatesTraceSignAndCap) {
  Vector bad_trace(2);
  bad_trace << 0.6, 0.6;
  EXPECT_THROW(DensityMatrix::from_spectrum(Matrix::Identity(2, 2), bad_trace), InvalidInput);
  Vector negative(2);
  negative << 1.1, -0.1;
  EXPECT_THROW(DensityMatrix::from_spectrum(Matrix::Identity(2, 2), negative), InvalidInput);
  Vector over_cap(3);
  over_cap << 0.6, 0.3, 0.1;
  EXPECT_THROW(DensityMatrix::from_spectrum(Matrix::Identity(3, 3), over_cap, 2), InvalidInput);
  EXPECT_NO_THROW(DensityMatrix::from_spectrum(Matrix::Identity(3, 3), over_cap, 1));
  EXPECT_THROW(DensityMatrix::uniform(3, 4), InvalidInput);
}

TEST(DensityMatrix, FromMatrixKeepsEntries) {
  Matrix a(2, 2);
  a << 0.7, 0.1, 0.1, 0.3;
  const DensityMatrix w = DensityMatrix::from_matrix(SymMatrix(a));
  EXPECT_EQ(w.matrix(), a);
  EXPECT_NEAR(w.spectrum().sum(), 1.0, 1e-15);
  EXPECT_LE((detail::compose(w.basis(), w.spectrum()) - a).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(QuantumRelativeEntropy, CommutingCaseMatchesVectorDivergence) {
  Vector p(3), q(3);
  p << 0.5, 0.3, 0.2;
  q << 0.2, 0.2, 0.6;
  const DensityMatrix pm = DensityMatrix::from_spectrum(Matrix::Identity(3, 3), p);
  const DensityMatrix qm = DensityMatrix::from_matrix(SymMatrix(Matrix(q.asDiagonal())));
  EXPECT_NEAR(quantum_relative_entropy(pm, qm), relative_entropy(p, q), 1e-14);
}

TEST(QuantumRelativeEntropy, UniformAgainstRandomMatchesSpectralSum) {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix q = random_density_matrix(5, 1, rng);
    double expected = std::log(0.2);
    for (double v : q.spectrum()) expected -= 0.2 * std::log(v);
    EXPECT_NEAR(quantum_relative_entropy(DensityMatrix::uniform(5), q), expected, 1e-12);
  }
}

TEST(QuantumRelativeEntropy, NonNegativeAndZeroOnEqualPairs) {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix p = random_density_matrix(4, 1, rng);
    const DensityMatrix q = random_density_matrix(4, 1, rng);
    EXPECT_GT(quantum_relative_entropy(p, q), 0.0);
    EXPECT_NEAR(quantum_relative_entropy(q, q), 0.0, 1e-12);
  }
}

TEST(QuantumRelativeEntropy, SingularSecondArgument) {
  Vector spectrum(2);
  spectrum << 1.0, 0.0;
  const DensityMatrix singular = DensityMatrix::from_spectrum(Matrix::Identity(2, 2), spectrum);
  EXPECT_THROW(quantum_relative_entropy(DensityMatrix::uniform(2), singular), SingularArgument);
  EXPECT_NO_THROW(quantum_relative_entropy(singular, DensityMatrix::uniform(2)));
}

TEST(TopKProjection, Diagonal) {
  Vector diag(3);
  diag << 3, 2, 1;
  const ProjectionMatrix p = top_k_projection(SymMatrix(Matrix(diag.asDiagonal())), 2);
  Vector expected(3);
  expected << 1, 1, 0;
  EXPECT_LE((p.matrix() - Matrix(expected.asDiagonal())).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TopKProjection, DegenerateSpectrumAttainsSameObjective) {
  const ProjectionMatrix p = top_k_projection(SymMatrix::identity(4), 1);
  EXPECT_NEAR(trace_product(Matrix::Identity(4, 4) - p.matrix(), Matrix::Identity(4, 4)), 3.0, 1e-12);
}

TEST(TopKProjection, ProjectorInvariants) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix a = random_symmetric(6, rng);
    const Index k = 1 + trial % 5;
    const Matrix p = top_k_projection(a, k).matrix();
    EXPECT_LE((p * p - p).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(p, p.transpose());
    EXPECT_NEAR(p.trace(), static_cast<double>(k), 1e-10);
  }
}

TEST(TopKProjection, RejectsBadRank) {
  EXPECT_THROW(top_k_projection(SymMatrix::identity(3), 0), InvalidInput);
  EXPECT_THROW(top_k_projection(SymMatrix::identity(3), 3), InvalidInput);
}

TEST(ProjectionMatrix, RejectsNonProjectors) {
  EXPECT_THROW(ProjectionMatrix(0.5 * Matrix::Identity(2, 2), 1), InvalidInput);
  EXPECT_THROW(ProjectionMatrix(Matrix::Identity(2, 2), 1), InvalidInput);
  EXPECT_THROW(ProjectionMatrix(Matrix::Zero(2, 3), 1), InvalidInput);
}

TEST(ProjectionMatrix, CompressionLossIsTraceOfComplement) {
  Rng rng(29);
  const ProjectionMatrix p = top_k_projection(random_symmetric(5, rng), 2);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = testing::random_unit_ball_point(5, rng);
    const double trace_form = trace_product(Matrix::Identity(5, 5) - p.matrix(), x * x.transpose());
    EXPECT_NEAR(p.compression_loss(x), trace_form, 1e-10);
  }
}

}  // namespace
}  // namespace adapca
