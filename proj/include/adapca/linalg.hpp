#pragma once

// Dense symmetric linear algebra shared by the matrix learners: a symmetric
// eigensolver with a canonical output, spectral matrix functions, density
// and projection matrix types, and the quantum relative entropy.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "adapca/error.hpp"

namespace adapca {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Default eigenvalue floor used when taking logarithms of density matrices.
inline constexpr double kLogFloor = 1e-12;

/// Tolerances for the invariants of DensityMatrix and ProjectionMatrix.
inline constexpr double kDensityTolerance = 1e-10;
inline constexpr double kProjectionTolerance = 1e-8;

/// Real symmetric matrix. Construction symmetrizes the input as (A + A^T)/2.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Matrix& a) {
    detail::require(a.rows() == a.cols(), "SymMatrix: matrix must be square");
    entries_ = 0.5 * (a + a.transpose());
  }

  static SymMatrix zero(Index n) { return SymMatrix(Matrix::Zero(n, n)); }
  static SymMatrix identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }
  static SymMatrix outer(const Vector& x) { return SymMatrix(x * x.transpose()); }

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

  SymMatrix& operator+=(const SymMatrix& other) {
    entries_ += other.entries_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& other) {
    entries_ -= other.entries_;
    return *this;
  }
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) {
    a.entries_ *= s;
    return a;
  }

 private:
  Matrix entries_;
};

/// Eigendecomposition A = V diag(values) V^T with values non-increasing.
struct EigenPair {
  Vector values;
  Matrix vectors;

  Matrix reconstruct() const {
    return vectors * values.asDiagonal() * vectors.transpose();
  }
};

namespace detail {

// V diag(values) V^T, symmetrized so the result is exactly symmetric.
inline Matrix compose(const Matrix& basis, const Vector& values) {
  Matrix out = basis * values.asDiagonal() * basis.transpose();
  return 0.5 * (out + out.transpose());
}

// Canonical sign: first component with magnitude above noise is positive.
inline void canonicalize_signs(Matrix& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    for (Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > 1e-10) {
        if (vectors(i, j) < 0.0) vectors.col(j) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace detail

/// Symmetric eigendecomposition, eigenvalues sorted non-increasing and each
/// eigenvector's first non-negligible component made positive.
inline EigenPair sym_eigen(const SymMatrix& a) {
  if (!a.matrix().allFinite()) throw InvalidInput("sym_eigen: non-finite entries");
  const Index n = a.dim();
  if (n == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw InvalidInput("sym_eigen: solver did not converge");
  // Eigen returns ascending order.
  EigenPair out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  detail::canonicalize_signs(out.vectors);
  return out;
}

/// Eigenvalues only, non-increasing.
inline Vector sym_eigenvalues(const SymMatrix& a) {
  if (!a.matrix().allFinite()) throw InvalidInput("sym_eigenvalues: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InvalidInput("sym_eigenvalues: solver did not converge");
  return solver.eigenvalues().reverse();
}

/// Tr(A B) for symmetric A, B.
inline double trace_product(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

/// Symmetric PSD matrix of unit trace, optionally with eigenvalues capped at
/// 1/cap. Stored together with its spectral form so that spectral functions
/// never re-decompose a matrix built from known eigenpairs.
class DensityMatrix {
 public:
  /// Builds U diag(spectrum) U^T. `basis` must be orthonormal.
  static DensityMatrix from_spectrum(Matrix basis, Vector spectrum, Index cap = 1) {
    detail::require(basis.rows() == basis.cols() && basis.cols() == spectrum.size(),
                    "DensityMatrix: basis/spectrum size mismatch");
    DensityMatrix out;
    out.entries_ = detail::compose(basis, spectrum);
    out.basis_ = std::move(basis);
    out.spectrum_ = std::move(spectrum);
    out.cap_ = cap;
    out.validate();
    return out;
  }

  static DensityMatrix from_matrix(const SymMatrix& a, Index cap = 1) {
    EigenPair eig = sym_eigen(a);
    DensityMatrix out;
    out.entries_ = a.matrix();
    out.basis_ = std::move(eig.vectors);
    out.spectrum_ = std::move(eig.values);
    out.cap_ = cap;
    out.validate();
    return out;
  }

  /// I/n, a member of every capped set with cap <= n.
  static DensityMatrix uniform(Index n, Index cap = 1) {
    return from_spectrum(Matrix::Identity(n, n),
                         Vector::Constant(n, 1.0 / static_cast<double>(n)), cap);
  }

  Index dim() const { return entries_.rows(); }
  Index cap() const { return cap_; }
  const Matrix& matrix() const { return entries_; }
  const Matrix& basis() const { return basis_; }
  const Vector& spectrum() const { return spectrum_; }

 private:
  DensityMatrix() = default;

  void validate() const {
    const Index n = spectrum_.size();
    detail::require(n > 0, "DensityMatrix: empty");
    detail::require(cap_ >= 1 && cap_ <= n, "DensityMatrix: cap out of range");
    detail::require(spectrum_.allFinite(), "DensityMatrix: non-finite spectrum");
    detail::require(std::abs(spectrum_.sum() - 1.0) <= kDensityTolerance,
                    "DensityMatrix: trace differs from 1");
    detail::require(spectrum_.minCoeff() >= -kDensityTolerance,
                    "DensityMatrix: negative eigenvalue");
    detail::require(spectrum_.maxCoeff() <= 1.0 / static_cast<double>(cap_) + kDensityTolerance,
                    "DensityMatrix: eigenvalue exceeds cap");
  }

  Matrix entries_;
  Matrix basis_;
  Vector spectrum_;
  Index cap_ = 1;
};

/// Rank-k orthogonal projector.
class ProjectionMatrix {
 public:
  ProjectionMatrix(const Matrix& p, Index rank) : entries_(SymMatrix(p).matrix()), rank_(rank) {
    detail::require(((entries_ * entries_) - entries_).cwiseAbs().maxCoeff() <= kProjectionTolerance,
                    "ProjectionMatrix: not idempotent");
    detail::require(std::abs(entries_.trace() - static_cast<double>(rank_)) <= kProjectionTolerance,
                    "ProjectionMatrix: trace differs from rank");
  }

  Index dim() const { return entries_.rows(); }
  Index rank() const { return rank_; }
  const Matrix& matrix() const { return entries_; }

  /// ||x - P x||^2.
  double compression_loss(const Vector& x) const { return (x - entries_ * x).squaredNorm(); }

 private:
  Matrix entries_;
  Index rank_;
};

/// V diag(ln max(lambda, floor)) V^T.
inline SymMatrix matrix_log(const DensityMatrix& w, double floor = kLogFloor) {
  detail::require(floor > 0.0, "matrix_log: floor must be positive");
  Vector logs = w.spectrum().unaryExpr([floor](double v) { return std::log(std::max(v, floor)); });
  return SymMatrix(detail::compose(w.basis(), logs));
}

/// exp(S)/Tr(exp(S)), evaluated after shifting the spectrum by its maximum.
inline DensityMatrix matrix_exp_normalized(const SymMatrix& s) {
  EigenPair eig = sym_eigen(s);
  const double top = eig.values.size() > 0 ? eig.values.maxCoeff() : 0.0;
  Vector weights = (eig.values.array() - top).exp().matrix();
  weights /= weights.sum();
  return DensityMatrix::from_spectrum(std::move(eig.vectors), std::move(weights));
}

/// Tr(P ln P) - Tr(P ln Q).
inline double quantum_relative_entropy(const DensityMatrix& p, const DensityMatrix& q,
                                       double floor = kLogFloor) {
  detail::require(p.dim() == q.dim(), "quantum_relative_entropy: dimension mismatch");
  if (q.spectrum().minCoeff() < floor) {
    throw SingularArgument("quantum_relative_entropy: second argument is singular");
  }
  double entropy_term = 0.0;
  for (double v : p.spectrum()) {
    if (v > 0.0) entropy_term += v * std::log(v);
  }
  double cross_term = 0.0;
  for (Index j = 0; j < q.dim(); ++j) {
    const auto u = q.basis().col(j);
    cross_term += std::log(q.spectrum()(j)) * u.dot(p.matrix() * u);
  }
  return entropy_term - cross_term;
}

/// Projector onto the span of the k leading eigenvectors of A. Degenerate
/// eigenvalues are resolved by taking the first k columns in sorted order.
inline ProjectionMatrix top_k_projection(const SymMatrix& a, Index k) {
  const Index n = a.dim();
  if (k < 1 || k >= n) {
    throw InvalidInput("top_k_projection: k=" + std::to_string(k) + " outside [1, n)");
  }
  const EigenPair eig = sym_eigen(a);
  const auto leading = eig.vectors.leftCols(k);
  return ProjectionMatrix(leading * leading.transpose(), k);
}

}  // namespace adapca
