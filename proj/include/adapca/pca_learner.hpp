#pragma once

// Uncentered online adaptive PCA. The learner keeps a density matrix W_t
// with eigenvalues capped at 1/(n-k); each round it draws a rank-k
// projection whose expected compression loss is (n-k) Tr(W_t x x^T), then
// applies a matrix exponentiated-gradient step, fixed-share on the spectrum,
// and the spectral cap.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "adapca/capped_simplex.hpp"
#include "adapca/error.hpp"
#include "adapca/expert_learner.hpp"
#include "adapca/linalg.hpp"

namespace adapca {

/// Norm tolerance for admissible data points.
inline constexpr double kUnitBallTolerance = 1e-10;

/// Same constants as tune_expert.
inline Tuning tune_pca(std::int64_t horizon, Index n, Index k, double loss_budget) {
  return tune_expert(horizon, n, k, loss_budget);
}

struct PcaChoice {
  /// P_t, rank k.
  ProjectionMatrix projection;
  /// R = I - P_t = (n-k) D diag(r) D^T for the drawn corner r, rank n-k.
  ProjectionMatrix complement;
  Corner corner;
};

class PcaLearner {
 public:
  PcaLearner(Index n, Index k, double eta, double alpha, std::uint64_t seed,
             Variant variant = Variant::kAdaptive)
      : n_(n),
        k_(k),
        eta_(eta),
        alpha_(alpha),
        variant_(variant),
        rng_(seed),
        state_(initial(n, k)),
        shared_(state_) {
    detail::require(eta >= 0.0 && std::isfinite(eta), "PcaLearner: eta must be non-negative");
    detail::require(alpha >= 0.0 && alpha <= 1.0, "PcaLearner: alpha outside [0, 1]");
  }

  Index n() const { return n_; }
  Index k() const { return k_; }
  double eta() const { return eta_; }
  double alpha() const { return alpha_; }
  std::int64_t steps() const { return steps_; }

  /// W_t in B_{n-k}^n.
  const DensityMatrix& state() const { return state_; }
  /// The pre-cap matrix W_t was projected from (W_1 itself at t = 1).
  const DensityMatrix& shared_state() const { return shared_; }
  /// V_{t+1} from the latest update.
  const std::optional<DensityMatrix>& exponentiated_state() const { return exponentiated_; }

  /// (n-k) x^T W_t x.
  double expected_loss(const Vector& x) const {
    detail::require(x.size() == n_, "PcaLearner: point dimension mismatch");
    return static_cast<double>(n_ - k_) * x.dot(state_.matrix() * x);
  }

  PcaChoice choose() {
    const Index d = n_ - k_;
    const MixtureDecomposition mixture = decompose(CappedSimplexVector(state_.spectrum(), d));
    const Corner& corner = sample_corner(mixture, rng_);
    Matrix r = Matrix::Zero(n_, n_);
    for (Index i : corner.support()) {
      const auto u = state_.basis().col(i);
      r.noalias() += u * u.transpose();
    }
    Matrix p = Matrix::Identity(n_, n_) - r;
    return {ProjectionMatrix(p, k_), ProjectionMatrix(r, d), corner};
  }

  void update(const Vector& x) {
    detail::require(x.size() == n_, "PcaLearner: point dimension mismatch");
    detail::require(x.allFinite() && x.norm() <= 1.0 + kUnitBallTolerance,
                    "PcaLearner: data point must satisfy ||x|| <= 1");
    DensityMatrix v = matrix_exp_normalized(matrix_log(state_) - eta_ * SymMatrix::outer(x));
    Vector mixed = variant_ == Variant::kAdaptive ? fixed_share(v.spectrum(), alpha_) : v.spectrum();
    shared_ = DensityMatrix::from_spectrum(v.basis(), mixed);
    state_ = DensityMatrix::from_spectrum(v.basis(), cap(mixed, n_ - k_).weights(), n_ - k_);
    exponentiated_ = std::move(v);
    ++steps_;
  }

 private:
  static DensityMatrix initial(Index n, Index k) {
    detail::require(k >= 1 && k < n, "PcaLearner: need 1 <= k < n");
    return DensityMatrix::uniform(n, n - k);
  }

  Index n_;
  Index k_;
  double eta_;
  double alpha_;
  Variant variant_;
  std::mt19937_64 rng_;
  DensityMatrix state_;
  DensityMatrix shared_;
  std::optional<DensityMatrix> exponentiated_;
  std::int64_t steps_ = 0;
};

}  // namespace adapca
