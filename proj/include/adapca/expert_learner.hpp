#pragma once

// Adaptive best subset of experts: Hedge update, fixed-share mixing, capping
// onto B_{n-k}^n, and a randomized subset drawn from the corner mixture.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adapca/capped_simplex.hpp"
#include "adapca/error.hpp"
#include "adapca/linalg.hpp"

namespace adapca {

/// Whether an update includes the fixed-share step. `kStatic` runs the
/// original static-regret algorithm with that step removed.
enum class Variant { kAdaptive, kStatic };

/// Learning-rate and share-rate constants derived from a horizon and a loss budget.
struct Tuning {
  double alpha;
  double D;
  double eta;
};

/// alpha = 1/(T(n-k)+1), D = (n-k) ln(n(1+(n-k)T)) + 1, eta = ln(1 + sqrt(2D/L)).
inline Tuning tune_expert(std::int64_t horizon, Index n, Index k, double loss_budget) {
  detail::require(horizon >= 1, "tune_expert: horizon must be >= 1");
  detail::require(k >= 1 && k < n, "tune_expert: need 1 <= k < n");
  detail::require(loss_budget > 0.0, "tune_expert: loss budget must be positive");
  const double d = static_cast<double>(n - k);
  const double t = static_cast<double>(horizon);
  Tuning out;
  out.alpha = 1.0 / (t * d + 1.0);
  out.D = d * std::log(static_cast<double>(n) * (1.0 + d * t)) + 1.0;
  out.eta = std::log1p(std::sqrt(2.0 * out.D / loss_budget));
  return out;
}

struct ExpertSelection {
  Corner corner;
  /// The k experts outside the drawn corner's support.
  std::vector<Index> subset;
};

class ExpertLearner {
 public:
  ExpertLearner(Index n, Index k, double eta, double alpha, std::uint64_t seed,
                Variant variant = Variant::kAdaptive)
      : n_(n),
        k_(k),
        eta_(eta),
        alpha_(alpha),
        variant_(variant),
        rng_(seed),
        weights_(CappedSimplexVector::uniform(n, n > k ? n - k : 1)),
        shared_(weights_.weights()) {
    detail::require(k >= 1 && k < n, "ExpertLearner: need 1 <= k < n");
    detail::require(eta > 0.0 && std::isfinite(eta), "ExpertLearner: eta must be positive");
    detail::require(alpha >= 0.0 && alpha <= 1.0, "ExpertLearner: alpha outside [0, 1]");
  }

  Index n() const { return n_; }
  Index k() const { return k_; }
  double eta() const { return eta_; }
  double alpha() const { return alpha_; }
  std::int64_t steps() const { return steps_; }

  /// Current w_t in B_{n-k}^n.
  const CappedSimplexVector& weights() const { return weights_; }
  /// The pre-cap vector that w_t was projected from (w_1 itself at t = 1).
  const Vector& shared_weights() const { return shared_; }
  /// Normalized Hedge weights v_{t+1} produced by the latest update.
  const Vector& exponentiated_weights() const { return exponentiated_; }

  /// (n-k) w_t, the per-expert probability of being charged.
  Vector expected_loss_weights() const {
    return static_cast<double>(n_ - k_) * weights_.weights();
  }

  /// (n-k) w_t^T loss: expected loss of the drawn corner's support.
  double expected_loss(const Vector& loss) const {
    detail::require(loss.size() == n_, "ExpertLearner: loss size mismatch");
    return expected_loss_weights().dot(loss);
  }

  ExpertSelection select() {
    const MixtureDecomposition mixture = decompose(weights_);
    const Corner& corner = sample_corner(mixture, rng_);
    return {corner, corner.zero_set()};
  }

  void update(const Vector& loss) {
    detail::require(loss.size() == n_, "ExpertLearner: loss size mismatch");
    detail::require(loss.allFinite() && loss.minCoeff() >= 0.0 && loss.maxCoeff() <= 1.0,
                    "ExpertLearner: loss entries must lie in [0, 1]");
    const Vector& w = weights_.weights();
    Vector v(n_);
    for (Index i = 0; i < n_; ++i) v(i) = w(i) * std::exp(-eta_ * loss(i));
    v /= v.sum();
    exponentiated_ = v;
    shared_ = variant_ == Variant::kAdaptive ? fixed_share(v, alpha_) : v;
    weights_ = cap(shared_, n_ - k_);
    ++steps_;
  }

 private:
  Index n_;
  Index k_;
  double eta_;
  double alpha_;
  Variant variant_;
  std::mt19937_64 rng_;
  CappedSimplexVector weights_;
  Vector shared_;
  Vector exponentiated_;
  std::int64_t steps_ = 0;
};

}  // namespace adapca
