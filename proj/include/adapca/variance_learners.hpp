#pragma once

// Online adaptive variance minimization. UnitVarianceLearner plays unit
// vectors drawn from the eigenbasis of a density matrix; SimplexVarianceLearner
// plays a probability vector updated by exponentiated gradient. Both mix in
// the uniform distribution after every step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "adapca/capped_simplex.hpp"
#include "adapca/error.hpp"
#include "adapca/expert_learner.hpp"
#include "adapca/linalg.hpp"

namespace adapca {

inline constexpr double kCovarianceTolerance = 1e-9;

/// Symmetric C with 0 <= C <= I.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(const SymMatrix& c) : entries_(c) {
    const Vector eig = sym_eigenvalues(c);
    if (eig.size() > 0) {
      detail::require(eig.minCoeff() >= -kCovarianceTolerance && eig.maxCoeff() <= 1.0 + kCovarianceTolerance,
                      "CovarianceMatrix: eigenvalues must lie in [0, 1]");
    }
  }
  explicit CovarianceMatrix(const Matrix& c) : CovarianceMatrix(SymMatrix(c)) {}

  Index dim() const { return entries_.dim(); }
  const SymMatrix& sym() const { return entries_; }
  const Matrix& matrix() const { return entries_.matrix(); }

 private:
  SymMatrix entries_;
};

/// alpha = 1/(T+1), D = ln(n(1+T)) + 1, eta = ln(1 + sqrt(2D/L)).
inline Tuning tune_unit_var_L(std::int64_t horizon, Index n, double loss_budget) {
  detail::require(horizon >= 1, "tune_unit_var_L: horizon must be >= 1");
  detail::require(n >= 1, "tune_unit_var_L: n must be >= 1");
  detail::require(loss_budget > 0.0, "tune_unit_var_L: loss budget must be positive");
  const double t = static_cast<double>(horizon);
  Tuning out;
  out.alpha = 1.0 / (t + 1.0);
  out.D = std::log(static_cast<double>(n) * (1.0 + t)) + 1.0;
  out.eta = std::log1p(std::sqrt(2.0 * out.D / loss_budget));
  return out;
}

struct HorizonTuning {
  double alpha;
  double eta;
};

/// alpha = 1/(T+1), eta = sqrt(ln(n(1+T)))/sqrt(T); needs no loss budget.
inline HorizonTuning tune_unit_var_T(std::int64_t horizon, Index n) {
  detail::require(horizon >= 1, "tune_unit_var_T: horizon must be >= 1");
  detail::require(n >= 1, "tune_unit_var_T: n must be >= 1");
  const double t = static_cast<double>(horizon);
  return {1.0 / (t + 1.0), std::sqrt(std::log(static_cast<double>(n) * (1.0 + t))) / std::sqrt(t)};
}

struct SimplexTuning {
  double alpha;
  double c;
  double b;
  double a;
  double eta;
};

/// c = sqrt(2 ln((1+T)n) + 2)/sqrt(L), b = c/2, a = b/(2b+1), eta = 2a.
inline SimplexTuning tune_simplex_var(std::int64_t horizon, Index n, double loss_budget) {
  detail::require(horizon >= 1, "tune_simplex_var: horizon must be >= 1");
  detail::require(n >= 1, "tune_simplex_var: n must be >= 1");
  detail::require(loss_budget > 0.0, "tune_simplex_var: loss budget must be positive");
  const double t = static_cast<double>(horizon);
  SimplexTuning out;
  out.alpha = 1.0 / (t + 1.0);
  out.c = std::sqrt(2.0 * std::log((1.0 + t) * static_cast<double>(n)) + 2.0) / std::sqrt(loss_budget);
  out.b = out.c / 2.0;
  out.a = out.b / (2.0 * out.b + 1.0);
  out.eta = 2.0 * out.a;
  return out;
}

namespace detail {

template <class Rng>
Index sample_index(const Vector& probabilities, Rng& rng) {
  double total = 0.0;
  for (double p : probabilities) total += std::max(p, 0.0);
  std::uniform_real_distribution<double> uniform(0.0, total);
  const double u = uniform(rng);
  double cumulative = 0.0;
  Index last_positive = 0;
  for (Index j = 0; j < probabilities.size(); ++j) {
    if (probabilities(j) <= 0.0) continue;
    last_positive = j;
    cumulative += probabilities(j);
    if (u < cumulative) return j;
  }
  return last_positive;
}

}  // namespace detail

/// Variance minimization over unit vectors via a density matrix Y_t.
class UnitVarianceLearner {
 public:
  UnitVarianceLearner(Index n, double eta, double alpha, std::uint64_t seed,
                      Variant variant = Variant::kAdaptive)
      : n_(n), eta_(eta), alpha_(alpha), variant_(variant), rng_(seed), state_(DensityMatrix::uniform(n)) {
    detail::require(eta >= 0.0 && std::isfinite(eta), "UnitVarianceLearner: eta must be non-negative");
    detail::require(alpha >= 0.0 && alpha <= 1.0, "UnitVarianceLearner: alpha outside [0, 1]");
  }

  Index n() const { return n_; }
  double eta() const { return eta_; }
  double alpha() const { return alpha_; }

  /// Y_t.
  const DensityMatrix& state() const { return state_; }
  /// V_{t+1} from the latest update.
  const std::optional<DensityMatrix>& exponentiated_state() const { return exponentiated_; }

  /// Eigenvector j of Y_t with probability sigma_j.
  Vector choose() {
    const Index j = detail::sample_index(state_.spectrum(), rng_);
    return state_.basis().col(j);
  }

  /// Tr(Y_t C).
  double expected_loss(const CovarianceMatrix& c) const {
    return trace_product(state_.matrix(), c.matrix());
  }

  void update(const CovarianceMatrix& c) {
    detail::require(c.dim() == n_, "UnitVarianceLearner: dimension mismatch");
    DensityMatrix v = matrix_exp_normalized(matrix_log(state_) - eta_ * c.sym());
    Vector mixed = variant_ == Variant::kAdaptive ? fixed_share(v.spectrum(), alpha_) : v.spectrum();
    state_ = DensityMatrix::from_spectrum(v.basis(), std::move(mixed));
    exponentiated_ = std::move(v);
  }

 private:
  Index n_;
  double eta_;
  double alpha_;
  Variant variant_;
  std::mt19937_64 rng_;
  DensityMatrix state_;
  std::optional<DensityMatrix> exponentiated_;
};

/// Variance minimization over the probability simplex; plays y_t deterministically.
class SimplexVarianceLearner {
 public:
  SimplexVarianceLearner(Index n, double eta, double alpha, Variant variant = Variant::kAdaptive)
      : n_(n), eta_(eta), alpha_(alpha), variant_(variant) {
    detail::require(n >= 1, "SimplexVarianceLearner: n must be >= 1");
    detail::require(eta >= 0.0 && std::isfinite(eta), "SimplexVarianceLearner: eta must be non-negative");
    detail::require(alpha >= 0.0 && alpha <= 1.0, "SimplexVarianceLearner: alpha outside [0, 1]");
    weights_ = Vector::Constant(n, 1.0 / static_cast<double>(n));
  }

  Index n() const { return n_; }
  double eta() const { return eta_; }
  double alpha() const { return alpha_; }

  const Vector& choose() const { return weights_; }
  /// Normalized exponentiated-gradient weights v_{t+1} from the latest update.
  const Vector& exponentiated_weights() const { return exponentiated_; }

  /// y_t^T C y_t.
  double loss(const CovarianceMatrix& c) const { return weights_.dot(c.matrix() * weights_); }

  void update(const CovarianceMatrix& c) {
    detail::require(c.dim() == n_, "SimplexVarianceLearner: dimension mismatch");
    const Vector gradient = c.matrix() * weights_;
    Vector v(n_);
    for (Index i = 0; i < n_; ++i) v(i) = weights_(i) * std::exp(-eta_ * gradient(i));
    v /= v.sum();
    exponentiated_ = v;
    weights_ = variant_ == Variant::kAdaptive ? fixed_share(v, alpha_) : v;
  }

 private:
  Index n_;
  double eta_;
  double alpha_;
  Variant variant_;
  Vector weights_;
  Vector exponentiated_;
};

}  // namespace adapca
