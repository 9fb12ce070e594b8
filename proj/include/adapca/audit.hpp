#pragma once

// Numerical audits of the regret guarantees. Each bound audit draws a random
// instance, measures the loss budget L as the comparator loss on [1, T]
// (the largest comparator value over all intervals, since losses are
// non-negative), tunes the learner from it, runs the learner, and compares
// the measured adaptive regret of expected losses with the closed-form bound.
// The per-step audits evaluate the one-step inequalities the bounds rest on.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adapca/capped_simplex.hpp"
#include "adapca/comparators.hpp"
#include "adapca/expert_learner.hpp"
#include "adapca/harness.hpp"
#include "adapca/linalg.hpp"
#include "adapca/pca_learner.hpp"
#include "adapca/variance_learners.hpp"

namespace adapca {

enum class AuditSuite { kExperts, kPca, kUnitVariance, kSimplexVariance };

/// Instance family fed to a learner: random draws or an all-zero sequence.
enum class Adversary { kRandom, kZero };

struct AuditSettings {
  Index n = 10;
  Index k = 3;
  std::int64_t horizon = 200;
  int trials = 20;
  std::uint64_t seed = 42;
  Adversary adversary = Adversary::kRandom;
};

/// Instance sizes used by the acceptance audits.
inline AuditSettings default_audit_settings(AuditSuite suite) {
  switch (suite) {
    case AuditSuite::kExperts:
      return {10, 3, 200, 20};
    case AuditSuite::kPca:
      return {8, 2, 150, 10};
    case AuditSuite::kUnitVariance:
    case AuditSuite::kSimplexVariance:
      return {6, 1, 200, 10};
  }
  return {};
}

struct BoundCheck {
  std::string label;
  int trial = 0;
  double regret = 0.0;
  double bound = 0.0;
  double loss_budget = 0.0;
  Interval interval;

  bool holds() const { return regret <= bound; }
};

// ---------------------------------------------------------------------------
// Random instances

/// Orthogonal matrix from the QR factorization of a Gaussian matrix.
template <class Rng>
Matrix random_orthogonal(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

/// Dirichlet(1, ..., 1) vector capped onto B_d^n.
template <class Rng>
CappedSimplexVector random_capped_vector(Index n, Index d, Rng& rng) {
  std::exponential_distribution<double> exponential(1.0);
  Vector w(n);
  for (Index i = 0; i < n; ++i) w(i) = exponential(rng);
  w /= w.sum();
  return cap(w, d);
}

/// Density matrix with random eigenbasis and random spectrum in B_d^n.
template <class Rng>
DensityMatrix random_density_matrix(Index n, Index d, Rng& rng) {
  Matrix basis = random_orthogonal(n, rng);
  Vector spectrum = random_capped_vector(n, d, rng).weights();
  return DensityMatrix::from_spectrum(std::move(basis), std::move(spectrum), d);
}

/// Covariance Q diag(lambda) Q^T with lambda uniform in [0, 1].
template <class Rng>
CovarianceMatrix random_covariance(Index n, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Matrix q = random_orthogonal(n, rng);
  Vector spectrum(n);
  for (Index i = 0; i < n; ++i) spectrum(i) = uniform(rng);
  return CovarianceMatrix(detail::compose(q, spectrum));
}

/// Piecewise-stationary covariance stream: `blocks` segments, each with its
/// own eigenbasis and base spectrum, per-step eigenvalues jittered by a
/// uniform factor in [0, 1].
template <class Rng>
std::vector<CovarianceMatrix> random_covariance_stream(Index n, std::int64_t horizon, std::int64_t blocks,
                                                       Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<CovarianceMatrix> out;
  out.reserve(static_cast<std::size_t>(horizon));
  Matrix basis;
  Vector base(n);
  const std::int64_t block_length = std::max<std::int64_t>(1, (horizon + blocks - 1) / blocks);
  for (std::int64_t t = 0; t < horizon; ++t) {
    if (t % block_length == 0) {
      basis = random_orthogonal(n, rng);
      for (Index i = 0; i < n; ++i) base(i) = uniform(rng);
    }
    Vector spectrum(n);
    for (Index i = 0; i < n; ++i) spectrum(i) = base(i) * uniform(rng);
    out.emplace_back(detail::compose(basis, spectrum));
  }
  return out;
}

/// Loss vectors with entries uniform in [0, 1].
template <class Rng>
std::vector<Vector> random_loss_stream(Index n, std::int64_t horizon, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Vector> out;
  for (std::int64_t t = 0; t < horizon; ++t) {
    Vector l(n);
    for (Index i = 0; i < n; ++i) l(i) = uniform(rng);
    out.push_back(std::move(l));
  }
  return out;
}

/// Switching low-rank Gaussian points in the unit ball (three blocks, rank 2).
template <class Rng>
DataStream random_point_stream(Index n, std::int64_t horizon, Rng& rng) {
  const std::int64_t blocks = std::min<std::int64_t>(3, horizon);
  const std::int64_t per_block = (horizon + blocks - 1) / blocks;
  DataStream points = generate_toy_switching(ToyStreamConfig{n, blocks, per_block, std::min<Index>(2, n)}, rng).points;
  points.resize(static_cast<std::size_t>(horizon));
  return points;
}

namespace detail {

// Any L at least the comparator loss satisfies the bounds' hypothesis; an
// all-zero instance uses L = 1.
inline double loss_budget(double comparator) { return comparator > 0.0 ? comparator : 1.0; }

inline double freund_bound(double loss_budget, double d) { return std::sqrt(2.0 * loss_budget * d) + d; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Bound audits

/// Expert subsets: regret <= sqrt(2 L D) + D.
inline std::vector<BoundCheck> audit_experts(const AuditSettings& settings) {
  std::vector<BoundCheck> out;
  for (int trial = 0; trial < settings.trials; ++trial) {
    std::mt19937_64 rng(detail::derive_seed(settings.seed, static_cast<std::uint64_t>(trial)));
    std::vector<Vector> losses = settings.adversary == Adversary::kZero
                                     ? std::vector<Vector>(static_cast<std::size_t>(settings.horizon),
                                                           Vector::Zero(settings.n))
                                     : random_loss_stream(settings.n, settings.horizon, rng);
    const ExpertIntervalOracle oracle(losses, settings.k);
    const IntervalTable table = IntervalTable::build(oracle, settings.horizon);
    const double budget = detail::loss_budget(table(1, settings.horizon));
    const Tuning tuning = tune_expert(settings.horizon, settings.n, settings.k, budget);
    ExpertLearner learner(settings.n, settings.k, tuning.eta, tuning.alpha, rng());
    std::vector<double> expected;
    for (const Vector& l : losses) {
      expected.push_back(learner.expected_loss(l));
      learner.update(l);
    }
    const RegretResult regret = adaptive_regret(expected, table);
    out.push_back({"experts", trial, regret.value, detail::freund_bound(budget, tuning.D), budget, regret.interval});
  }
  return out;
}

/// Online PCA: regret <= sqrt(2 L D) + D.
inline std::vector<BoundCheck> audit_pca(const AuditSettings& settings) {
  std::vector<BoundCheck> out;
  for (int trial = 0; trial < settings.trials; ++trial) {
    std::mt19937_64 rng(detail::derive_seed(settings.seed, static_cast<std::uint64_t>(trial)));
    DataStream data = settings.adversary == Adversary::kZero
                          ? DataStream(static_cast<std::size_t>(settings.horizon), Vector::Zero(settings.n))
                          : random_point_stream(settings.n, settings.horizon, rng);
    const PcaIntervalOracle oracle(data, settings.k);
    const IntervalTable table = IntervalTable::build(oracle, settings.horizon);
    const double budget = detail::loss_budget(table(1, settings.horizon));
    const Tuning tuning = tune_pca(settings.horizon, settings.n, settings.k, budget);
    PcaLearner learner(settings.n, settings.k, tuning.eta, tuning.alpha, rng());
    std::vector<double> expected;
    for (const Vector& x : data) {
      expected.push_back(learner.expected_loss(x));
      learner.update(x);
    }
    const RegretResult regret = adaptive_regret(expected, table);
    out.push_back({"pca", trial, regret.value, detail::freund_bound(budget, tuning.D), budget, regret.interval});
  }
  return out;
}

/// Unit-sphere variance. Two runs per trial: the horizon-tuned learner
/// against (1/eta)(ln(n/alpha) + T ln(1/(1-alpha))) + eta T/2, and the
/// budget-tuned learner against sqrt(2 L D) + D.
inline std::vector<BoundCheck> audit_unit_variance(const AuditSettings& settings) {
  std::vector<BoundCheck> out;
  const double t_total = static_cast<double>(settings.horizon);
  const double n = static_cast<double>(settings.n);
  for (int trial = 0; trial < settings.trials; ++trial) {
    std::mt19937_64 rng(detail::derive_seed(settings.seed, static_cast<std::uint64_t>(trial)));
    std::vector<CovarianceMatrix> covariances =
        settings.adversary == Adversary::kZero
            ? std::vector<CovarianceMatrix>(static_cast<std::size_t>(settings.horizon),
                                            CovarianceMatrix(Matrix::Zero(settings.n, settings.n)))
            : random_covariance_stream(settings.n, settings.horizon, 4, rng);
    const UnitVarianceIntervalOracle oracle(covariances);
    const IntervalTable table = IntervalTable::build(oracle, settings.horizon);
    const double budget = detail::loss_budget(table(1, settings.horizon));

    auto run = [&](double eta, double alpha, std::uint64_t seed) {
      UnitVarianceLearner learner(settings.n, eta, alpha, seed);
      std::vector<double> expected;
      for (const auto& c : covariances) {
        expected.push_back(learner.expected_loss(c));
        learner.update(c);
      }
      return adaptive_regret(expected, table);
    };

    const HorizonTuning horizon_tuning = tune_unit_var_T(settings.horizon, settings.n);
    const RegretResult horizon_regret = run(horizon_tuning.eta, horizon_tuning.alpha, rng());
    const double horizon_bound =
        (std::log(n / horizon_tuning.alpha) + t_total * std::log(1.0 / (1.0 - horizon_tuning.alpha))) /
            horizon_tuning.eta +
        horizon_tuning.eta * t_total / 2.0;
    out.push_back({"var-unit/horizon", trial, horizon_regret.value, horizon_bound, budget, horizon_regret.interval});

    const Tuning budget_tuning = tune_unit_var_L(settings.horizon, settings.n, budget);
    const RegretResult budget_regret = run(budget_tuning.eta, budget_tuning.alpha, rng());
    out.push_back({"var-unit/budget", trial, budget_regret.value, detail::freund_bound(budget, budget_tuning.D),
                   budget, budget_regret.interval});
  }
  return out;
}

/// Simplex variance: regret <= 2 sqrt(2 L (ln((1+T)n) + 1)) + 2 ln((1+T)n).
inline std::vector<BoundCheck> audit_simplex_variance(const AuditSettings& settings) {
  std::vector<BoundCheck> out;
  const double log_term = std::log((1.0 + static_cast<double>(settings.horizon)) * static_cast<double>(settings.n));
  for (int trial = 0; trial < settings.trials; ++trial) {
    std::mt19937_64 rng(detail::derive_seed(settings.seed, static_cast<std::uint64_t>(trial)));
    std::vector<CovarianceMatrix> covariances =
        settings.adversary == Adversary::kZero
            ? std::vector<CovarianceMatrix>(static_cast<std::size_t>(settings.horizon),
                                            CovarianceMatrix(Matrix::Zero(settings.n, settings.n)))
            : random_covariance_stream(settings.n, settings.horizon, 4, rng);
    const SimplexVarianceIntervalOracle oracle(covariances);
    const IntervalTable table = IntervalTable::build(oracle, settings.horizon);
    const double budget = detail::loss_budget(table(1, settings.horizon));
    const SimplexTuning tuning = tune_simplex_var(settings.horizon, settings.n, budget);
    SimplexVarianceLearner learner(settings.n, tuning.eta, tuning.alpha);
    std::vector<double> losses;
    for (const auto& c : covariances) {
      losses.push_back(learner.loss(c));
      learner.update(c);
    }
    const RegretResult regret = adaptive_regret(losses, table);
    const double bound = 2.0 * std::sqrt(2.0 * budget * (log_term + 1.0)) + 2.0 * log_term;
    out.push_back({"var-simplex", trial, regret.value, bound, budget, regret.interval});
  }
  return out;
}

inline std::vector<BoundCheck> run_audit(AuditSuite suite, const AuditSettings& settings) {
  switch (suite) {
    case AuditSuite::kExperts:
      return audit_experts(settings);
    case AuditSuite::kPca:
      return audit_pca(settings);
    case AuditSuite::kUnitVariance:
      return audit_unit_variance(settings);
    case AuditSuite::kSimplexVariance:
      return audit_simplex_variance(settings);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Per-step inequality audits

struct StepAudit {
  /// max over steps and comparators of (left side - right side); <= 0 when every step holds.
  double worst_gap = -std::numeric_limits<double>::infinity();
  std::int64_t checks = 0;
};

/// w_t^T l (1 - e^{-eta}) - eta q^T l <= sum_i q_i ln(v_{t+1,i} / what_{t,i})
/// for random q in B_{n-k}^n, along a run on uniform random losses.
inline StepAudit step_audit_experts(Index n, Index k, std::int64_t horizon, double eta, double alpha,
                                    std::uint64_t seed, int comparators_per_step = 5) {
  std::mt19937_64 rng(seed);
  const std::vector<Vector> losses = random_loss_stream(n, horizon, rng);
  ExpertLearner learner(n, k, eta, alpha, rng());
  StepAudit audit;
  for (const Vector& l : losses) {
    const Vector w = learner.weights().weights();
    const Vector shared = learner.shared_weights();
    learner.update(l);
    const Vector& v = learner.exponentiated_weights();
    for (int c = 0; c < comparators_per_step; ++c) {
      const Vector q = random_capped_vector(n, n - k, rng).weights();
      const double lhs = w.dot(l) * (1.0 - std::exp(-eta)) - eta * q.dot(l);
      double rhs = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (q(i) > 0.0) rhs += q(i) * std::log(v(i) / shared(i));
      }
      audit.worst_gap = std::max(audit.worst_gap, lhs - rhs);
      ++audit.checks;
    }
  }
  return audit;
}

/// Tr(W_t xx^T)(1 - e^{-eta}) - eta Tr(Q xx^T) <= -Tr(Q ln What_t) + Tr(Q ln V_{t+1})
/// for random Q in B_{n-k}^n, along a run on switching low-rank data.
inline StepAudit step_audit_pca(Index n, Index k, std::int64_t horizon, double eta, double alpha, std::uint64_t seed,
                                int comparators_per_step = 5) {
  std::mt19937_64 rng(seed);
  const DataStream data = random_point_stream(n, horizon, rng);
  PcaLearner learner(n, k, eta, alpha, rng());
  StepAudit audit;
  for (const Vector& x : data) {
    const Matrix w = learner.state().matrix();
    const Matrix log_shared = matrix_log(learner.shared_state()).matrix();
    learner.update(x);
    const Matrix log_next = matrix_log(*learner.exponentiated_state()).matrix();
    const Matrix instance = x * x.transpose();
    for (int c = 0; c < comparators_per_step; ++c) {
      const Matrix q = random_density_matrix(n, n - k, rng).matrix();
      const double lhs = trace_product(w, instance) * (1.0 - std::exp(-eta)) - eta * trace_product(q, instance);
      const double rhs = -trace_product(q, log_shared) + trace_product(q, log_next);
      audit.worst_gap = std::max(audit.worst_gap, lhs - rhs);
      ++audit.checks;
    }
  }
  return audit;
}

/// Tr(Y_t C) - Tr(Q C) <= (Tr(Q ln V_{t+1}) - Tr(Q ln Y_t))/eta + eta/2 for
/// random density matrices Q, along a run on a random covariance stream.
inline StepAudit step_audit_unit_variance(Index n, std::int64_t horizon, double eta, double alpha,
                                          std::uint64_t seed, int comparators_per_step = 5) {
  std::mt19937_64 rng(seed);
  const std::vector<CovarianceMatrix> covariances = random_covariance_stream(n, horizon, 4, rng);
  UnitVarianceLearner learner(n, eta, alpha, rng());
  StepAudit audit;
  for (const auto& c : covariances) {
    const Matrix y = learner.state().matrix();
    const Matrix log_y = matrix_log(learner.state()).matrix();
    learner.update(c);
    const Matrix log_next = matrix_log(*learner.exponentiated_state()).matrix();
    for (int j = 0; j < comparators_per_step; ++j) {
      const Matrix q = random_density_matrix(n, 1, rng).matrix();
      const double lhs = trace_product(y, c.matrix()) - trace_product(q, c.matrix());
      const double rhs = (trace_product(q, log_next) - trace_product(q, log_y)) / eta + eta / 2.0;
      audit.worst_gap = std::max(audit.worst_gap, lhs - rhs);
      ++audit.checks;
    }
  }
  return audit;
}

}  // namespace adapca
