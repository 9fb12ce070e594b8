#pragma once

// Baselines for the PCA experiments (Follow the Leader, best fixed
// projection) and interval comparators: the loss of the best fixed decision
// in hindsight over a contiguous window [r, s] of a stream, for each of the
// four learning problems.
//
// Steps are numbered from 1 and intervals are inclusive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "adapca/error.hpp"
#include "adapca/linalg.hpp"
#include "adapca/variance_learners.hpp"

namespace adapca {

using DataStream = std::vector<Vector>;

namespace detail {

inline SymMatrix scatter(std::span<const Vector> data, Index n) {
  Matrix s = Matrix::Zero(n, n);
  for (const Vector& x : data) {
    require(x.size() == n, "scatter: inconsistent point dimension");
    s.noalias() += x * x.transpose();
  }
  return SymMatrix(s);
}

inline void require_interval(std::int64_t r, std::int64_t s, std::int64_t horizon) {
  require(r >= 1 && r <= s && s <= horizon,
          "bad interval [" + std::to_string(r) + ", " + std::to_string(s) + "] for horizon " +
              std::to_string(horizon));
}

// Sum of the smallest (n - k) eigenvalues, clamped at zero.
inline double tail_eigenvalue_sum(const SymMatrix& a, Index k) {
  const Vector eig = sym_eigenvalues(a);
  return std::max(0.0, eig.tail(eig.size() - k).sum());
}

}  // namespace detail

/// Projector on the first k coordinate axes.
inline ProjectionMatrix coordinate_projection(Index n, Index k) {
  Matrix p = Matrix::Zero(n, n);
  p.topLeftCorner(k, k).setIdentity();
  return ProjectionMatrix(p, k);
}

/// Best rank-k projection for the points seen so far; the first k
/// coordinate axes when the history is empty.
inline ProjectionMatrix follow_the_leader(std::span<const Vector> history, Index n, Index k) {
  detail::require(k >= 1 && k < n, "follow_the_leader: need 1 <= k < n");
  if (history.empty()) return coordinate_projection(n, k);
  return top_k_projection(detail::scatter(history, n), k);
}

/// Minimizer of the total compression loss over the whole stream.
inline ProjectionMatrix best_fixed_projection(std::span<const Vector> data, Index k) {
  detail::require(!data.empty(), "best_fixed_projection: empty stream");
  return top_k_projection(detail::scatter(data, data.front().size()), k);
}

/// Compression loss of the best rank-k projection for steps r..s.
inline double interval_oracle_pca(std::span<const Vector> data, std::int64_t r, std::int64_t s, Index k) {
  detail::require_interval(r, s, static_cast<std::int64_t>(data.size()));
  const auto window = data.subspan(static_cast<std::size_t>(r - 1), static_cast<std::size_t>(s - r + 1));
  const ProjectionMatrix best = top_k_projection(detail::scatter(window, data.front().size()), k);
  double total = 0.0;
  for (const Vector& x : window) total += best.compression_loss(x);
  return total;
}

/// Follow the Leader with an incrementally maintained scatter matrix.
class FollowTheLeader {
 public:
  FollowTheLeader(Index n, Index k) : n_(n), k_(k), scatter_(Matrix::Zero(n, n)) {
    detail::require(k >= 1 && k < n, "FollowTheLeader: need 1 <= k < n");
  }

  ProjectionMatrix choose() const {
    if (seen_ == 0) return coordinate_projection(n_, k_);
    return top_k_projection(SymMatrix(scatter_), k_);
  }

  void observe(const Vector& x) {
    scatter_.noalias() += x * x.transpose();
    ++seen_;
  }

 private:
  Index n_;
  Index k_;
  Matrix scatter_;
  std::int64_t seen_ = 0;
};

/// PCA comparator over arbitrary intervals from prefix scatter matrices:
/// the interval scatter is S_s - S_{r-1} and its best compression loss is the
/// sum of its n-k smallest eigenvalues.
class PcaIntervalOracle {
 public:
  PcaIntervalOracle(std::span<const Vector> data, Index k) : k_(k) {
    detail::require(!data.empty(), "PcaIntervalOracle: empty stream");
    n_ = data.front().size();
    detail::require(k >= 1 && k < n_, "PcaIntervalOracle: need 1 <= k < n");
    prefix_.reserve(data.size() + 1);
    prefix_.push_back(Matrix::Zero(n_, n_));
    for (const Vector& x : data) {
      detail::require(x.size() == n_, "PcaIntervalOracle: inconsistent point dimension");
      prefix_.push_back(prefix_.back() + x * x.transpose());
    }
  }

  std::int64_t horizon() const { return static_cast<std::int64_t>(prefix_.size()) - 1; }

  double operator()(std::int64_t r, std::int64_t s) const {
    detail::require_interval(r, s, horizon());
    return detail::tail_eigenvalue_sum(
        SymMatrix(prefix_[static_cast<std::size_t>(s)] - prefix_[static_cast<std::size_t>(r - 1)]), k_);
  }

 private:
  Index n_ = 0;
  Index k_;
  std::vector<Matrix> prefix_;
};

/// Best subset of n-k experts: (n-k) min_{q in B_{n-k}^n} sum_t q^T l_t, i.e.
/// the sum of the n-k smallest per-expert interval totals.
class ExpertIntervalOracle {
 public:
  ExpertIntervalOracle(std::span<const Vector> losses, Index k) : k_(k) {
    detail::require(!losses.empty(), "ExpertIntervalOracle: empty stream");
    n_ = losses.front().size();
    detail::require(k >= 1 && k < n_, "ExpertIntervalOracle: need 1 <= k < n");
    prefix_.reserve(losses.size() + 1);
    prefix_.push_back(Vector::Zero(n_));
    for (const Vector& l : losses) prefix_.push_back(prefix_.back() + l);
  }

  std::int64_t horizon() const { return static_cast<std::int64_t>(prefix_.size()) - 1; }

  double operator()(std::int64_t r, std::int64_t s) const {
    detail::require_interval(r, s, horizon());
    Vector totals = prefix_[static_cast<std::size_t>(s)] - prefix_[static_cast<std::size_t>(r - 1)];
    std::sort(totals.begin(), totals.end());
    return std::max(0.0, totals.head(n_ - k_).sum());
  }

 private:
  Index n_ = 0;
  Index k_;
  std::vector<Vector> prefix_;
};

/// Best unit vector: the minimum eigenvalue of sum_{t=r}^s C_t.
class UnitVarianceIntervalOracle {
 public:
  explicit UnitVarianceIntervalOracle(std::span<const CovarianceMatrix> covariances) {
    detail::require(!covariances.empty(), "UnitVarianceIntervalOracle: empty stream");
    const Index n = covariances.front().dim();
    prefix_.push_back(Matrix::Zero(n, n));
    for (const auto& c : covariances) prefix_.push_back(prefix_.back() + c.matrix());
  }

  std::int64_t horizon() const { return static_cast<std::int64_t>(prefix_.size()) - 1; }

  double operator()(std::int64_t r, std::int64_t s) const {
    detail::require_interval(r, s, horizon());
    const Vector eig = sym_eigenvalues(
        SymMatrix(prefix_[static_cast<std::size_t>(s)] - prefix_[static_cast<std::size_t>(r - 1)]));
    return std::max(0.0, eig.minCoeff());
  }

 private:
  std::vector<Matrix> prefix_;
};

struct SimplexQuadraticMin {
  double value;
  Vector argmin;
};

/// Euclidean projection onto the probability simplex.
inline Vector project_to_simplex(const Vector& v) {
  Vector sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (Index j = 0; j < sorted.size(); ++j) {
    cumulative += sorted(j);
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted(j) - candidate > 0.0) threshold = candidate;
  }
  return (v.array() - threshold).max(0.0).matrix();
}

/// min_{u in simplex} u^T M u for PSD M by enumerating supports: on each
/// support the KKT system 2 M_SS u = mu 1, 1^T u = 1 is solved and kept when
/// feasible. Exact up to rounding; cost grows as 2^n.
inline SimplexQuadraticMin simplex_quadratic_min_exact(const Matrix& m) {
  const Index n = m.rows();
  detail::require(n >= 1 && n <= 20 && m.cols() == n, "simplex_quadratic_min_exact: need square M with n <= 20");
  SimplexQuadraticMin best{std::numeric_limits<double>::infinity(), Vector::Zero(n)};
  std::vector<Index> support;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    support.clear();
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) support.push_back(i);
    }
    const Index size = static_cast<Index>(support.size());
    Matrix kkt = Matrix::Zero(size + 1, size + 1);
    for (Index a = 0; a < size; ++a) {
      for (Index b = 0; b < size; ++b) kkt(a, b) = 2.0 * m(support[a], support[b]);
      kkt(a, size) = -1.0;
      kkt(size, a) = 1.0;
    }
    Vector rhs = Vector::Zero(size + 1);
    rhs(size) = 1.0;
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Vector solution = lu.solve(rhs);
    if (solution.head(size).minCoeff() < -1e-12) continue;
    Vector u = Vector::Zero(n);
    for (Index a = 0; a < size; ++a) u(support[a]) = std::max(0.0, solution(a));
    u /= u.sum();
    const double value = u.dot(m * u);
    if (value < best.value) best = {value, u};
  }
  return best;
}

/// min_{u in simplex} u^T M u by accelerated projected gradient from the
/// uniform point and `starts - 1` random Dirichlet points.
template <class Rng>
SimplexQuadraticMin simplex_quadratic_min_pg(const Matrix& m, int starts, Rng& rng, int iterations = 5000) {
  const Index n = m.rows();
  detail::require(n >= 1 && m.cols() == n, "simplex_quadratic_min_pg: M must be square");
  const double lipschitz = std::max(2.0 * sym_eigenvalues(SymMatrix(m)).maxCoeff(), 1e-12);
  std::exponential_distribution<double> exponential(1.0);
  SimplexQuadraticMin best{std::numeric_limits<double>::infinity(), Vector::Zero(n)};
  for (int start = 0; start < std::max(starts, 1); ++start) {
    Vector u(n);
    if (start == 0) {
      u.setConstant(1.0 / static_cast<double>(n));
    } else {
      for (Index i = 0; i < n; ++i) u(i) = exponential(rng);
      u /= u.sum();
    }
    Vector momentum = u;
    double t = 1.0;
    for (int it = 0; it < iterations; ++it) {
      const Vector next = project_to_simplex(momentum - (2.0 / lipschitz) * (m * momentum));
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      momentum = next + ((t - 1.0) / t_next) * (next - u);
      if ((next - u).lpNorm<Eigen::Infinity>() < 1e-15) {
        u = next;
        break;
      }
      u = next;
      t = t_next;
    }
    const double value = u.dot(m * u);
    if (value < best.value) best = {value, u};
  }
  return best;
}

/// Best simplex vector: min_u u^T (sum_{t=r}^s C_t) u. Exact support
/// enumeration up to n = 12, projected gradient above that.
class SimplexVarianceIntervalOracle {
 public:
  explicit SimplexVarianceIntervalOracle(std::span<const CovarianceMatrix> covariances) {
    detail::require(!covariances.empty(), "SimplexVarianceIntervalOracle: empty stream");
    const Index n = covariances.front().dim();
    prefix_.push_back(Matrix::Zero(n, n));
    for (const auto& c : covariances) prefix_.push_back(prefix_.back() + c.matrix());
  }

  std::int64_t horizon() const { return static_cast<std::int64_t>(prefix_.size()) - 1; }

  double operator()(std::int64_t r, std::int64_t s) const {
    detail::require_interval(r, s, horizon());
    const Matrix m = SymMatrix(prefix_[static_cast<std::size_t>(s)] - prefix_[static_cast<std::size_t>(r - 1)]).matrix();
    if (m.rows() <= 12) return std::max(0.0, simplex_quadratic_min_exact(m).value);
    std::mt19937_64 rng(static_cast<std::uint64_t>(r) * 1000003u + static_cast<std::uint64_t>(s));
    return std::max(0.0, simplex_quadratic_min_pg(m, 8, rng).value);
  }

 private:
  std::vector<Matrix> prefix_;
};

}  // namespace adapca
