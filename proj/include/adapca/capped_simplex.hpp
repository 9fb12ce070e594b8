#pragma once

// Geometry of the capped probability simplex B_d^n = { w : sum w = 1,
// 0 <= w_i <= 1/d }: the relative-entropy capping projection, the
// decomposition of a capped vector into a mixture of corners, corner
// sampling, and the fixed-share mixing step.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "adapca/error.hpp"
#include "adapca/linalg.hpp"

namespace adapca {

inline constexpr double kSimplexTolerance = 1e-10;

/// Threshold below which a residual weight counts as zero while decomposing.
inline constexpr double kDecompositionZero = 1e-12;

namespace detail {

inline void require_probability_vector(const Vector& v, const char* who) {
  require(v.size() > 0, std::string(who) + ": empty vector");
  require(v.allFinite(), std::string(who) + ": non-finite weight");
  require(v.minCoeff() >= 0.0, std::string(who) + ": negative weight");
  require(std::abs(v.sum() - 1.0) <= 1e-10, std::string(who) + ": weights do not sum to 1");
}

// Indices sorted by decreasing value, ties by increasing index.
inline std::vector<Index> decreasing_order(const Vector& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&v](Index a, Index b) { return v(a) > v(b); });
  return order;
}

}  // namespace detail

/// Probability vector with every coordinate at most 1/cap.
class CappedSimplexVector {
 public:
  CappedSimplexVector(Vector weights, Index cap) : weights_(std::move(weights)), cap_(cap) {
    const Index n = weights_.size();
    detail::require(cap_ >= 1 && cap_ <= n, "CappedSimplexVector: cap outside [1, n]");
    detail::require(weights_.allFinite() && weights_.minCoeff() >= 0.0,
                    "CappedSimplexVector: weights must be finite and non-negative");
    detail::require(std::abs(weights_.sum() - 1.0) <= kSimplexTolerance,
                    "CappedSimplexVector: weights do not sum to 1");
    detail::require(weights_.maxCoeff() <= 1.0 / static_cast<double>(cap_) + kSimplexTolerance,
                    "CappedSimplexVector: weight exceeds 1/cap");
  }

  /// Uniform 1/n, valid for every cap.
  static CappedSimplexVector uniform(Index n, Index cap) {
    return {Vector::Constant(n, 1.0 / static_cast<double>(n)), cap};
  }

  Index size() const { return weights_.size(); }
  Index cap() const { return cap_; }
  const Vector& weights() const { return weights_; }
  double operator()(Index i) const { return weights_(i); }

 private:
  Vector weights_;
  Index cap_;
};

/// Extreme point of B_d^n: value 1/d on `support`, zero elsewhere.
class Corner {
 public:
  Corner(Index n, std::vector<Index> support) : n_(n), support_(std::move(support)) {
    std::sort(support_.begin(), support_.end());
    detail::require(!support_.empty() && static_cast<Index>(support_.size()) <= n_,
                    "Corner: support size outside [1, n]");
    detail::require(std::adjacent_find(support_.begin(), support_.end()) == support_.end(),
                    "Corner: repeated index");
    detail::require(support_.front() >= 0 && support_.back() < n_, "Corner: index out of range");
  }

  Index size() const { return n_; }
  Index cap() const { return static_cast<Index>(support_.size()); }
  const std::vector<Index>& support() const { return support_; }

  /// Indices outside the support, ascending.
  std::vector<Index> zero_set() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(n_ - cap()));
    auto it = support_.begin();
    for (Index i = 0; i < n_; ++i) {
      if (it != support_.end() && *it == i) {
        ++it;
      } else {
        out.push_back(i);
      }
    }
    return out;
  }

  Vector vector() const {
    Vector out = Vector::Zero(n_);
    const double level = 1.0 / static_cast<double>(cap());
    for (Index i : support_) out(i) = level;
    return out;
  }

  friend bool operator==(const Corner&, const Corner&) = default;

 private:
  Index n_;
  std::vector<Index> support_;
};

struct MixtureTerm {
  double probability;
  Corner corner;
};

/// Convex combination of corners, sum_j p_j r_j.
struct MixtureDecomposition {
  std::vector<MixtureTerm> terms;

  double total_probability() const {
    double total = 0.0;
    for (const auto& term : terms) total += term.probability;
    return total;
  }

  Vector reconstruct() const {
    if (terms.empty()) return {};
    Vector out = Vector::Zero(terms.front().corner.size());
    for (const auto& term : terms) out += term.probability * term.corner.vector();
    return out;
  }
};

/// Relative-entropy projection of a probability vector onto B_d^n. The
/// largest coordinates are clamped to 1/d one at a time and the remainder
/// rescaled to the leftover mass until no coordinate exceeds 1/d.
inline CappedSimplexVector cap(const Vector& w, Index d) {
  detail::require_probability_vector(w, "cap");
  const Index n = w.size();
  detail::require(d >= 1 && d <= n, "cap: d=" + std::to_string(d) + " outside [1, n]");
  const double level = 1.0 / static_cast<double>(d);
  if (w.maxCoeff() <= level) return {w, d};

  const std::vector<Index> order = detail::decreasing_order(w);
  for (Index clamped = 1; clamped <= d; ++clamped) {
    Vector out(n);
    if (clamped == d) {
      out.setZero();
      for (Index j = 0; j < d; ++j) out(order[j]) = level;
      return {out, d};
    }
    double rest = 0.0;
    for (Index j = n - 1; j >= clamped; --j) rest += w(order[j]);
    if (rest <= 0.0) {
      throw InvalidInput("cap: fewer than d positive weights, projection undefined");
    }
    const double factor = static_cast<double>(d - clamped) / (static_cast<double>(d) * rest);
    if (w(order[clamped]) * factor <= level) {
      for (Index j = 0; j < clamped; ++j) out(order[j]) = level;
      for (Index j = clamped; j < n; ++j) out(order[j]) = w(order[j]) * factor;
      return {out, d};
    }
  }
  throw Error("cap: no capped set found");  // unreachable: clamped == d always returns
}

/// Writes a capped vector as a mixture of at most n corners. Each round
/// takes a corner on d non-zero coordinates that includes every coordinate
/// at the current level |w|/d, filling the rest with the largest remaining
/// coordinates (ties to the lower index), and subtracts
/// min(d*s, |w| - d*l) of it, with s the smallest chosen and l the largest
/// unchosen coordinate.
inline MixtureDecomposition decompose(const CappedSimplexVector& w) {
  const Index n = w.size();
  const Index d = w.cap();
  Vector residual = w.weights();
  for (Index i = 0; i < n; ++i) {
    if (residual(i) <= kDecompositionZero) residual(i) = 0.0;
  }

  MixtureDecomposition out;
  const Index max_rounds = 2 * n + 2;
  double total = residual.sum();
  while (total > kDecompositionZero) {
    if (static_cast<Index>(out.terms.size()) >= max_rounds) {
      throw Error("decompose: did not terminate");
    }
    const double level = total / static_cast<double>(d);
    std::vector<Index> candidates;
    for (Index i = 0; i < n; ++i) {
      if (residual(i) > 0.0) candidates.push_back(i);
    }
    if (static_cast<Index>(candidates.size()) < d) break;  // only rounding residue left
    std::stable_sort(candidates.begin(), candidates.end(), [&](Index a, Index b) {
      const bool tight_a = residual(a) >= level - kDecompositionZero;
      const bool tight_b = residual(b) >= level - kDecompositionZero;
      if (tight_a != tight_b) return tight_a;
      return residual(a) > residual(b);
    });
    std::vector<Index> support(candidates.begin(), candidates.begin() + d);

    double smallest = residual(support.front());
    for (Index i : support) smallest = std::min(smallest, residual(i));
    double largest_other = 0.0;
    for (auto it = candidates.begin() + d; it != candidates.end(); ++it) {
      largest_other = std::max(largest_other, residual(*it));
    }
    const double p = std::min(static_cast<double>(d) * smallest,
                              total - static_cast<double>(d) * largest_other);
    const double step = p / static_cast<double>(d);
    for (Index i : support) {
      residual(i) -= step;
      if (residual(i) <= kDecompositionZero) residual(i) = 0.0;
    }
    out.terms.push_back({p, Corner(n, std::move(support))});
    total = residual.sum();
  }
  return out;
}

/// Draws corner j with probability p_j.
template <class Rng>
const Corner& sample_corner(const MixtureDecomposition& mixture, Rng& rng) {
  detail::require(!mixture.terms.empty(), "sample_corner: empty decomposition");
  std::uniform_real_distribution<double> uniform(0.0, mixture.total_probability());
  const double u = uniform(rng);
  double cumulative = 0.0;
  for (const auto& term : mixture.terms) {
    cumulative += term.probability;
    if (u < cumulative) return term.corner;
  }
  return mixture.terms.back().corner;
}

/// alpha/n + (1 - alpha) v. With alpha = 0 the input is returned bit-for-bit.
inline Vector fixed_share(const Vector& v, double alpha) {
  detail::require(alpha >= 0.0 && alpha <= 1.0, "fixed_share: alpha outside [0, 1]");
  const double floor = alpha / static_cast<double>(v.size());
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = floor + (1.0 - alpha) * v(i);
  return out;
}

/// sum_i q_i ln(q_i / w_i), with 0 ln 0 = 0.
inline double relative_entropy(const Vector& q, const Vector& w) {
  detail::require(q.size() == w.size(), "relative_entropy: size mismatch");
  detail::require(q.minCoeff() >= 0.0 && w.minCoeff() >= 0.0,
                  "relative_entropy: negative weight");
  double total = 0.0;
  for (Index i = 0; i < q.size(); ++i) {
    if (q(i) == 0.0) continue;
    if (w(i) == 0.0) throw SingularArgument("relative_entropy: w has a zero where q is positive");
    total += q(i) * std::log(q(i) / w(i));
  }
  return total;
}

}  // namespace adapca
