#pragma once

// Regret measurement, data generation and loading, and the PCA experiment
// driver that runs the adaptive learner against its baselines on one stream.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "adapca/comparators.hpp"
#include "adapca/error.hpp"
#include "adapca/linalg.hpp"
#include "adapca/pca_learner.hpp"

namespace adapca {

/// Inclusive step range, numbered from 1.
struct Interval {
  std::int64_t first = 1;
  std::int64_t last = 1;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Longest stream the exhaustive interval scan accepts.
inline constexpr std::int64_t kMaxRegretHorizon = 2000;

struct RegretResult {
  double value = 0.0;
  Interval interval;
};

/// Comparator values for every interval of a stream, row r holding s = r..T.
class IntervalTable {
 public:
  /// Evaluates `oracle(r, s)` for all 1 <= r <= s <= T, splitting rows over
  /// `threads` workers (0 picks the hardware concurrency).
  template <class Oracle>
  static IntervalTable build(const Oracle& oracle, std::int64_t horizon, unsigned threads = 0) {
    detail::require(horizon >= 1, "IntervalTable: horizon must be >= 1");
    IntervalTable table;
    table.horizon_ = horizon;
    table.rows_.resize(static_cast<std::size_t>(horizon));
    for (std::int64_t r = 1; r <= horizon; ++r) {
      table.rows_[static_cast<std::size_t>(r - 1)].resize(static_cast<std::size_t>(horizon - r + 1));
    }
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, horizon));
    auto fill = [&](unsigned worker) {
      for (std::int64_t r = 1 + worker; r <= horizon; r += threads) {
        auto& row = table.rows_[static_cast<std::size_t>(r - 1)];
        for (std::int64_t s = r; s <= horizon; ++s) row[static_cast<std::size_t>(s - r)] = oracle(r, s);
      }
    };
    if (threads <= 1) {
      fill(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(fill, w);
    }
    return table;
  }

  std::int64_t horizon() const { return horizon_; }

  double operator()(std::int64_t r, std::int64_t s) const {
    return rows_[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(s - r)];
  }

 private:
  std::int64_t horizon_ = 0;
  std::vector<std::vector<double>> rows_;
};

/// Learner loss over [1, T] minus the comparator on [1, T].
inline double static_regret(std::span<const double> losses, const IntervalTable& table) {
  detail::require(static_cast<std::int64_t>(losses.size()) == table.horizon(),
                  "static_regret: loss count differs from horizon");
  double total = 0.0;
  for (double l : losses) total += l;
  return total - table(1, table.horizon());
}

/// max over [r, s] of (learner loss on [r, s] - comparator on [r, s]). The
/// first maximizer in (r, s) lexicographic order is reported.
inline RegretResult adaptive_regret(std::span<const double> losses, const IntervalTable& table) {
  const auto horizon = static_cast<std::int64_t>(losses.size());
  detail::require(horizon == table.horizon(), "adaptive_regret: loss count differs from horizon");
  std::vector<double> prefix(losses.size() + 1, 0.0);
  for (std::size_t t = 0; t < losses.size(); ++t) prefix[t + 1] = prefix[t] + losses[t];
  RegretResult best{-std::numeric_limits<double>::infinity(), {1, 1}};
  for (std::int64_t r = 1; r <= horizon; ++r) {
    for (std::int64_t s = r; s <= horizon; ++s) {
      const double value = prefix[static_cast<std::size_t>(s)] - prefix[static_cast<std::size_t>(r - 1)] - table(r, s);
      if (value > best.value) best = {value, {r, s}};
    }
  }
  return best;
}

/// Adaptive regret of per-step expected PCA losses against the best rank-k
/// projection of each interval.
inline RegretResult adaptive_regret(std::span<const double> losses, std::span<const Vector> data, Index k) {
  detail::require(losses.size() == data.size(), "adaptive_regret: loss count differs from stream length");
  detail::require(static_cast<std::int64_t>(losses.size()) <= kMaxRegretHorizon, "adaptive_regret: T too large");
  const PcaIntervalOracle oracle(data, k);
  return adaptive_regret(losses, IntervalTable::build(oracle, oracle.horizon()));
}

/// Total-variation count m(q_{1:T}) = sum_{t>=2} D_TV(q_t, q_{t-1}) of a comparator schedule.
inline double comparator_shifts(std::span<const Vector> schedule) {
  double total = 0.0;
  for (std::size_t t = 1; t < schedule.size(); ++t) {
    total += (schedule[t] - schedule[t - 1]).cwiseMax(0.0).sum();
  }
  return total;
}

// ---------------------------------------------------------------------------
// Data

struct ToyStreamConfig {
  Index n = 20;
  std::int64_t intervals = 3;
  std::int64_t samples_per_interval = 200;
  Index rank = 2;
};

struct ToyStream {
  DataStream points;
  /// Orthonormal basis of each interval's subspace, n x rank.
  std::vector<Matrix> subspaces;
};

/// Clips x to the unit ball.
inline Vector clip_to_unit_ball(Vector x) {
  const double norm = x.norm();
  if (norm > 1.0) x /= norm;
  return x;
}

/// Piecewise-stationary Gaussian stream. Each interval draws G (n x rank,
/// standard normal), uses covariance G G^T scaled to unit spectral norm,
/// samples zero-mean points from it and clips their norms to 1.
template <class Rng>
ToyStream generate_toy_switching(const ToyStreamConfig& config, Rng& rng) {
  detail::require(config.n >= 1, "generate_toy_switching: n must be >= 1");
  detail::require(config.intervals >= 1 && config.samples_per_interval >= 1,
                  "generate_toy_switching: need at least one interval and one sample");
  detail::require(config.rank >= 1 && config.rank <= config.n, "generate_toy_switching: rank outside [1, n]");
  std::normal_distribution<double> normal(0.0, 1.0);
  ToyStream out;
  out.points.reserve(static_cast<std::size_t>(config.intervals * config.samples_per_interval));
  for (std::int64_t block = 0; block < config.intervals; ++block) {
    Matrix g(config.n, config.rank);
    for (Index j = 0; j < config.rank; ++j) {
      for (Index i = 0; i < config.n; ++i) g(i, j) = normal(rng);
    }
    const double spectral = sym_eigenvalues(SymMatrix(g.transpose() * g)).maxCoeff();
    const Matrix factor = g / std::sqrt(spectral);
    out.subspaces.push_back(Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(config.n, config.rank));
    for (std::int64_t t = 0; t < config.samples_per_interval; ++t) {
      Vector z(config.rank);
      for (Index j = 0; j < config.rank; ++j) z(j) = normal(rng);
      out.points.push_back(clip_to_unit_ball(factor * z));
    }
  }
  return out;
}

/// Reads one sample per row of a numeric CSV and clips each row to the unit
/// ball. Blank lines are skipped.
inline DataStream load_matrix_csv(std::istream& in) {
  DataStream out;
  std::string line;
  std::size_t row = 0;
  Index width = -1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> values;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      std::string_view field = rest.substr(0, comma);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double value = 0.0;
      const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || end != field.data() + field.size() || !std::isfinite(value)) {
        throw ParseError(row, "non-numeric field '" + std::string(field) + "'");
      }
      values.push_back(value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (width < 0) width = static_cast<Index>(values.size());
    if (static_cast<Index>(values.size()) != width) {
      throw ParseError(row, "expected " + std::to_string(width) + " fields, found " + std::to_string(values.size()));
    }
    out.push_back(clip_to_unit_ball(Eigen::Map<const Vector>(values.data(), width)));
  }
  return out;
}

inline DataStream load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_matrix_csv(in);
}

// ---------------------------------------------------------------------------
// Experiment

enum class Scenario { kToySwitching, kDataset, kRandomCovariance };

struct ExperimentConfig {
  Index n = 20;
  Index k = 2;
  double eta = 1.0;
  double alpha = 1e-5;
  std::uint64_t seed = 42;
  Scenario scenario = Scenario::kToySwitching;
  /// Generated scenarios: number of stationary blocks and their length. The
  /// random-covariance scenario is a single block of intervals * samples_per_interval points.
  std::int64_t intervals = 3;
  std::int64_t samples_per_interval = 200;
  Index rank = 2;
  /// Dataset scenario.
  std::string input_path;
  /// Equal segments used for the per-segment comparator (dataset scenario).
  std::int64_t segments = 1;
  bool compute_regret = true;
};

inline void validate(const ExperimentConfig& config) {
  detail::require(config.n >= 2, "n must be >= 2");
  detail::require(config.k >= 1 && config.k < config.n,
                  "k must satisfy 1 <= k < n (k=" + std::to_string(config.k) + ", n=" + std::to_string(config.n) + ")");
  detail::require(config.eta > 0.0 && std::isfinite(config.eta), "eta must be positive");
  detail::require(config.alpha >= 0.0 && config.alpha <= 1.0, "alpha must lie in [0, 1]");
  detail::require(config.intervals >= 1 && config.samples_per_interval >= 1, "need T >= 1");
  detail::require(config.segments >= 1, "segments must be >= 1");
  detail::require(config.rank >= 1 && config.rank <= config.n, "rank must lie in [1, n]");
}

struct AlgorithmTrace {
  std::string name;
  std::vector<double> sampled;
  std::vector<double> expected;
  double static_regret = 0.0;
  RegretResult adaptive;

  static std::vector<double> cumulative(const std::vector<double>& losses) {
    std::vector<double> out(losses.size());
    double total = 0.0;
    for (std::size_t t = 0; t < losses.size(); ++t) out[t] = total += losses[t];
    return out;
  }
  double total_expected() const { return expected.empty() ? 0.0 : cumulative(expected).back(); }
  double total_sampled() const { return sampled.empty() ? 0.0 : cumulative(sampled).back(); }
};

struct RegretReport {
  Index n = 0;
  Index k = 0;
  std::int64_t horizon = 0;
  /// adaptive_pca, online_pca, follow_the_leader, best_fixed.
  std::vector<AlgorithmTrace> algorithms;
  bool has_regret = false;
  /// Comparator on [1, T].
  double best_fixed_loss = 0.0;
  /// Sum of per-segment comparators.
  double segment_oracle_loss = 0.0;
  std::vector<Interval> segments;

  const AlgorithmTrace& algorithm(std::string_view name) const {
    for (const auto& a : algorithms) {
      if (a.name == name) return a;
    }
    throw InvalidInput("unknown algorithm '" + std::string(name) + "'");
  }
};

namespace detail {

// splitmix64 finalizer; distinct streams for the data and each learner.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::vector<Interval> equal_segments(std::int64_t horizon, std::int64_t count) {
  count = std::min(count, horizon);
  std::vector<Interval> out;
  const std::int64_t base = horizon / count;
  std::int64_t first = 1;
  for (std::int64_t i = 0; i < count; ++i) {
    const std::int64_t last = i + 1 == count ? horizon : first + base - 1;
    out.push_back({first, last});
    first = last + 1;
  }
  return out;
}

template <class Fn>
void with_step(std::int64_t step, Fn&& fn) {
  try {
    fn();
  } catch (const InvalidInput& e) {
    throw InvalidInput("step " + std::to_string(step) + ": " + e.what());
  } catch (const SingularArgument& e) {
    throw SingularArgument("step " + std::to_string(step) + ": " + e.what());
  }
}

}  // namespace detail

/// Builds the data stream a config describes.
inline DataStream experiment_stream(const ExperimentConfig& config) {
  std::mt19937_64 rng(detail::derive_seed(config.seed, 0));
  switch (config.scenario) {
    case Scenario::kToySwitching:
      return generate_toy_switching(
                 ToyStreamConfig{config.n, config.intervals, config.samples_per_interval, config.rank}, rng)
          .points;
    case Scenario::kRandomCovariance:
      return generate_toy_switching(
                 ToyStreamConfig{config.n, 1, config.intervals * config.samples_per_interval, config.rank}, rng)
          .points;
    case Scenario::kDataset:
      return load_matrix_csv(config.input_path);
  }
  throw InvalidInput("unknown scenario");
}

/// Runs adaptive PCA, static online PCA, Follow the Leader and the best
/// fixed projection on one stream. Each randomized learner has its own
/// generator derived from the config seed. Regrets use expected losses.
inline RegretReport run_experiment(const ExperimentConfig& config, std::span<const Vector> data) {
  validate(config);
  detail::require(!data.empty(), "empty data stream");
  const Index n = data.front().size();
  detail::require(config.k < n, "k must be smaller than the data dimension");
  const auto horizon = static_cast<std::int64_t>(data.size());
  detail::require(!config.compute_regret || horizon <= kMaxRegretHorizon,
                  "regret scan needs T <= " + std::to_string(kMaxRegretHorizon) + " (T=" + std::to_string(horizon) + ")");

  RegretReport report;
  report.n = n;
  report.k = config.k;
  report.horizon = horizon;

  PcaLearner adaptive(n, config.k, config.eta, config.alpha, detail::derive_seed(config.seed, 1), Variant::kAdaptive);
  PcaLearner online(n, config.k, config.eta, 0.0, detail::derive_seed(config.seed, 2), Variant::kStatic);
  FollowTheLeader leader(n, config.k);
  const ProjectionMatrix best = best_fixed_projection(data, config.k);

  AlgorithmTrace traces[4];
  const char* names[4] = {"adaptive_pca", "online_pca", "follow_the_leader", "best_fixed"};
  for (int i = 0; i < 4; ++i) traces[i].name = names[i];
  for (auto& trace : traces) {
    trace.sampled.reserve(data.size());
    trace.expected.reserve(data.size());
  }
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const Vector& x = data[static_cast<std::size_t>(t - 1)];
    detail::with_step(t, [&] {
      detail::require(x.size() == n, "inconsistent point dimension");
      int slot = 0;
      for (PcaLearner* learner : {&adaptive, &online}) {
        const PcaChoice choice = learner->choose();
        traces[slot].sampled.push_back(choice.projection.compression_loss(x));
        traces[slot].expected.push_back(learner->expected_loss(x));
        learner->update(x);
        ++slot;
      }
      const double leader_loss = leader.choose().compression_loss(x);
      traces[2].sampled.push_back(leader_loss);
      traces[2].expected.push_back(leader_loss);
      leader.observe(x);
      const double best_loss = best.compression_loss(x);
      traces[3].sampled.push_back(best_loss);
      traces[3].expected.push_back(best_loss);
    });
  }

  const PcaIntervalOracle oracle(data, config.k);
  report.best_fixed_loss = oracle(1, horizon);
  const std::int64_t segment_count =
      config.scenario == Scenario::kDataset ? config.segments
      : config.scenario == Scenario::kToySwitching ? config.intervals
                                                  : 1;
  report.segments = detail::equal_segments(horizon, segment_count);
  for (const Interval& seg : report.segments) report.segment_oracle_loss += oracle(seg.first, seg.last);

  if (config.compute_regret) {
    const IntervalTable table = IntervalTable::build(oracle, horizon);
    for (auto& trace : traces) {
      trace.static_regret = static_regret(trace.expected, table);
      trace.adaptive = adaptive_regret(trace.expected, table);
    }
    report.has_regret = true;
  }
  report.algorithms.assign(std::make_move_iterator(std::begin(traces)), std::make_move_iterator(std::end(traces)));
  return report;
}

inline RegretReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  const DataStream data = experiment_stream(config);
  return run_experiment(config, data);
}

// ---------------------------------------------------------------------------
// CSV output

/// Decimal rendering with 17 significant digits.
inline std::string format_double(double value) {
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

/// step,algo,sampled_loss,expected_loss,cum_sampled,cum_expected; one row per (step, algorithm).
inline void write_loss_csv(const RegretReport& report, std::ostream& out) {
  out << "step,algo,sampled_loss,expected_loss,cum_sampled,cum_expected\n";
  std::vector<std::vector<double>> cum_sampled, cum_expected;
  for (const auto& a : report.algorithms) {
    cum_sampled.push_back(AlgorithmTrace::cumulative(a.sampled));
    cum_expected.push_back(AlgorithmTrace::cumulative(a.expected));
  }
  for (std::int64_t t = 0; t < report.horizon; ++t) {
    const auto i = static_cast<std::size_t>(t);
    for (std::size_t a = 0; a < report.algorithms.size(); ++a) {
      const auto& algo = report.algorithms[a];
      out << (t + 1) << ',' << algo.name << ',' << format_double(algo.sampled[i]) << ','
          << format_double(algo.expected[i]) << ',' << format_double(cum_sampled[a][i]) << ','
          << format_double(cum_expected[a][i]) << '\n';
    }
  }
}

/// algo,static_regret,adaptive_regret,argmax_r,argmax_s
inline void write_regret_csv(const RegretReport& report, std::ostream& out) {
  out << "algo,static_regret,adaptive_regret,argmax_r,argmax_s\n";
  for (const auto& a : report.algorithms) {
    out << a.name << ',' << format_double(a.static_regret) << ',' << format_double(a.adaptive.value) << ','
        << a.adaptive.interval.first << ',' << a.adaptive.interval.last << '\n';
  }
}

}  // namespace adapca
