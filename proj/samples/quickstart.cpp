// Runs the adaptive PCA learner on a switching stream and prints the loss
// of each algorithm at the end of every interval.

#include <cstdio>
#include <random>

#include "adapca/adapca.hpp"

int main() {
  adapca::ExperimentConfig config;
  config.n = 20;
  config.k = 2;
  config.eta = 1.0;
  config.alpha = 1e-5;
  config.compute_regret = false;

  const adapca::RegretReport report = adapca::run_experiment(config);
  std::printf("%-18s", "step");
  for (const auto& seg : report.segments) std::printf(" %10lld", static_cast<long long>(seg.last));
  std::printf("\n");
  for (const auto& algo : report.algorithms) {
    const auto curve = adapca::AlgorithmTrace::cumulative(algo.expected);
    std::printf("%-18s", algo.name.c_str());
    for (const auto& seg : report.segments) std::printf(" %10.3f", curve[static_cast<std::size_t>(seg.last - 1)]);
    std::printf("\n");
  }
  std::printf("per-interval oracle %10.3f\n", report.segment_oracle_loss);

  // Drawing a projection directly from a learner.
  std::mt19937_64 rng(1);
  adapca::PcaLearner learner(4, 1, 0.5, 1e-3, 7);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 50; ++t) {
    adapca::Vector x(4);
    x << normal(rng), 0.1 * normal(rng), 0.1 * normal(rng), 0.1 * normal(rng);
    learner.update(adapca::clip_to_unit_ball(x));
  }
  const adapca::PcaChoice choice = learner.choose();
  std::printf("eigenvalues of W after 50 steps:");
  for (double s : learner.state().spectrum()) std::printf(" %.4f", s);
  std::printf("\nprojection (rank %lld) diagonal:", static_cast<long long>(choice.projection.rank()));
  for (adapca::Index i = 0; i < 4; ++i) std::printf(" %.4f", choice.projection.matrix()(i, i));
  std::printf("\n");
  return 0;
}
