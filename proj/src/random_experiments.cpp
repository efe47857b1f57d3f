#include "bclab/random_experiments.hpp"

namespace bclab {

Eigen::MatrixXd random_stochastic_matrix(SubRng& rng, int n_parameters, int n_observations) {
  Eigen::MatrixXd probs(n_parameters, n_observations);
  for (int t = 0; t < n_parameters; ++t) {
    for (int x = 0; x < n_observations; ++x) probs(t, x) = rng.next_exponential();
  }
  if (n_observations > 1 && rng.next_bernoulli(0.3)) {
    // sparsify so zero columns and support dropping get exercised; each row
    // keeps at least one positive entry
    for (int t = 0; t < n_parameters; ++t) {
      int positives = n_observations;
      for (int x = 0; x < n_observations; ++x) {
        if (rng.next_bernoulli(0.35) && positives > 1) {
          probs(t, x) = 0.0;
          --positives;
        }
      }
    }
  }
  for (int t = 0; t < n_parameters; ++t) probs.row(t) /= probs.row(t).sum();
  return probs;
}

Partition random_partition(SubRng& rng, int n) {
  const int b = rng.next_int(1, n);
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(b));
  for (int x = 0; x < n; ++x) blocks[static_cast<std::size_t>(rng.next_int(0, b - 1))].push_back(x);
  std::vector<std::vector<int>> nonempty;
  for (auto& block : blocks)
    if (!block.empty()) nonempty.push_back(std::move(block));
  return Partition(n, std::move(nonempty));
}

Partition merge_random_blocks(SubRng& rng, const Partition& part) {
  if (part.n_blocks() <= 1) return part;
  const int i = rng.next_int(0, part.n_blocks() - 1);
  int j = rng.next_int(0, part.n_blocks() - 2);
  if (j >= i) ++j;
  std::vector<std::vector<int>> blocks;
  std::vector<int> merged;
  for (int b = 0; b < part.n_blocks(); ++b) {
    const auto& block = part.blocks()[static_cast<std::size_t>(b)];
    if (b == i || b == j) {
      merged.insert(merged.end(), block.begin(), block.end());
    } else {
      blocks.push_back(block);
    }
  }
  blocks.push_back(std::move(merged));
  return Partition(part.ground_size(), std::move(blocks));
}

DominatingMeasure random_privileged_measure(SubRng& rng, const DiscreteExperiment& exp) {
  if (rng.next_bernoulli(0.5)) return DominatingMeasure::uniform_mixture(exp);
  Eigen::VectorXd w(exp.n_observations());
  for (int x = 0; x < w.size(); ++x) w[x] = rng.next_exponential();
  w /= w.sum();
  return DominatingMeasure(exp, std::move(w));
}

}  // namespace bclab
