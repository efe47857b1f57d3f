#ifndef BCLAB_EXPERIMENT_HPP
#define BCLAB_EXPERIMENT_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "bclab/errors.hpp"

namespace bclab {

// Ingestion tolerance for row-stochastic matrices and weight vectors.
inline constexpr double kRowSumTol = 1e-12;
// Tolerance on P0-weighted likelihood-ratio row sums (after the division).
inline constexpr double kLrRowSumTol = 1e-10;

/// A finite statistical experiment: one probability row per parameter
/// label, one column per observation label. Immutable once built.
class DiscreteExperiment {
 public:
  DiscreteExperiment(Eigen::MatrixXd probs, std::vector<std::string> observation_labels,
                     std::vector<std::string> parameter_labels);

  int n_observations() const { return static_cast<int>(probs_.cols()); }
  int n_parameters() const { return static_cast<int>(probs_.rows()); }
  const Eigen::MatrixXd& probs() const { return probs_; }
  const std::vector<std::string>& observation_labels() const { return observation_labels_; }
  const std::vector<std::string>& parameter_labels() const { return parameter_labels_; }

 private:
  Eigen::MatrixXd probs_;
  std::vector<std::string> observation_labels_;
  std::vector<std::string> parameter_labels_;
};

/// Validating constructor wrapper. Throws NonStochasticRow, NegativeEntry,
/// EmptyExperiment, DuplicateLabel or DimensionMismatch.
DiscreteExperiment build_experiment(const Eigen::MatrixXd& probs,
                                    std::vector<std::string> observation_labels,
                                    std::vector<std::string> parameter_labels);

/// Same, with generated labels x0,x1,... / t0,t1,...
DiscreteExperiment build_experiment(const Eigen::MatrixXd& probs);

/// A dominating weight vector for an experiment. The defining property:
/// weights(x) = 0 implies p_theta(x) = 0 for every parameter, so null sets
/// of the measure are null for the whole family.
class DominatingMeasure {
 public:
  DominatingMeasure(const DiscreteExperiment& exp, Eigen::VectorXd weights);

  static DominatingMeasure uniform_mixture(const DiscreteExperiment& exp);

  int n_observations() const { return static_cast<int>(weights_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// Indices x with weights(x) > 0, ascending.
  const std::vector<int>& support() const { return support_; }

 private:
  Eigen::VectorXd weights_;
  std::vector<int> support_;
};

/// Default (no weights) is the uniform mixture of the family rows, which
/// dominates every member by construction. Explicit weights are accepted
/// only if they dominate; otherwise NotPrivileged.
DominatingMeasure privileged_measure(const DiscreteExperiment& exp,
                                     const std::optional<Eigen::VectorXd>& weights = std::nullopt);

/// Likelihood-ratio rows p_theta(x) / w(x), restricted to the support of
/// the dominating measure. Every row has weighted sum 1.
class LikelihoodRatioTable {
 public:
  LikelihoodRatioTable(Eigen::MatrixXd ratios, std::vector<int> support,
                       Eigen::VectorXd support_weights, std::vector<int> dropped_columns);

  int n_parameters() const { return static_cast<int>(ratios_.rows()); }
  int support_size() const { return static_cast<int>(ratios_.cols()); }
  const Eigen::MatrixXd& ratios() const { return ratios_; }
  const std::vector<int>& support() const { return support_; }
  const Eigen::VectorXd& support_weights() const { return support_weights_; }
  /// Observation indices removed because the dominating measure gives them
  /// zero weight.
  const std::vector<int>& dropped_columns() const { return dropped_columns_; }

 private:
  Eigen::MatrixXd ratios_;
  std::vector<int> support_;
  Eigen::VectorXd support_weights_;
  std::vector<int> dropped_columns_;
};

LikelihoodRatioTable likelihood_ratio_table(const DiscreteExperiment& exp,
                                            const DominatingMeasure& p0);

}  // namespace bclab

#endif
