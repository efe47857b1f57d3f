#include "bclab/experiment.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace bclab {

namespace {

void check_labels_unique(const std::vector<std::string>& labels, const char* what) {
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) fail(ErrorKind::DuplicateLabel, std::string(what) + " label '" + l + "'");
  }
}

void check_privileged(const DiscreteExperiment& exp, const Eigen::VectorXd& w) {
  for (int x = 0; x < exp.n_observations(); ++x) {
    if (w[x] == 0.0 && exp.probs().col(x).maxCoeff() > 0.0) {
      std::ostringstream msg;
      msg << "weight 0 at observation " << x << " but the family puts mass there";
      fail(ErrorKind::NotPrivileged, msg.str());
    }
  }
}

}  // namespace

DiscreteExperiment::DiscreteExperiment(Eigen::MatrixXd probs,
                                       std::vector<std::string> observation_labels,
                                       std::vector<std::string> parameter_labels)
    : probs_(std::move(probs)),
      observation_labels_(std::move(observation_labels)),
      parameter_labels_(std::move(parameter_labels)) {
  if (probs_.rows() == 0 || probs_.cols() == 0)
    fail(ErrorKind::EmptyExperiment, "need at least one parameter and one observation");
  if (static_cast<int>(observation_labels_.size()) != probs_.cols() ||
      static_cast<int>(parameter_labels_.size()) != probs_.rows())
    fail(ErrorKind::DimensionMismatch, "label counts do not match the probability matrix");
  check_labels_unique(observation_labels_, "observation");
  check_labels_unique(parameter_labels_, "parameter");
  for (int t = 0; t < probs_.rows(); ++t) {
    for (int x = 0; x < probs_.cols(); ++x) {
      const double p = probs_(t, x);
      if (!(p >= 0.0) || !std::isfinite(p)) {
        std::ostringstream msg;
        msg << "probs(" << t << "," << x << ") = " << p;
        fail(ErrorKind::NegativeEntry, msg.str());
      }
    }
    const double s = probs_.row(t).sum();
    if (std::abs(s - 1.0) > kRowSumTol) {
      std::ostringstream msg;
      msg << "row " << t << " sums to " << s;
      fail(ErrorKind::NonStochasticRow, msg.str());
    }
  }
}

DiscreteExperiment build_experiment(const Eigen::MatrixXd& probs,
                                    std::vector<std::string> observation_labels,
                                    std::vector<std::string> parameter_labels) {
  return DiscreteExperiment(probs, std::move(observation_labels), std::move(parameter_labels));
}

DiscreteExperiment build_experiment(const Eigen::MatrixXd& probs) {
  std::vector<std::string> obs, par;
  for (int x = 0; x < probs.cols(); ++x) obs.push_back("x" + std::to_string(x));
  for (int t = 0; t < probs.rows(); ++t) par.push_back("t" + std::to_string(t));
  return DiscreteExperiment(probs, std::move(obs), std::move(par));
}

DominatingMeasure::DominatingMeasure(const DiscreteExperiment& exp, Eigen::VectorXd weights)
    : weights_(std::move(weights)) {
  if (weights_.size() != exp.n_observations())
    fail(ErrorKind::InvalidWeights, "weight vector length does not match the experiment");
  for (int x = 0; x < weights_.size(); ++x) {
    if (!(weights_[x] >= 0.0) || !std::isfinite(weights_[x]))
      fail(ErrorKind::InvalidWeights, "weights must be nonnegative and finite");
  }
  if (std::abs(weights_.sum() - 1.0) > kRowSumTol)
    fail(ErrorKind::InvalidWeights, "weights must sum to 1");
  check_privileged(exp, weights_);
  for (int x = 0; x < weights_.size(); ++x)
    if (weights_[x] > 0.0) support_.push_back(x);
}

DominatingMeasure DominatingMeasure::uniform_mixture(const DiscreteExperiment& exp) {
  Eigen::VectorXd w = exp.probs().colwise().mean().transpose();
  return DominatingMeasure(exp, std::move(w));
}

DominatingMeasure privileged_measure(const DiscreteExperiment& exp,
                                     const std::optional<Eigen::VectorXd>& weights) {
  if (!weights.has_value()) return DominatingMeasure::uniform_mixture(exp);
  return DominatingMeasure(exp, *weights);
}

LikelihoodRatioTable::LikelihoodRatioTable(Eigen::MatrixXd ratios, std::vector<int> support,
                                           Eigen::VectorXd support_weights,
                                           std::vector<int> dropped_columns)
    : ratios_(std::move(ratios)),
      support_(std::move(support)),
      support_weights_(std::move(support_weights)),
      dropped_columns_(std::move(dropped_columns)) {
  if (ratios_.cols() != static_cast<Eigen::Index>(support_.size()) ||
      ratios_.cols() != support_weights_.size())
    fail(ErrorKind::DimensionMismatch, "ratio columns, support and weights must align");
  if (support_.empty()) fail(ErrorKind::DegenerateSupport, "empty support");
  for (int t = 0; t < ratios_.rows(); ++t) {
    for (int j = 0; j < ratios_.cols(); ++j) {
      const double r = ratios_(t, j);
      if (!(r >= 0.0) || !std::isfinite(r))
        fail(ErrorKind::NegativeEntry, "likelihood ratios must be finite and nonnegative");
    }
    const double s = ratios_.row(t).dot(support_weights_);
    if (std::abs(s - 1.0) > kLrRowSumTol) {
      std::ostringstream msg;
      msg << "weighted ratio row " << t << " sums to " << s;
      fail(ErrorKind::NonStochasticRow, msg.str());
    }
  }
}

LikelihoodRatioTable likelihood_ratio_table(const DiscreteExperiment& exp,
                                            const DominatingMeasure& p0) {
  if (p0.n_observations() != exp.n_observations())
    fail(ErrorKind::DimensionMismatch, "measure and experiment sizes differ");
  check_privileged(exp, p0.weights());
  const auto& supp = p0.support();
  const int s = static_cast<int>(supp.size());
  Eigen::MatrixXd ratios(exp.n_parameters(), s);
  Eigen::VectorXd w(s);
  for (int j = 0; j < s; ++j) {
    w[j] = p0.weights()[supp[j]];
    ratios.col(j) = exp.probs().col(supp[j]) / w[j];
  }
  std::vector<int> dropped;
  for (int x = 0, j = 0; x < exp.n_observations(); ++x) {
    if (j < s && supp[j] == x) {
      ++j;
    } else {
      dropped.push_back(x);
    }
  }
  return LikelihoodRatioTable(std::move(ratios), supp, std::move(w), std::move(dropped));
}

}  // namespace bclab
