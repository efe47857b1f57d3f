#include "bclab/completeness.hpp"

#include <cmath>
#include <sstream>

#include "bclab/random_experiments.hpp"

namespace bclab {

const char* to_string(Verdict v) { return v == Verdict::Dense ? "dense" : "witness"; }

namespace {

struct BlockView {
  /// Positive-mass blocks, as indices into part.blocks().
  std::vector<int> positive_blocks;
  /// Per support point, index into positive_blocks of its block.
  std::vector<int> positive_block_of_support;
};

BlockView positive_block_view(const Partition& part, const DominatingMeasure& p0) {
  if (part.ground_size() != p0.n_observations())
    fail(ErrorKind::DimensionMismatch, "partition ground set does not match the measure");
  std::vector<int> compact(static_cast<std::size_t>(part.n_blocks()), -1);
  BlockView view;
  for (int x : p0.support()) {
    const int b = part.block_of()[static_cast<std::size_t>(x)];
    if (compact[static_cast<std::size_t>(b)] == -1) {
      compact[static_cast<std::size_t>(b)] = static_cast<int>(view.positive_blocks.size());
      view.positive_blocks.push_back(b);
    }
  }
  for (int x : p0.support()) {
    const int b = part.block_of()[static_cast<std::size_t>(x)];
    view.positive_block_of_support.push_back(compact[static_cast<std::size_t>(b)]);
  }
  if (view.positive_blocks.empty())
    fail(ErrorKind::DegenerateSupport, "no block carries positive mass");
  return view;
}

/// Collapses block-constant rows over the support into one value per
/// positive block; throws NotBlockConstant if a row varies inside a block.
Eigen::MatrixXd collapse_to_blocks(const LikelihoodRatioTable& table, const BlockView& view) {
  const int m = static_cast<int>(view.positive_blocks.size());
  Eigen::MatrixXd values(table.n_parameters(), m);
  std::vector<int> first_seen(static_cast<std::size_t>(m), -1);
  for (int j = 0; j < table.support_size(); ++j) {
    const int b = view.positive_block_of_support[static_cast<std::size_t>(j)];
    if (first_seen[static_cast<std::size_t>(b)] == -1) {
      first_seen[static_cast<std::size_t>(b)] = j;
      values.col(b) = table.ratios().col(j);
    } else {
      for (int t = 0; t < table.n_parameters(); ++t) {
        if (std::abs(table.ratios()(t, j) - values(t, b)) > kBlockConstTol) {
          std::ostringstream msg;
          msg << "row " << t << " varies inside a block by "
              << std::abs(table.ratios()(t, j) - values(t, b));
          fail(ErrorKind::NotBlockConstant, msg.str());
        }
      }
    }
  }
  return values;
}

RankData rank_from_singular_values(const Eigen::VectorXd& sv, int positive_blocks,
                                   double svd_tol) {
  RankData data;
  data.positive_blocks = positive_blocks;
  data.sv_max = sv.size() > 0 ? sv[0] : 0.0;
  data.sv_threshold = svd_tol * data.sv_max;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > data.sv_threshold) ++rank;
  data.span_dim = rank;
  if (rank > 0 && rank < sv.size() && sv[rank] > 0.0) data.sv_gap = sv[rank - 1] / sv[rank];
  data.singular_values.assign(sv.data(), sv.data() + sv.size());
  return data;
}

Eigen::MatrixXd aggregated_matrix(const DiscreteExperiment& exp, const Partition& part,
                                  const BlockView& view) {
  const int m = static_cast<int>(view.positive_blocks.size());
  Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(exp.n_parameters(), m);
  for (int b = 0; b < m; ++b) {
    const auto& block = part.blocks()[static_cast<std::size_t>(view.positive_blocks[b])];
    for (int x : block) agg.col(b) += exp.probs().col(x);
  }
  return agg;
}

}  // namespace

DensenessResult denseness_check(const LikelihoodRatioTable& table, const Partition& part,
                                const DominatingMeasure& p0, double svd_tol) {
  const BlockView view = positive_block_view(part, p0);
  const Eigen::MatrixXd values = collapse_to_blocks(table, view);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(values);
  DensenessResult result;
  result.rank = rank_from_singular_values(svd.singularValues(),
                                          static_cast<int>(view.positive_blocks.size()), svd_tol);
  result.dense = result.rank.span_dim == result.rank.positive_blocks;
  return result;
}

std::optional<SeparatingWitness> witness_search(const DiscreteExperiment& exp,
                                                const DominatingMeasure& p0, const Partition& part,
                                                double svd_tol) {
  const BlockView view = positive_block_view(part, p0);
  const Eigen::MatrixXd agg = aggregated_matrix(exp, part, view);
  const int m = static_cast<int>(agg.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(agg, Eigen::ComputeFullV);
  const RankData rank = rank_from_singular_values(svd.singularValues(), m, svd_tol);
  if (rank.span_dim >= m) return std::nullopt;

  // Right-singular vector of the smallest singular value spans the least
  // excited direction; with a deficient rank decision it is a null vector.
  Eigen::VectorXd y_blocks = svd.matrixV().col(m - 1);
  const double peak = y_blocks.cwiseAbs().maxCoeff();
  y_blocks /= peak;
  for (int b = 0; b < m; ++b) {
    if (std::abs(y_blocks[b]) > 1e-12) {
      if (y_blocks[b] < 0.0) y_blocks = -y_blocks;
      break;
    }
  }

  SeparatingWitness witness;
  witness.values = Eigen::VectorXd::Zero(exp.n_observations());
  for (int b = 0; b < m; ++b) {
    const auto& block = part.blocks()[static_cast<std::size_t>(view.positive_blocks[b])];
    for (int x : block) witness.values[x] = y_blocks[b];
  }
  witness.max_abs_expectation = (exp.probs() * witness.values).cwiseAbs().maxCoeff();
  const int nsv = static_cast<int>(svd.singularValues().size());
  witness.smallest_sv = m <= nsv ? svd.singularValues()[m - 1] : 0.0;
  return witness;
}

CompletenessCertificate certify(const DiscreteExperiment& exp, const DominatingMeasure& p0,
                                const Partition& part, double svd_tol) {
  const LikelihoodRatioTable restricted = restricted_lr_table(exp, p0, part);
  const DensenessResult denseness = denseness_check(restricted, part, p0, svd_tol);
  const std::optional<SeparatingWitness> witness = witness_search(exp, p0, part, svd_tol);
  if (denseness.dense == witness.has_value()) {
    std::ostringstream msg;
    msg << "denseness says " << (denseness.dense ? "dense" : "deficient") << " (rank "
        << denseness.rank.span_dim << " of " << denseness.rank.positive_blocks
        << ", sv_max " << denseness.rank.sv_max << ") but witness search "
        << (witness ? "found a null vector (smallest sv " +
                          std::to_string(witness->smallest_sv) + ")"
                    : "found none")
        << "; the tolerance regime failed for this input";
    fail(ErrorKind::InternalInconsistency, msg.str());
  }
  CompletenessCertificate cert;
  cert.verdict = denseness.dense ? Verdict::Dense : Verdict::Witness;
  cert.rank = denseness.rank;
  cert.witness = witness;
  return cert;
}

Prop1SweepReport prop1_equivalence_sweep(const Prop1SweepConfig& config) {
  if (config.n_trials <= 0) fail(ErrorKind::DimensionMismatch, "trial count must be positive");
  Prop1SweepReport report;
  report.config = config;
  for (int trial = 0; trial < config.n_trials; ++trial) {
    SubRng rng(config.seed, rng_stream::kProp1Trials, static_cast<std::uint64_t>(trial));
    const int nx = rng.next_int(1, config.max_observations);
    const int nt = rng.next_int(1, config.max_parameters);
    const DiscreteExperiment exp = build_experiment(random_stochastic_matrix(rng, nt, nx));
    const Partition part = random_partition(rng, nx);
    const DominatingMeasure p0 = random_privileged_measure(rng, exp);

    const LikelihoodRatioTable restricted = restricted_lr_table(exp, p0, part);
    const DensenessResult denseness = denseness_check(restricted, part, p0, config.svd_tol);
    const std::optional<SeparatingWitness> witness =
        witness_search(exp, p0, part, config.svd_tol);

    if (denseness.dense == witness.has_value()) {
      Prop1Disagreement bad;
      bad.trial = trial;
      bad.probs = exp.probs();
      bad.blocks = part.blocks();
      bad.weights = p0.weights();
      bad.dense = denseness.dense;
      bad.witness_found = witness.has_value();
      bad.rank = denseness.rank.span_dim;
      bad.positive_blocks = denseness.rank.positive_blocks;
      report.disagreements.push_back(std::move(bad));
    }
    if (witness.has_value()) {
      ++report.n_witness;
      const double norm_err = std::abs(witness->values.cwiseAbs().maxCoeff() - 1.0);
      report.worst_witness_expectation =
          std::max(report.worst_witness_expectation, witness->max_abs_expectation);
      if (norm_err > 1e-12 || witness->max_abs_expectation > kWitnessExpectationTol)
        report.witness_violations.push_back(trial);
    } else {
      ++report.n_dense;
    }
  }
  return report;
}

}  // namespace bclab
