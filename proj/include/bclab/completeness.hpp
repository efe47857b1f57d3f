#ifndef BCLAB_COMPLETENESS_HPP
#define BCLAB_COMPLETENESS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "bclab/conditioning.hpp"
#include "bclab/experiment.hpp"

namespace bclab {

// Numerical rank = number of singular values above svd_tol times the
// largest one.
inline constexpr double kDefaultSvdTol = 1e-10;
// Every emitted witness must integrate to at most this against each family
// member.
inline constexpr double kWitnessExpectationTol = 1e-9;
// Restricted rows must be constant on blocks to this tolerance.
inline constexpr double kBlockConstTol = 1e-12;

struct RankData {
  int span_dim = 0;
  int positive_blocks = 0;
  double sv_max = 0.0;
  double sv_threshold = 0.0;
  /// Ratio between the smallest accepted and largest rejected singular
  /// value; absent when nothing was rejected.
  std::optional<double> sv_gap;
  std::vector<double> singular_values;
};

struct DensenessResult {
  bool dense = false;
  RankData rank;
};

/// Full-span test for a restricted table: the row span, in the coordinate
/// space of positive-mass blocks, must have dimension equal to the number
/// of such blocks. Rows must be block-constant on the partition.
DensenessResult denseness_check(const LikelihoodRatioTable& table, const Partition& part,
                                const DominatingMeasure& p0, double svd_tol = kDefaultSvdTol);

struct SeparatingWitness {
  /// Block-constant over observation points, sup-norm 1, sign-fixed so the
  /// first nonzero entry is positive.
  Eigen::VectorXd values;
  double max_abs_expectation = 0.0;
  double smallest_sv = 0.0;
};

/// Searches the right null space of the block-aggregated expectation
/// matrix M[theta, B] = P_theta(B) over positive-mass blocks. A null
/// vector is a bounded mean-zero function separating the family; absence
/// certifies completeness of the restriction.
std::optional<SeparatingWitness> witness_search(const DiscreteExperiment& exp,
                                                const DominatingMeasure& p0, const Partition& part,
                                                double svd_tol = kDefaultSvdTol);

enum class Verdict { Dense, Witness };

const char* to_string(Verdict v);

struct CompletenessCertificate {
  Verdict verdict = Verdict::Dense;
  RankData rank;
  std::optional<SeparatingWitness> witness;
};

/// Runs both the denseness test and the witness search, which are duals of
/// the same aggregated matrix, and requires them to agree; disagreement
/// raises InternalInconsistency with both raw results in the message.
CompletenessCertificate certify(const DiscreteExperiment& exp, const DominatingMeasure& p0,
                                const Partition& part, double svd_tol = kDefaultSvdTol);

struct Prop1SweepConfig {
  int n_trials = 1000;
  int max_observations = 12;
  int max_parameters = 12;
  std::uint64_t seed = 0;
  double svd_tol = kDefaultSvdTol;
};

struct Prop1Disagreement {
  int trial = 0;
  Eigen::MatrixXd probs;
  std::vector<std::vector<int>> blocks;
  Eigen::VectorXd weights;
  bool dense = false;
  bool witness_found = false;
  int rank = 0;
  int positive_blocks = 0;
};

struct Prop1SweepReport {
  Prop1SweepConfig config;
  int n_dense = 0;
  int n_witness = 0;
  /// Trials where the denseness test and the witness search disagreed;
  /// expected empty. Inputs are kept verbatim for reproduction.
  std::vector<Prop1Disagreement> disagreements;
  /// Trials whose witness failed the sup-norm / zero-expectation contract.
  std::vector<int> witness_violations;
  double worst_witness_expectation = 0.0;
};

/// Randomized equivalence test of the two certificate routes over random
/// experiments, partitions and dominating measures. Trial t draws from a
/// stream keyed by (seed, t), so reports are reproducible regardless of
/// scheduling.
Prop1SweepReport prop1_equivalence_sweep(const Prop1SweepConfig& config);

}  // namespace bclab

#endif
