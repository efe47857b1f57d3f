#ifndef BCLAB_BROWNIAN_HPP
#define BCLAB_BROWNIAN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bclab/errors.hpp"

namespace bclab {

// Dyadic resolution cap; 2^16 cells keeps samples at desk scale.
inline constexpr int kMaxLevel = 16;
// Cap on n_paths * 2^level (about 1 GiB of doubles).
inline constexpr std::int64_t kMaxSampleElements = std::int64_t(1) << 27;
// Path-by-path tolerance for the closed-form conditional identity.
inline constexpr double kAlgebraicTol = 1e-10;

/// Piecewise-constant drift on [0,1): one value per dyadic cell of width
/// 2^-level, in units of 1/time.
struct StepDrift {
  int level = 0;
  Eigen::VectorXd values;

  StepDrift(int level, Eigen::VectorXd values);
  static StepDrift constant(double c) { return StepDrift(0, Eigen::VectorXd::Constant(1, c)); }

  double cell_width() const { return std::ldexp(1.0, -level); }
};

/// Integral of the drift over each dyadic cell at the given (finer or
/// equal) level.
Eigen::VectorXd cell_integrals(const StepDrift& drift, int level);

/// Matrix of process increments on the dyadic grid at one level: one row
/// per simulated path, 2^level columns.
struct IncrementSample {
  int level = 0;
  Eigen::MatrixXd increments;
  std::uint64_t seed = 0;
  std::string origin;

  std::int64_t n_paths() const { return increments.rows(); }
  int n_cells() const { return static_cast<int>(increments.cols()); }
};

/// Exact simulation: increment i is Gaussian with mean equal to the cell
/// integral of the drift and variance 2^-level. Draw (path, cell) comes
/// from a counter-based stream, so output is identical for a fixed seed
/// under any worker count, and extending n_paths preserves a prefix.
IncrementSample simulate_increments(int level, const StepDrift& drift, std::int64_t n_paths,
                                    std::uint64_t seed);

/// Per-path log likelihood ratio of the drifted increment law against the
/// driftless one.
Eigen::VectorXd girsanov_log_lr(const IncrementSample& sample, const StepDrift& drift);

/// Positive per-path likelihood ratios; mean 1 under the null.
struct LRVector {
  Eigen::VectorXd values;
  explicit LRVector(Eigen::VectorXd values);
};

LRVector girsanov_lr(const IncrementSample& sample, const StepDrift& drift);

/// Adjacent-cell sums: the same paths observed one level coarser.
IncrementSample coarsen(const IncrementSample& sample);

/// The step drift at a coarser level whose cell values are the averages of
/// this drift over the coarse cells, so coarse increment means match.
StepDrift averaged_drift(const StepDrift& drift, int target_level);

/// Same, starting from a vector of fine-cell integrals at `level`.
StepDrift averaged_drift_from_integrals(const Eigen::VectorXd& integrals, int level,
                                        int target_level);

struct TowerCheck {
  std::string label;
  double mean_diff = 0.0;
  double se = 0.0;
  bool ok = false;
};

struct IdentityReport {
  int fine_level = 0;
  int coarse_level = 0;
  int drift_level = 0;
  Eigen::VectorXd drift_values;
  std::int64_t n_paths = 0;
  std::uint64_t seed = 0;
  /// Worst relative gap, over paths, between the closed-form conditional
  /// expectation of the fine ratio and the coarse ratio under the
  /// averaged drift.
  double algebraic_max_rel_gap = 0.0;
  bool algebraic_ok = false;
  /// Same gap when the averaged drift is replaced by raw cell integrals
  /// (no division by cell width); stays 0 only at coarse level 0 where
  /// the cell width is 1.
  double unnormalized_max_rel_gap = 0.0;
  std::vector<TowerCheck> tower;
  bool tower_ok = false;
};

/// Two-sided check of E0[LR_fine | coarse grid] = LR_coarse(averaged
/// drift): exact path-by-path algebra, plus a Monte-Carlo tower test
/// E0[LR_fine Z] = E0[LR_coarse Z] for Z in {1, coarse sign patterns}.
IdentityReport conditional_lr_identity_check(const StepDrift& drift, int fine_level,
                                             int coarse_level, std::int64_t n_paths,
                                             std::uint64_t seed);

/// Registered path functionals with closed-form conditional expectations
/// given grid values: "x1" (terminal value), "int_x" (time integral),
/// "int_x_clipped" (time integral clipped to [-1,1]).
bool functional_is_registered(const std::string& id);

/// Per-path conditional expectation of the functional given the grid
/// values of the sample; inside each cell the path is a Brownian bridge.
Eigen::VectorXd bridge_conditional_expectation(const std::string& functional_id,
                                               const IncrementSample& sample);

struct MartingaleRow {
  int level = 0;
  double estimate = 0.0;
  double se = 0.0;
  std::optional<double> analytic;
};

struct MartingaleReport {
  std::string functional;
  std::vector<int> levels;
  std::int64_t n_paths = 0;
  std::uint64_t seed = 0;
  int simulation_level = 0;
  std::vector<MartingaleRow> rows;
};

/// Monte-Carlo estimates of E0 |Y_k - Y| along the grid filtration, with
/// the exact functional value simulated jointly (grid plus the independent
/// cell-bridge residual), so estimates carry no discretization bias.
MartingaleReport martingale_convergence_study(const std::string& functional_id,
                                              const std::vector<int>& levels,
                                              std::int64_t n_paths, std::uint64_t seed);

struct GaussianShiftConfig {
  int dimension = 1;
  std::vector<int> mean_grid_sizes = {3, 5, 9, 17, 33};
  std::vector<int> bin_counts = {4, 8, 16};
  /// Means are placed on [-mean_span, mean_span]^d; inner bin edges span
  /// [-edge_span, edge_span] per axis.
  double mean_span = 4.0;
  double edge_span = 3.0;
  double svd_tol = 1e-10;
};

struct GaussianShiftRow {
  int bin_count = 0;
  int mean_grid_size = 0;
  int total_bins = 0;
  int rank = 0;
  bool saturated = false;
};

struct GaussianShiftReport {
  GaussianShiftConfig config;
  std::vector<GaussianShiftRow> rows;
};

/// Finite shadow of the completeness of Gaussian location families: bins
/// the standard Gaussian shifted to each mean of a growing grid and
/// reports the span rank against the number of bins, which saturates.
GaussianShiftReport gaussian_shift_rank_sweep(const GaussianShiftConfig& config);

}  // namespace bclab

#endif
