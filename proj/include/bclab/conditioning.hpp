#ifndef BCLAB_CONDITIONING_HPP
#define BCLAB_CONDITIONING_HPP

#include <Eigen/Dense>
#include <vector>

#include "bclab/experiment.hpp"

namespace bclab {

// Default relative residual for span-containment decisions; kept at the
// same order as the SVD rank threshold so the two tests agree on what
// counts as zero.
inline constexpr double kDefaultSpanTol = 1e-9;

/// A sub-sigma-field on a finite observation space, stored as the
/// generating partition of observation indices. Canonical form: blocks
/// sorted internally and ordered by smallest element.
class Partition {
 public:
  Partition(int ground_size, std::vector<std::vector<int>> blocks);

  static Partition singletons(int n);
  static Partition trivial(int n);

  int ground_size() const { return ground_size_; }
  int n_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  /// Element index -> containing block index.
  const std::vector<int>& block_of() const { return block_of_; }

  bool operator==(const Partition& other) const {
    return ground_size_ == other.ground_size_ && blocks_ == other.blocks_;
  }

 private:
  int ground_size_;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
};

/// True iff every block of `fine` is contained in a single block of
/// `coarse` (sigma-field inclusion, coarse included in fine).
bool refines(const Partition& fine, const Partition& coarse);

/// An ordered list of partitions on one ground set. Whether the levels
/// actually refine toward a target is decided by check_filtration, so
/// broken chains are representable and reportable.
class Filtration {
 public:
  explicit Filtration(std::vector<Partition> levels);

  int n_levels() const { return static_cast<int>(levels_.size()); }
  const std::vector<Partition>& levels() const { return levels_; }

 private:
  std::vector<Partition> levels_;
};

/// Conditional expectation of y (given over the support of p0) with
/// respect to the partition, under p0: block averages weighted by p0.
/// Blocks carrying zero p0-mass contribute the value 0.
Eigen::VectorXd conditional_expectation(const Eigen::VectorXd& y, const Partition& part,
                                        const DominatingMeasure& p0);

/// Likelihood-ratio table of the restricted subexperiment: each row is the
/// conditional expectation of the corresponding full ratio row. Rows stay
/// weighted-sum normalized.
LikelihoodRatioTable restricted_lr_table(const DiscreteExperiment& exp,
                                         const DominatingMeasure& p0, const Partition& part);

struct SpanContainment {
  bool contained = false;
  /// Worst relative least-squares residual across inner rows.
  double max_rel_residual = 0.0;
};

/// True iff every row of `inner` lies in the row span of `outer`, up to a
/// relative least-squares residual of tol per row.
SpanContainment span_contains(const LikelihoodRatioTable& inner, const LikelihoodRatioTable& outer,
                              double tol = kDefaultSpanTol);

}  // namespace bclab

#endif
