#include "bclab/conditioning.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace bclab {

Partition::Partition(int ground_size, std::vector<std::vector<int>> blocks)
    : ground_size_(ground_size), blocks_(std::move(blocks)) {
  if (ground_size_ <= 0) fail(ErrorKind::DimensionMismatch, "ground set must be nonempty");
  std::vector<int> owner(static_cast<std::size_t>(ground_size_), -1);
  int covered = 0;
  for (auto& block : blocks_) {
    if (block.empty()) fail(ErrorKind::DimensionMismatch, "empty block");
    std::sort(block.begin(), block.end());
    for (int x : block) {
      if (x < 0 || x >= ground_size_) {
        std::ostringstream msg;
        msg << "index " << x << " outside ground set of size " << ground_size_;
        fail(ErrorKind::DimensionMismatch, msg.str());
      }
      if (owner[static_cast<std::size_t>(x)] != -1)
        fail(ErrorKind::DimensionMismatch, "blocks are not disjoint at index " + std::to_string(x));
      owner[static_cast<std::size_t>(x)] = 0;
      ++covered;
    }
  }
  if (covered != ground_size_)
    fail(ErrorKind::DimensionMismatch, "blocks do not cover the ground set");
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  block_of_.assign(static_cast<std::size_t>(ground_size_), -1);
  for (int b = 0; b < n_blocks(); ++b)
    for (int x : blocks_[static_cast<std::size_t>(b)]) block_of_[static_cast<std::size_t>(x)] = b;
}

Partition Partition::singletons(int n) {
  std::vector<std::vector<int>> blocks;
  for (int x = 0; x < n; ++x) blocks.push_back({x});
  return Partition(n, std::move(blocks));
}

Partition Partition::trivial(int n) {
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  return Partition(n, {all});
}

bool refines(const Partition& fine, const Partition& coarse) {
  if (fine.ground_size() != coarse.ground_size())
    fail(ErrorKind::GroundSetMismatch, "partitions live on different ground sets");
  for (const auto& block : fine.blocks()) {
    const int target = coarse.block_of()[static_cast<std::size_t>(block.front())];
    for (int x : block)
      if (coarse.block_of()[static_cast<std::size_t>(x)] != target) return false;
  }
  return true;
}

Filtration::Filtration(std::vector<Partition> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) fail(ErrorKind::FiltrationInvalid, "a filtration needs at least one level");
  for (const auto& level : levels_)
    if (level.ground_size() != levels_.front().ground_size())
      fail(ErrorKind::GroundSetMismatch, "filtration levels live on different ground sets");
}

Eigen::VectorXd conditional_expectation(const Eigen::VectorXd& y, const Partition& part,
                                        const DominatingMeasure& p0) {
  const auto& supp = p0.support();
  if (y.size() != static_cast<Eigen::Index>(supp.size()))
    fail(ErrorKind::DimensionMismatch, "y must be given over the support of the measure");
  if (part.ground_size() != p0.n_observations())
    fail(ErrorKind::DimensionMismatch, "partition ground set does not match the measure");
  const int nb = part.n_blocks();
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(nb);
  Eigen::VectorXd dot = Eigen::VectorXd::Zero(nb);
  for (std::size_t j = 0; j < supp.size(); ++j) {
    const int b = part.block_of()[static_cast<std::size_t>(supp[j])];
    const double w = p0.weights()[supp[j]];
    mass[b] += w;
    dot[b] += w * y[static_cast<Eigen::Index>(j)];
  }
  Eigen::VectorXd out(y.size());
  for (std::size_t j = 0; j < supp.size(); ++j) {
    const int b = part.block_of()[static_cast<std::size_t>(supp[j])];
    out[static_cast<Eigen::Index>(j)] = mass[b] > 0.0 ? dot[b] / mass[b] : 0.0;
  }
  return out;
}

LikelihoodRatioTable restricted_lr_table(const DiscreteExperiment& exp,
                                         const DominatingMeasure& p0, const Partition& part) {
  const LikelihoodRatioTable full = likelihood_ratio_table(exp, p0);
  Eigen::MatrixXd rows(full.n_parameters(), full.support_size());
  for (int t = 0; t < full.n_parameters(); ++t)
    rows.row(t) = conditional_expectation(full.ratios().row(t).transpose(), part, p0).transpose();
  return LikelihoodRatioTable(std::move(rows), full.support(), full.support_weights(),
                              full.dropped_columns());
}

SpanContainment span_contains(const LikelihoodRatioTable& inner, const LikelihoodRatioTable& outer,
                              double tol) {
  if (inner.support() != outer.support())
    fail(ErrorKind::DimensionMismatch, "tables are defined on different supports");
  // Columns of basis are the outer rows; each inner row is projected onto
  // their span and judged by the relative residual.
  const Eigen::MatrixXd basis = outer.ratios().transpose();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(basis);
  SpanContainment result;
  result.contained = true;
  for (int t = 0; t < inner.n_parameters(); ++t) {
    const Eigen::VectorXd v = inner.ratios().row(t).transpose();
    const double vnorm = v.norm();
    double rel = 0.0;
    if (vnorm > 0.0) {
      const Eigen::VectorXd coef = cod.solve(v);
      rel = (basis * coef - v).norm() / vnorm;
    }
    result.max_rel_residual = std::max(result.max_rel_residual, rel);
    if (rel > tol) result.contained = false;
  }
  return result;
}

}  // namespace bclab
