#include "bclab/brownian.hpp"

#include <cmath>
#include <sstream>

#include "bclab/completeness.hpp"
#include "bclab/conditioning.hpp"
#include "bclab/experiment.hpp"
#include "bclab/parallel.hpp"
#include "bclab/rng.hpp"

namespace bclab {

namespace {

void check_level_range(int level) {
  if (level < 0 || level > kMaxLevel) {
    std::ostringstream msg;
    msg << "level " << level << " outside [0, " << kMaxLevel << "]";
    fail(ErrorKind::ResourceLimit, msg.str());
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) {
  constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Mean of a N(mu, sigma^2) variable clipped to [-c, c].
double clipped_normal_mean(double mu, double sigma, double c) {
  if (sigma <= 0.0) return std::clamp(mu, -c, c);
  const double alpha = (-c - mu) / sigma;
  const double beta = (c - mu) / sigma;
  const double phi_a = normal_cdf(alpha);
  const double phi_b = normal_cdf(beta);
  return -c * phi_a + c * (1.0 - phi_b) + mu * (phi_b - phi_a) -
         sigma * (normal_pdf(beta) - normal_pdf(alpha));
}

/// Drift resampled to any level: averages when coarsening, repeats values
/// when refining; either way the step function's cell averages at the
/// target level.
StepDrift resample_drift(const StepDrift& drift, int level) {
  check_level_range(level);
  if (level == drift.level) return drift;
  if (level > drift.level) {
    const int q = 1 << (level - drift.level);
    Eigen::VectorXd values(std::int64_t(1) << level);
    for (int i = 0; i < values.size(); ++i) values[i] = drift.values[i / q];
    return StepDrift(level, std::move(values));
  }
  const int q = 1 << (drift.level - level);
  Eigen::VectorXd values(std::int64_t(1) << level);
  for (int i = 0; i < values.size(); ++i) values[i] = drift.values.segment(i * q, q).mean();
  return StepDrift(level, std::move(values));
}

/// Trapezoid of grid values with X(0) = 0: the bridge conditional
/// expectation of the time integral.
double trapezoid(const Eigen::MatrixXd& increments, std::int64_t path, double h) {
  double x = 0.0;
  Neumaier acc;
  for (int c = 0; c < increments.cols(); ++c) {
    const double next = x + increments(path, c);
    acc.add(0.5 * h * (x + next));
    x = next;
  }
  return acc.value();
}

double path_sum(const Eigen::MatrixXd& increments, std::int64_t path) {
  Neumaier acc;
  for (int c = 0; c < increments.cols(); ++c) acc.add(increments(path, c));
  return acc.value();
}

// Conditional variance of the time integral given the grid at this level:
// 2^level independent bridge integrals of variance h^3 / 12 each.
double integral_conditional_var(int level) {
  const double h = std::ldexp(1.0, -level);
  return h * h / 12.0;
}

constexpr double kClipBound = 1.0;

}  // namespace

StepDrift::StepDrift(int level, Eigen::VectorXd values_in) : level(level), values(std::move(values_in)) {
  check_level_range(level);
  if (values.size() != (std::int64_t(1) << level))
    fail(ErrorKind::DimensionMismatch, "a level-k drift needs exactly 2^k values");
  for (int i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i])) fail(ErrorKind::DimensionMismatch, "drift values must be finite");
}

Eigen::VectorXd cell_integrals(const StepDrift& drift, int level) {
  check_level_range(level);
  if (drift.level > level)
    fail(ErrorKind::LevelMismatch, "drift is finer than the requested level");
  const double h = std::ldexp(1.0, -level);
  const int q = 1 << (level - drift.level);
  Eigen::VectorXd m(std::int64_t(1) << level);
  for (int i = 0; i < m.size(); ++i) m[i] = drift.values[i / q] * h;
  return m;
}

IncrementSample simulate_increments(int level, const StepDrift& drift, std::int64_t n_paths,
                                    std::uint64_t seed) {
  check_level_range(level);
  if (n_paths < 1) fail(ErrorKind::DimensionMismatch, "need at least one path");
  const std::int64_t cells = std::int64_t(1) << level;
  if (n_paths > kMaxSampleElements / cells)
    fail(ErrorKind::ResourceLimit, "sample would exceed the element cap");
  const Eigen::VectorXd m = cell_integrals(drift, level);
  const double sd = std::sqrt(std::ldexp(1.0, -level));

  IncrementSample sample;
  sample.level = level;
  sample.seed = seed;
  {
    std::ostringstream origin;
    origin << "simulated(level=" << level << ",drift_level=" << drift.level << ")";
    sample.origin = origin.str();
  }
  sample.increments.resize(n_paths, cells);
  parallel_blocks(n_paths, kDefaultBlock, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
    for (std::int64_t p = begin; p < end; ++p)
      for (std::int64_t c = 0; c < cells; ++c)
        sample.increments(p, c) =
            m[c] + sd * counter_normal(seed, rng_stream::kIncrements, static_cast<std::uint64_t>(p),
                                       static_cast<std::uint64_t>(c));
  });
  return sample;
}

Eigen::VectorXd girsanov_log_lr(const IncrementSample& sample, const StepDrift& drift) {
  if (drift.level > sample.level)
    fail(ErrorKind::LevelMismatch, "drift is finer than the sample grid");
  const double h = std::ldexp(1.0, -sample.level);
  const Eigen::VectorXd m = cell_integrals(drift, sample.level);
  const Eigen::VectorXd a = m / h;
  Neumaier quad;
  for (int c = 0; c < m.size(); ++c) quad.add(m[c] * m[c] / (2.0 * h));
  const double half_quadratic = quad.value();

  Eigen::VectorXd log_lr(sample.n_paths());
  parallel_blocks(sample.n_paths(), kDefaultBlock,
                  [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                    for (std::int64_t p = begin; p < end; ++p) {
                      Neumaier acc;
                      for (int c = 0; c < sample.n_cells(); ++c)
                        acc.add(sample.increments(p, c) * a[c]);
                      log_lr[p] = acc.value() - half_quadratic;
                    }
                  });
  return log_lr;
}

LRVector::LRVector(Eigen::VectorXd values_in) : values(std::move(values_in)) {
  for (int i = 0; i < values.size(); ++i)
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      fail(ErrorKind::InternalInconsistency,
           "likelihood ratio under- or overflowed; drift too extreme for double range");
}

LRVector girsanov_lr(const IncrementSample& sample, const StepDrift& drift) {
  return LRVector(girsanov_log_lr(sample, drift).array().exp());
}

IncrementSample coarsen(const IncrementSample& sample) {
  if (sample.level < 1) fail(ErrorKind::LevelZero, "level-0 samples cannot be coarsened");
  IncrementSample out;
  out.level = sample.level - 1;
  out.seed = sample.seed;
  out.origin = "coarsened(" + sample.origin + ")";
  const int cells = sample.n_cells() / 2;
  out.increments.resize(sample.n_paths(), cells);
  for (int c = 0; c < cells; ++c)
    out.increments.col(c) = sample.increments.col(2 * c) + sample.increments.col(2 * c + 1);
  return out;
}

StepDrift averaged_drift(const StepDrift& drift, int target_level) {
  if (target_level >= drift.level)
    fail(ErrorKind::LevelOrderViolation, "target level must be strictly coarser");
  return resample_drift(drift, target_level);
}

StepDrift averaged_drift_from_integrals(const Eigen::VectorXd& integrals, int level,
                                        int target_level) {
  check_level_range(level);
  if (target_level >= level)
    fail(ErrorKind::LevelOrderViolation, "target level must be strictly coarser");
  if (integrals.size() != (std::int64_t(1) << level))
    fail(ErrorKind::DimensionMismatch, "a level-k integral vector needs 2^k entries");
  check_level_range(target_level);
  const int q = 1 << (level - target_level);
  const double coarse_h = std::ldexp(1.0, -target_level);
  Eigen::VectorXd values(std::int64_t(1) << target_level);
  for (int i = 0; i < values.size(); ++i) values[i] = integrals.segment(i * q, q).sum() / coarse_h;
  return StepDrift(target_level, std::move(values));
}

IdentityReport conditional_lr_identity_check(const StepDrift& drift, int fine_level,
                                             int coarse_level, std::int64_t n_paths,
                                             std::uint64_t seed) {
  if (coarse_level >= fine_level)
    fail(ErrorKind::LevelOrderViolation, "coarse level must be strictly below the fine level");
  check_level_range(fine_level);
  if (drift.level > fine_level)
    fail(ErrorKind::LevelMismatch, "drift is finer than the fine level");

  IdentityReport report;
  report.fine_level = fine_level;
  report.coarse_level = coarse_level;
  report.drift_level = drift.level;
  report.drift_values = drift.values;
  report.n_paths = n_paths;
  report.seed = seed;

  const IncrementSample fine = simulate_increments(fine_level, StepDrift::constant(0.0), n_paths, seed);
  IncrementSample coarse = fine;
  for (int level = fine_level; level > coarse_level; --level) coarse = coarsen(coarse);

  const double h = std::ldexp(1.0, -fine_level);
  const int q = 1 << (fine_level - coarse_level);
  const int coarse_cells = 1 << coarse_level;
  const Eigen::VectorXd m = cell_integrals(drift, fine_level);

  // Closed-form E0[LR_fine | coarse increments]: inside each coarse cell
  // the fine increments given their sum are Gaussian with mean sum/q and
  // covariance h (I - J/q), so the conditional expectation of the
  // exponential is explicit.
  Eigen::VectorXd sum_a(coarse_cells), sum_a2(coarse_cells);
  for (int b = 0; b < coarse_cells; ++b) {
    double sa = 0.0, sa2 = 0.0;
    for (int i = 0; i < q; ++i) {
      const double a = m[b * q + i] / h;
      sa += a;
      sa2 += a * a;
    }
    sum_a[b] = sa;
    sum_a2[b] = sa2;
  }
  Neumaier const_acc;
  for (int b = 0; b < coarse_cells; ++b)
    const_acc.add(0.5 * h * (sum_a2[b] - sum_a[b] * sum_a[b] / q) - 0.5 * h * sum_a2[b]);
  const double log_const = const_acc.value();

  Eigen::VectorXd log_conditional(n_paths);
  parallel_blocks(n_paths, kDefaultBlock, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
    for (std::int64_t p = begin; p < end; ++p) {
      Neumaier acc;
      for (int b = 0; b < coarse_cells; ++b) acc.add(coarse.increments(p, b) * sum_a[b] / q);
      log_conditional[p] = acc.value() + log_const;
    }
  });

  const StepDrift averaged = resample_drift(drift, coarse_level);
  const Eigen::VectorXd log_coarse = girsanov_log_lr(coarse, averaged);

  double worst = 0.0;
  for (std::int64_t p = 0; p < n_paths; ++p)
    worst = std::max(worst, std::abs(std::expm1(log_conditional[p] - log_coarse[p])));
  report.algebraic_max_rel_gap = worst;
  report.algebraic_ok = worst <= kAlgebraicTol;

  // Regression case: treating the coarse cell integral itself as the drift
  // value (skipping the division by cell width) must break the identity
  // whenever the coarse cell width is not 1.
  const Eigen::VectorXd coarse_integrals = cell_integrals(averaged, coarse_level);
  const StepDrift unnormalized(coarse_level, coarse_integrals);
  const Eigen::VectorXd log_unnorm = girsanov_log_lr(coarse, unnormalized);
  double worst_unnorm = 0.0;
  for (std::int64_t p = 0; p < n_paths; ++p)
    worst_unnorm = std::max(worst_unnorm, std::abs(std::expm1(log_unnorm[p] - log_conditional[p])));
  report.unnormalized_max_rel_gap = worst_unnorm;

  // Tower test on coupled paths: E0[(LR_fine - LR_coarse) Z] = 0.
  const Eigen::VectorXd log_fine = girsanov_log_lr(fine, drift);
  const Eigen::VectorXd lr_fine = log_fine.array().exp();
  const Eigen::VectorXd lr_coarse = log_coarse.array().exp();

  auto run_tower = [&](const std::string& label, auto&& z_of_path) {
    const MeanSe stats = mean_and_se(n_paths, [&](std::int64_t p) {
      return (lr_fine[p] - lr_coarse[p]) * z_of_path(p);
    });
    TowerCheck check;
    check.label = label;
    check.mean_diff = stats.mean;
    check.se = stats.se;
    check.ok = std::abs(stats.mean) <= 3.0 * stats.se + 1e-12;
    report.tower.push_back(check);
  };

  run_tower("const_1", [](std::int64_t) { return 1.0; });
  if (coarse_cells <= 4) {
    for (int pattern = 0; pattern < (1 << coarse_cells); ++pattern) {
      std::ostringstream label;
      label << "signs_";
      for (int b = 0; b < coarse_cells; ++b) label << ((pattern >> b) & 1);
      run_tower(label.str(), [&, pattern](std::int64_t p) {
        for (int b = 0; b < coarse_cells; ++b) {
          const bool positive = coarse.increments(p, b) > 0.0;
          if (positive != (((pattern >> b) & 1) != 0)) return 0.0;
        }
        return 1.0;
      });
    }
  } else {
    run_tower("sign_first_cell", [&](std::int64_t p) {
      return coarse.increments(p, 0) > 0.0 ? 1.0 : 0.0;
    });
  }
  report.tower_ok = true;
  for (const auto& check : report.tower) report.tower_ok = report.tower_ok && check.ok;
  return report;
}

bool functional_is_registered(const std::string& id) {
  return id == "x1" || id == "int_x" || id == "int_x_clipped";
}

Eigen::VectorXd bridge_conditional_expectation(const std::string& functional_id,
                                               const IncrementSample& sample) {
  if (!functional_is_registered(functional_id))
    fail(ErrorKind::UnsupportedFunctional, "unknown functional '" + functional_id + "'");
  const double h = std::ldexp(1.0, -sample.level);
  Eigen::VectorXd out(sample.n_paths());
  if (functional_id == "x1") {
    parallel_blocks(sample.n_paths(), kDefaultBlock,
                    [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                      for (std::int64_t p = begin; p < end; ++p)
                        out[p] = path_sum(sample.increments, p);
                    });
    return out;
  }
  const bool clipped = functional_id == "int_x_clipped";
  const double sigma = std::sqrt(integral_conditional_var(sample.level));
  parallel_blocks(sample.n_paths(), kDefaultBlock,
                  [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                    for (std::int64_t p = begin; p < end; ++p) {
                      const double trap = trapezoid(sample.increments, p, h);
                      out[p] = clipped ? clipped_normal_mean(trap, sigma, kClipBound) : trap;
                    }
                  });
  return out;
}

MartingaleReport martingale_convergence_study(const std::string& functional_id,
                                              const std::vector<int>& levels,
                                              std::int64_t n_paths, std::uint64_t seed) {
  if (!functional_is_registered(functional_id))
    fail(ErrorKind::UnsupportedFunctional, "unknown functional '" + functional_id + "'");
  if (levels.empty()) fail(ErrorKind::DimensionMismatch, "need at least one level");
  for (std::size_t i = 0; i + 1 < levels.size(); ++i)
    if (levels[i] >= levels[i + 1])
      fail(ErrorKind::LevelOrderViolation, "levels must be strictly increasing");

  MartingaleReport report;
  report.functional = functional_id;
  report.levels = levels;
  report.n_paths = n_paths;
  report.seed = seed;
  const int sim_level = levels.back();
  report.simulation_level = sim_level;

  const IncrementSample fine =
      simulate_increments(sim_level, StepDrift::constant(0.0), n_paths, seed);

  // Exact functional value: the grid term plus the independent total
  // bridge residual, drawn from its own stream. The pair (Y_k, Y) then has
  // exactly the right joint law for every k <= sim_level.
  Eigen::VectorXd exact(n_paths);
  const double resid_sd = std::sqrt(integral_conditional_var(sim_level));
  const double fine_h = std::ldexp(1.0, -sim_level);
  parallel_blocks(n_paths, kDefaultBlock, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
    for (std::int64_t p = begin; p < end; ++p) {
      if (functional_id == "x1") {
        exact[p] = path_sum(fine.increments, p);
      } else {
        const double value =
            trapezoid(fine.increments, p, fine_h) +
            resid_sd * counter_normal(seed, rng_stream::kBridgeResidual,
                                      static_cast<std::uint64_t>(p), 0);
        exact[p] = functional_id == "int_x_clipped" ? std::clamp(value, -kClipBound, kClipBound)
                                                    : value;
      }
    }
  });

  // Walk down from the simulation level, reusing the coarsened samples.
  std::vector<Eigen::VectorXd> per_level(levels.size());
  IncrementSample current = fine;
  int current_level = sim_level;
  for (std::size_t idx = levels.size(); idx-- > 0;) {
    while (current_level > levels[idx]) {
      current = coarsen(current);
      --current_level;
    }
    per_level[idx] = bridge_conditional_expectation(functional_id, current);
  }

  for (std::size_t idx = 0; idx < levels.size(); ++idx) {
    const Eigen::VectorXd& approx = per_level[idx];
    const MeanSe stats =
        mean_and_se(n_paths, [&](std::int64_t p) { return std::abs(approx[p] - exact[p]); });
    MartingaleRow row;
    row.level = levels[idx];
    row.estimate = stats.mean;
    row.se = stats.se;
    if (functional_id == "int_x") {
      row.analytic = std::ldexp(1.0, -levels[idx]) / std::sqrt(12.0) * std::sqrt(2.0 / M_PI);
    } else if (functional_id == "x1") {
      row.analytic = 0.0;
    }
    report.rows.push_back(row);
  }
  return report;
}

GaussianShiftReport gaussian_shift_rank_sweep(const GaussianShiftConfig& config) {
  if (config.dimension < 1 || config.dimension > 3)
    fail(ErrorKind::ResourceLimit, "dimension must be 1, 2 or 3");
  GaussianShiftReport report;
  report.config = config;
  for (int bins : config.bin_counts) {
    if (bins < 1) fail(ErrorKind::DimensionMismatch, "bin count must be positive");
    double total_bins_d = 1.0;
    for (int d = 0; d < config.dimension; ++d) total_bins_d *= bins;
    if (total_bins_d > 4096.0) fail(ErrorKind::ResourceLimit, "bin count capped at 4096 cells");
    const int total_bins = static_cast<int>(total_bins_d);

    // Per-axis bin probabilities under a shifted standard Gaussian; the
    // outer bins absorb the tails.
    auto axis_probs = [&](double mu) {
      Eigen::VectorXd probs(bins);
      double prev_cdf = 0.0;
      for (int j = 0; j < bins; ++j) {
        double next_cdf = 1.0;
        if (j + 1 < bins) {
          // inner edges: B-1 points equally spaced on [-edge_span, edge_span]
          const double edge =
              bins == 2 ? 0.0
                        : -config.edge_span +
                              2.0 * config.edge_span * j / static_cast<double>(bins - 2);
          next_cdf = normal_cdf(edge - mu);
        }
        probs[j] = next_cdf - prev_cdf;
        prev_cdf = next_cdf;
      }
      return probs;
    };

    for (int grid : config.mean_grid_sizes) {
      if (grid < 1) fail(ErrorKind::DimensionMismatch, "mean grid size must be positive");
      double total_means_d = 1.0;
      for (int d = 0; d < config.dimension; ++d) total_means_d *= grid;
      if (total_means_d > 4096.0)
        fail(ErrorKind::ResourceLimit, "mean grid capped at 4096 points");
      const int total_means = static_cast<int>(total_means_d);

      Eigen::VectorXd axis_means(grid);
      for (int i = 0; i < grid; ++i)
        axis_means[i] = grid == 1 ? 0.0
                                  : -config.mean_span +
                                        2.0 * config.mean_span * i / static_cast<double>(grid - 1);
      std::vector<Eigen::VectorXd> axis_rows(static_cast<std::size_t>(grid));
      for (int i = 0; i < grid; ++i) axis_rows[static_cast<std::size_t>(i)] = axis_probs(axis_means[i]);

      Eigen::MatrixXd probs(total_means, total_bins);
      for (int t = 0; t < total_means; ++t) {
        // product structure across dimensions
        for (int x = 0; x < total_bins; ++x) {
          double p = 1.0;
          int ti = t, xi = x;
          for (int d = 0; d < config.dimension; ++d) {
            p *= axis_rows[static_cast<std::size_t>(ti % grid)][xi % bins];
            ti /= grid;
            xi /= bins;
          }
          probs(t, x) = p;
        }
        probs.row(t) /= probs.row(t).sum();
      }

      const DiscreteExperiment exp = build_experiment(probs);
      const DominatingMeasure p0 = DominatingMeasure::uniform_mixture(exp);
      const Partition singles = Partition::singletons(total_bins);
      const LikelihoodRatioTable table = likelihood_ratio_table(exp, p0);
      const DensenessResult dense = denseness_check(table, singles, p0, config.svd_tol);

      GaussianShiftRow row;
      row.bin_count = bins;
      row.mean_grid_size = grid;
      row.total_bins = dense.rank.positive_blocks;
      row.rank = dense.rank.span_dim;
      row.saturated = dense.dense;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace bclab
