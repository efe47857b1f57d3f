#include "bclab/filtration_harness.hpp"

#include <algorithm>

#include "bclab/random_experiments.hpp"

namespace bclab {

bool check_filtration(const Filtration& filt, const Partition& target) {
  const auto& levels = filt.levels();
  if (levels.front().ground_size() != target.ground_size())
    fail(ErrorKind::GroundSetMismatch, "filtration and target live on different ground sets");
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    if (!refines(levels[k + 1], levels[k])) return false;
  }
  return levels.back() == target;
}

Prop2Report prop2_verify(const DiscreteExperiment& exp, const DominatingMeasure& p0,
                         const Partition& target, const Filtration& filt,
                         const Tolerances& tol) {
  if (!check_filtration(filt, target))
    fail(ErrorKind::FiltrationInvalid,
         "levels must successively refine and end at the target partition");

  Prop2Report report;
  const LikelihoodRatioTable target_table = restricted_lr_table(exp, p0, target);
  report.target = certify(exp, p0, target, tol.svd_tol);

  report.premises_ok = true;
  report.all_levels_dense = true;
  for (const Partition& level : filt.levels()) {
    LevelReport lr;
    const LikelihoodRatioTable level_table = restricted_lr_table(exp, p0, level);
    const SpanContainment span = span_contains(level_table, target_table, tol.span_tol);
    lr.premise_ok = span.contained;
    lr.premise_residual = span.max_rel_residual;
    lr.certificate = certify(exp, p0, level, tol.svd_tol);
    report.premises_ok = report.premises_ok && lr.premise_ok;
    report.all_levels_dense =
        report.all_levels_dense && lr.certificate.verdict == Verdict::Dense;
    report.levels.push_back(std::move(lr));
  }
  const bool target_dense = report.target.verdict == Verdict::Dense;
  report.conclusion_ok = (target_dense == report.all_levels_dense);
  return report;
}

Prop2SweepReport prop2_random_sweep(const Prop2SweepConfig& config) {
  if (config.n_trials <= 0) fail(ErrorKind::DimensionMismatch, "trial count must be positive");
  Prop2SweepReport report;
  report.config = config;
  const long max_attempts =
      static_cast<long>(config.n_trials) * std::max(config.max_attempts_factor, 1);
  while (report.valid < config.n_trials && report.attempts < max_attempts) {
    const int attempt = report.attempts++;
    SubRng rng(config.seed, rng_stream::kProp2Trials, static_cast<std::uint64_t>(attempt));
    const int nx = rng.next_int(1, config.max_observations);
    // biasing half the candidates toward parameter-rich families keeps the
    // premise-valid rate high (dense targets contain every coarser span)
    const int nt = rng.next_bernoulli(0.5) ? rng.next_int(nx, nx + config.max_parameters)
                                           : rng.next_int(1, config.max_parameters);
    const DiscreteExperiment exp = build_experiment(random_stochastic_matrix(rng, nt, nx));
    const DominatingMeasure p0 = random_privileged_measure(rng, exp);
    const Partition target = random_partition(rng, nx);

    const int chain_len = rng.next_int(1, config.max_chain_length);
    std::vector<Partition> chain{target};
    while (static_cast<int>(chain.size()) < chain_len && chain.back().n_blocks() > 1)
      chain.push_back(merge_random_blocks(rng, chain.back()));
    std::reverse(chain.begin(), chain.end());

    const Prop2Report verdicts = prop2_verify(exp, p0, target, Filtration(chain), config.tol);
    if (verdicts.premises_ok) {
      ++report.valid;
      if (!verdicts.conclusion_ok) {
        Prop2Violation bad;
        bad.attempt = attempt;
        bad.probs = exp.probs();
        bad.target_blocks = target.blocks();
        for (const auto& level : chain) bad.chain_blocks.push_back(level.blocks());
        bad.target_dense = verdicts.target.verdict == Verdict::Dense;
        for (const auto& lr : verdicts.levels)
          bad.level_dense.push_back(lr.certificate.verdict == Verdict::Dense);
        report.violations.push_back(std::move(bad));
      }
    } else {
      ++report.not_applicable;
      if (verdicts.target.verdict == Verdict::Dense && !verdicts.all_levels_dense)
        report.only_if_findings.push_back(attempt);
    }
  }
  return report;
}

}  // namespace bclab
