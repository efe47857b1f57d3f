// Batch front door: ingest JSON configs, run the checks / sweeps /
// studies, emit deterministic reports (JSON + CSV). Exit status: 0 clean,
// 1 when a report contains at least one violation record, 2 on input
// errors.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bclab/brownian.hpp"
#include "bclab/completeness.hpp"
#include "bclab/filtration_harness.hpp"
#include "bclab/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string command;
  std::optional<std::string> experiment_path;
  std::optional<std::string> partition_path;
  std::optional<std::string> target_path;
  std::optional<std::string> filtration_path;
  std::optional<std::uint64_t> seed;
  std::int64_t trials = 0;
  std::int64_t paths = 0;
  double svd_tol = bclab::kDefaultSvdTol;
  double span_tol = bclab::kDefaultSpanTol;
  std::string out_dir = ".";
  json extra;  // command-specific settings from the config file
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void check_tolerance(double tol, const char* name) {
  if (!(tol > 0.0) || tol >= 1e-2)
    bclab::fail(bclab::ErrorKind::ToleranceOutOfRange,
                std::string(name) + " must lie in (0, 1e-2)");
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed)
    bclab::fail(bclab::ErrorKind::ParseError,
                "a seed is required for stochastic commands (--seed or config \"seed\")");
  return *cfg.seed;
}

json config_echo(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  if (cfg.experiment_path) j["experiment"] = *cfg.experiment_path;
  if (cfg.partition_path) j["partition"] = *cfg.partition_path;
  if (cfg.target_path) j["target"] = *cfg.target_path;
  if (cfg.filtration_path) j["filtration"] = *cfg.filtration_path;
  if (cfg.seed) j["seed"] = *cfg.seed;
  if (cfg.trials > 0) j["trials"] = cfg.trials;
  if (cfg.paths > 0) j["paths"] = cfg.paths;
  j["svd_tol"] = cfg.svd_tol;
  j["span_tol"] = cfg.span_tol;
  j["out"] = cfg.out_dir;
  if (!cfg.extra.empty()) j["settings"] = cfg.extra;
  return j;
}

int emit_report(const RunConfig& cfg, const json& result, const json& violations,
                const std::optional<std::string>& csv = std::nullopt) {
  json report;
  report["tool"] = "bclab";
  report["version"] = bclab::version();
  report["command"] = cfg.command;
  report["config"] = config_echo(cfg);
  report["generated_at"] = utc_timestamp();
  report["violations"] = violations;
  report["result"] = result;

  fs::create_directories(cfg.out_dir);
  const fs::path json_path = fs::path(cfg.out_dir) / (cfg.command + ".json");
  bclab::write_text(json_path, report.dump(2) + "\n");
  if (csv) {
    const fs::path csv_path = fs::path(cfg.out_dir) / (cfg.command + ".csv");
    bclab::write_text(csv_path, *csv);
  }
  std::cout << cfg.command << ": " << violations.size() << " violation(s), report at "
            << json_path.string() << "\n";
  return violations.empty() ? 0 : 1;
}

bclab::ExperimentFile load_experiment_file(const RunConfig& cfg) {
  if (!cfg.experiment_path)
    bclab::fail(bclab::ErrorKind::ParseError, "--experiment is required");
  return bclab::experiment_from_json(bclab::load_json(*cfg.experiment_path));
}

bclab::DominatingMeasure measure_for(const bclab::ExperimentFile& file) {
  return bclab::privileged_measure(file.experiment, file.p0);
}

bclab::StepDrift drift_from_json(const json& j) {
  try {
    const int level = j.at("level").get<int>();
    const auto values = j.at("values").get<std::vector<double>>();
    Eigen::VectorXd v =
        Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return bclab::StepDrift(level, std::move(v));
  } catch (const json::exception& e) {
    bclab::fail(bclab::ErrorKind::ParseError, std::string("drift json: ") + e.what());
  }
}

int run_certify(const RunConfig& cfg) {
  const auto file = load_experiment_file(cfg);
  if (!cfg.partition_path) bclab::fail(bclab::ErrorKind::ParseError, "--partition is required");
  const auto part = bclab::partition_from_json(bclab::load_json(*cfg.partition_path),
                                               file.experiment.n_observations());
  json violations = json::array();
  json result;
  try {
    const auto cert = bclab::certify(file.experiment, measure_for(file), part, cfg.svd_tol);
    result = bclab::certificate_to_json(cert);
    std::cout << "verdict: " << bclab::to_string(cert.verdict) << " (rank " << cert.rank.span_dim
              << " of " << cert.rank.positive_blocks << ")\n";
  } catch (const bclab::Error& e) {
    if (e.kind() != bclab::ErrorKind::InternalInconsistency) throw;
    json v;
    v["type"] = "internal_inconsistency";
    v["detail"] = e.what();
    violations.push_back(std::move(v));
    result = nullptr;
  }
  return emit_report(cfg, result, violations);
}

int run_prop1_sweep(const RunConfig& cfg) {
  bclab::Prop1SweepConfig sweep;
  sweep.n_trials = static_cast<int>(cfg.trials > 0 ? cfg.trials : 1000);
  sweep.seed = require_seed(cfg);
  sweep.svd_tol = cfg.svd_tol;
  if (cfg.extra.contains("max_observations"))
    sweep.max_observations = cfg.extra["max_observations"].get<int>();
  if (cfg.extra.contains("max_parameters"))
    sweep.max_parameters = cfg.extra["max_parameters"].get<int>();
  const auto report = bclab::prop1_equivalence_sweep(sweep);
  json violations = json::array();
  for (const auto& d : report.disagreements) {
    json v;
    v["type"] = "duality_disagreement";
    v["trial"] = d.trial;
    violations.push_back(std::move(v));
  }
  for (int trial : report.witness_violations) {
    json v;
    v["type"] = "witness_contract";
    v["trial"] = trial;
    violations.push_back(std::move(v));
  }
  std::cout << report.disagreements.size() << " disagreement(s) in " << sweep.n_trials
            << " trials (" << report.n_dense << " dense, " << report.n_witness << " witness)\n";
  return emit_report(cfg, bclab::prop1_report_to_json(report), violations);
}

int run_prop2_verify(const RunConfig& cfg) {
  const auto file = load_experiment_file(cfg);
  if (!cfg.target_path) bclab::fail(bclab::ErrorKind::ParseError, "--target is required");
  if (!cfg.filtration_path) bclab::fail(bclab::ErrorKind::ParseError, "--filtration is required");
  const int n = file.experiment.n_observations();
  const auto target = bclab::partition_from_json(bclab::load_json(*cfg.target_path), n);
  const auto filt = bclab::filtration_from_json(bclab::load_json(*cfg.filtration_path), n);
  const auto report = bclab::prop2_verify(file.experiment, measure_for(file), target, filt,
                                          {cfg.svd_tol, cfg.span_tol});
  json violations = json::array();
  if (report.applicable() && !report.conclusion_ok) {
    json v;
    v["type"] = "equivalence_failure";
    violations.push_back(std::move(v));
  }
  if (report.applicable()) {
    std::cout << "conclusion_ok: " << (report.conclusion_ok ? "true" : "false") << "\n";
  } else {
    std::cout << "conclusion_ok: " << (report.conclusion_ok ? "true" : "false")
              << " (not applicable: a span premise failed)\n";
  }
  return emit_report(cfg, bclab::prop2_report_to_json(report), violations);
}

int run_prop2_sweep(const RunConfig& cfg) {
  bclab::Prop2SweepConfig sweep;
  sweep.n_trials = static_cast<int>(cfg.trials > 0 ? cfg.trials : 500);
  sweep.seed = require_seed(cfg);
  sweep.tol = {cfg.svd_tol, cfg.span_tol};
  if (cfg.extra.contains("max_observations"))
    sweep.max_observations = cfg.extra["max_observations"].get<int>();
  if (cfg.extra.contains("max_parameters"))
    sweep.max_parameters = cfg.extra["max_parameters"].get<int>();
  if (cfg.extra.contains("max_chain_length"))
    sweep.max_chain_length = cfg.extra["max_chain_length"].get<int>();
  const auto report = bclab::prop2_random_sweep(sweep);
  json violations = json::array();
  for (const auto& v : report.violations) {
    json item;
    item["type"] = "equivalence_failure";
    item["attempt"] = v.attempt;
    violations.push_back(std::move(item));
  }
  std::cout << report.violations.size() << " violation(s) in " << report.valid
            << " premise-valid trials (" << report.attempts << " candidates)\n";
  return emit_report(cfg, bclab::prop2_sweep_to_json(report), violations,
                     bclab::prop2_sweep_to_csv(report));
}

int run_brownian_identity(const RunConfig& cfg) {
  if (!cfg.extra.contains("drift"))
    bclab::fail(bclab::ErrorKind::ParseError, "config needs a \"drift\" object {level, values}");
  const auto drift = drift_from_json(cfg.extra["drift"]);
  if (!cfg.extra.contains("fine_level") || !cfg.extra.contains("coarse_level"))
    bclab::fail(bclab::ErrorKind::ParseError, "config needs fine_level and coarse_level");
  const int fine = cfg.extra["fine_level"].get<int>();
  const int coarse = cfg.extra["coarse_level"].get<int>();
  const std::int64_t paths = cfg.paths > 0 ? cfg.paths : 100000;
  const auto report =
      bclab::conditional_lr_identity_check(drift, fine, coarse, paths, require_seed(cfg));
  json violations = json::array();
  if (!report.algebraic_ok) {
    json v;
    v["type"] = "algebraic_identity";
    v["max_rel_gap"] = report.algebraic_max_rel_gap;
    violations.push_back(std::move(v));
  }
  for (const auto& check : report.tower) {
    if (!check.ok) {
      json v;
      v["type"] = "tower_test";
      v["label"] = check.label;
      v["mean_diff"] = check.mean_diff;
      v["se"] = check.se;
      violations.push_back(std::move(v));
    }
  }
  std::cout << "algebraic gap " << report.algebraic_max_rel_gap << ", tower "
            << (report.tower_ok ? "ok" : "FAILED") << "\n";
  return emit_report(cfg, bclab::identity_report_to_json(report), violations);
}

int run_brownian_martingale(const RunConfig& cfg) {
  const std::string functional =
      cfg.extra.contains("functional") ? cfg.extra["functional"].get<std::string>() : "int_x";
  std::vector<int> levels = {2, 3, 4, 5, 6};
  if (cfg.extra.contains("levels")) levels = cfg.extra["levels"].get<std::vector<int>>();
  const std::int64_t paths = cfg.paths > 0 ? cfg.paths : 100000;
  const auto report =
      bclab::martingale_convergence_study(functional, levels, paths, require_seed(cfg));
  json violations = json::array();
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    const auto& a = report.rows[i];
    const auto& b = report.rows[i + 1];
    const double slack = 2.0 * std::sqrt(a.se * a.se + b.se * b.se);
    if (b.estimate > a.estimate + slack) {
      json v;
      v["type"] = "nonmonotone_l1_error";
      v["levels"] = {a.level, b.level};
      violations.push_back(std::move(v));
    }
  }
  std::cout << "levels " << levels.front() << ".." << levels.back()
            << ": L1 errors estimated over " << paths << " paths\n";
  return emit_report(cfg, bclab::martingale_report_to_json(report), violations,
                     bclab::martingale_report_to_csv(report));
}

int run_gaussian_sweep(const RunConfig& cfg) {
  bclab::GaussianShiftConfig sweep;
  sweep.svd_tol = cfg.svd_tol;
  if (cfg.extra.contains("dimension")) sweep.dimension = cfg.extra["dimension"].get<int>();
  if (cfg.extra.contains("bins")) sweep.bin_counts = cfg.extra["bins"].get<std::vector<int>>();
  if (cfg.extra.contains("grids"))
    sweep.mean_grid_sizes = cfg.extra["grids"].get<std::vector<int>>();
  if (cfg.extra.contains("mean_span")) sweep.mean_span = cfg.extra["mean_span"].get<double>();
  if (cfg.extra.contains("edge_span")) sweep.edge_span = cfg.extra["edge_span"].get<double>();
  const auto report = bclab::gaussian_shift_rank_sweep(sweep);
  json violations = json::array();
  for (int bins : sweep.bin_counts) {
    int prev_rank = -1;
    for (const auto& row : report.rows) {
      if (row.bin_count != bins) continue;
      if (prev_rank >= 0 && row.rank < prev_rank) {
        json v;
        v["type"] = "rank_decrease";
        v["bin_count"] = bins;
        v["mean_grid_size"] = row.mean_grid_size;
        violations.push_back(std::move(v));
      }
      prev_rank = row.rank;
    }
  }
  std::cout << report.rows.size() << " (bins, grid) cells swept\n";
  return emit_report(cfg, bclab::gaussian_report_to_json(report), violations,
                     bclab::gaussian_report_to_csv(report));
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  const json j = bclab::load_json(path);
  if (!j.is_object()) bclab::fail(bclab::ErrorKind::ParseError, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "seed") cfg.seed = it.value().get<std::uint64_t>();
    else if (key == "trials") cfg.trials = it.value().get<std::int64_t>();
    else if (key == "paths") cfg.paths = it.value().get<std::int64_t>();
    else if (key == "svd_tol") cfg.svd_tol = it.value().get<double>();
    else if (key == "span_tol") cfg.span_tol = it.value().get<double>();
    else if (key == "out") cfg.out_dir = it.value().get<std::string>();
    else if (key == "experiment") cfg.experiment_path = it.value().get<std::string>();
    else if (key == "partition") cfg.partition_path = it.value().get<std::string>();
    else if (key == "target") cfg.target_path = it.value().get<std::string>();
    else if (key == "filtration") cfg.filtration_path = it.value().get<std::string>();
    else cfg.extra[key] = it.value();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bclab: numerical certificates for completeness of finite experiments and "
               "dyadic Gaussian increment studies"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::string experiment_path, partition_path, target_path, filtration_path;
  std::uint64_t seed = 0;
  std::int64_t trials = 0, paths = 0;
  double svd_tol = 0.0, span_tol = 0.0;
  std::string out_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override its fields");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--trials", trials, "number of trials");
    sub->add_option("--paths", paths, "number of Monte Carlo paths");
    sub->add_option("--svd-tol", svd_tol, "relative singular value threshold");
    sub->add_option("--span-tol", span_tol, "relative span containment residual");
    sub->add_option("--out", out_dir, "output directory for reports");
  };

  auto* certify = app.add_subcommand("certify", "certificate for one experiment + partition");
  certify->add_option("--experiment", experiment_path, "experiment JSON");
  certify->add_option("--partition", partition_path, "partition JSON");
  add_common(certify);

  auto* p1 = app.add_subcommand("prop1-sweep", "randomized denseness/witness duality sweep");
  add_common(p1);

  auto* p2v = app.add_subcommand("prop2-verify", "filtration equivalence for one input");
  p2v->add_option("--experiment", experiment_path, "experiment JSON");
  p2v->add_option("--target", target_path, "target partition JSON");
  p2v->add_option("--filtration", filtration_path, "filtration JSON");
  add_common(p2v);

  auto* p2s = app.add_subcommand("prop2-sweep", "randomized filtration equivalence sweep");
  add_common(p2s);

  auto* bid = app.add_subcommand("brownian-identity", "conditional likelihood-ratio identity");
  add_common(bid);

  auto* bmart = app.add_subcommand("brownian-martingale", "L1 convergence study along the grid");
  add_common(bmart);

  auto* gauss = app.add_subcommand("gaussian-sweep", "Gaussian shift rank saturation sweep");
  add_common(gauss);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help / the flag error
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    // flags win over the config file
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--trials")) cfg.trials = trials;
    if (sub->count("--paths")) cfg.paths = paths;
    if (sub->count("--svd-tol")) cfg.svd_tol = svd_tol;
    if (sub->count("--span-tol")) cfg.span_tol = span_tol;
    if (sub->count("--out")) cfg.out_dir = out_dir;
    if (!experiment_path.empty()) cfg.experiment_path = experiment_path;
    if (!partition_path.empty()) cfg.partition_path = partition_path;
    if (!target_path.empty()) cfg.target_path = target_path;
    if (!filtration_path.empty()) cfg.filtration_path = filtration_path;
    check_tolerance(cfg.svd_tol, "svd_tol");
    check_tolerance(cfg.span_tol, "span_tol");

    if (certify->parsed()) { cfg.command = "certify"; return run_certify(cfg); }
    if (p1->parsed()) { cfg.command = "prop1-sweep"; return run_prop1_sweep(cfg); }
    if (p2v->parsed()) { cfg.command = "prop2-verify"; return run_prop2_verify(cfg); }
    if (p2s->parsed()) { cfg.command = "prop2-sweep"; return run_prop2_sweep(cfg); }
    if (bid->parsed()) { cfg.command = "brownian-identity"; return run_brownian_identity(cfg); }
    if (bmart->parsed()) { cfg.command = "brownian-martingale"; return run_brownian_martingale(cfg); }
    if (gauss->parsed()) { cfg.command = "gaussian-sweep"; return run_gaussian_sweep(cfg); }
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const bclab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
}
