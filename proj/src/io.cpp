#include "bclab/io.hpp"

#include <fstream>
#include <sstream>

namespace bclab {

const char* version() { return "0.1.0"; }

namespace {

using nlohmann::json;

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int t = 0; t < m.rows(); ++t) {
    json row = json::array();
    for (int x = 0; x < m.cols(); ++x) row.push_back(m(t, x));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ExperimentFile experiment_from_json(const json& j) {
  try {
    const auto obs = j.at("observations").get<std::vector<std::string>>();
    const auto par = j.at("parameters").get<std::vector<std::string>>();
    const auto rows = j.at("probs").get<std::vector<std::vector<double>>>();
    if (rows.empty()) fail(ErrorKind::EmptyExperiment, "probs is empty");
    Eigen::MatrixXd probs(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].size() != rows.front().size())
        fail(ErrorKind::ParseError, "probs rows have unequal lengths");
      for (std::size_t x = 0; x < rows[t].size(); ++x)
        probs(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(x)) = rows[t][x];
    }
    ExperimentFile file{build_experiment(probs, obs, par), std::nullopt};
    if (j.contains("p0")) {
      const auto w = j.at("p0").get<std::vector<double>>();
      file.p0 = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    }
    return file;
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("experiment json: ") + e.what());
  }
}

json experiment_to_json(const DiscreteExperiment& exp, const std::optional<Eigen::VectorXd>& p0) {
  json j;
  j["observations"] = exp.observation_labels();
  j["parameters"] = exp.parameter_labels();
  j["probs"] = matrix_to_json(exp.probs());
  if (p0) j["p0"] = to_std(*p0);
  return j;
}

Partition partition_from_json(const json& j, std::optional<int> ground_size) {
  try {
    auto blocks = j.get<std::vector<std::vector<int>>>();
    int n = 0;
    if (ground_size) {
      n = *ground_size;
    } else {
      for (const auto& block : blocks) n += static_cast<int>(block.size());
    }
    return Partition(n, std::move(blocks));
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("partition json: ") + e.what());
  }
}

json partition_to_json(const Partition& part) { return json(part.blocks()); }

Filtration filtration_from_json(const json& j, std::optional<int> ground_size) {
  try {
    if (!j.is_array() || j.empty())
      fail(ErrorKind::ParseError, "filtration json must be a nonempty array of partitions");
    std::vector<Partition> levels;
    for (const auto& item : j) levels.push_back(partition_from_json(item, ground_size));
    return Filtration(std::move(levels));
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("filtration json: ") + e.what());
  }
}

json filtration_to_json(const Filtration& filt) {
  json j = json::array();
  for (const auto& level : filt.levels()) j.push_back(partition_to_json(level));
  return j;
}

json certificate_to_json(const CompletenessCertificate& cert) {
  json j;
  j["verdict"] = to_string(cert.verdict);
  json rank;
  rank["span_dim"] = cert.rank.span_dim;
  rank["positive_blocks"] = cert.rank.positive_blocks;
  rank["sv_max"] = cert.rank.sv_max;
  rank["sv_threshold"] = cert.rank.sv_threshold;
  rank["sv_gap"] = cert.rank.sv_gap ? json(*cert.rank.sv_gap) : json(nullptr);
  rank["singular_values"] = cert.rank.singular_values;
  j["rank"] = std::move(rank);
  if (cert.witness) {
    json w;
    w["values"] = to_std(cert.witness->values);
    w["max_abs_expectation"] = cert.witness->max_abs_expectation;
    w["smallest_sv"] = cert.witness->smallest_sv;
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json prop1_report_to_json(const Prop1SweepReport& report) {
  json j;
  j["n_trials"] = report.config.n_trials;
  j["seed"] = report.config.seed;
  j["max_observations"] = report.config.max_observations;
  j["max_parameters"] = report.config.max_parameters;
  j["svd_tol"] = report.config.svd_tol;
  j["n_dense"] = report.n_dense;
  j["n_witness"] = report.n_witness;
  j["worst_witness_expectation"] = report.worst_witness_expectation;
  j["witness_violations"] = report.witness_violations;
  json disagreements = json::array();
  for (const auto& d : report.disagreements) {
    json item;
    item["trial"] = d.trial;
    item["probs"] = matrix_to_json(d.probs);
    item["blocks"] = d.blocks;
    item["weights"] = to_std(d.weights);
    item["dense"] = d.dense;
    item["witness_found"] = d.witness_found;
    item["rank"] = d.rank;
    item["positive_blocks"] = d.positive_blocks;
    disagreements.push_back(std::move(item));
  }
  j["disagreements"] = std::move(disagreements);
  return j;
}

json prop2_report_to_json(const Prop2Report& report) {
  json j;
  j["target"] = certificate_to_json(report.target);
  json levels = json::array();
  for (const auto& lr : report.levels) {
    json item;
    item["premise_ok"] = lr.premise_ok;
    item["premise_residual"] = lr.premise_residual;
    item["certificate"] = certificate_to_json(lr.certificate);
    levels.push_back(std::move(item));
  }
  j["levels"] = std::move(levels);
  j["premises_ok"] = report.premises_ok;
  j["all_levels_dense"] = report.all_levels_dense;
  j["conclusion_ok"] = report.conclusion_ok;
  j["applicable"] = report.applicable();
  return j;
}

json prop2_sweep_to_json(const Prop2SweepReport& report) {
  json j;
  j["n_trials"] = report.config.n_trials;
  j["seed"] = report.config.seed;
  j["max_observations"] = report.config.max_observations;
  j["max_parameters"] = report.config.max_parameters;
  j["max_chain_length"] = report.config.max_chain_length;
  j["svd_tol"] = report.config.tol.svd_tol;
  j["span_tol"] = report.config.tol.span_tol;
  j["attempts"] = report.attempts;
  j["valid"] = report.valid;
  j["not_applicable"] = report.not_applicable;
  j["only_if_findings"] = report.only_if_findings;
  json violations = json::array();
  for (const auto& v : report.violations) {
    json item;
    item["attempt"] = v.attempt;
    item["probs"] = matrix_to_json(v.probs);
    item["target_blocks"] = v.target_blocks;
    item["chain_blocks"] = v.chain_blocks;
    item["target_dense"] = v.target_dense;
    item["level_dense"] = v.level_dense;
    violations.push_back(std::move(item));
  }
  j["violations"] = std::move(violations);
  return j;
}

json identity_report_to_json(const IdentityReport& report) {
  json j;
  j["fine_level"] = report.fine_level;
  j["coarse_level"] = report.coarse_level;
  j["drift_level"] = report.drift_level;
  j["drift_values"] = to_std(report.drift_values);
  j["n_paths"] = report.n_paths;
  j["seed"] = report.seed;
  j["algebraic_max_rel_gap"] = report.algebraic_max_rel_gap;
  j["algebraic_ok"] = report.algebraic_ok;
  j["unnormalized_max_rel_gap"] = report.unnormalized_max_rel_gap;
  json tower = json::array();
  for (const auto& check : report.tower) {
    json item;
    item["label"] = check.label;
    item["mean_diff"] = check.mean_diff;
    item["se"] = check.se;
    item["ok"] = check.ok;
    tower.push_back(std::move(item));
  }
  j["tower"] = std::move(tower);
  j["tower_ok"] = report.tower_ok;
  return j;
}

json martingale_report_to_json(const MartingaleReport& report) {
  json j;
  j["functional"] = report.functional;
  j["levels"] = report.levels;
  j["n_paths"] = report.n_paths;
  j["seed"] = report.seed;
  j["simulation_level"] = report.simulation_level;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json item;
    item["level"] = row.level;
    item["estimate"] = row.estimate;
    item["se"] = row.se;
    item["analytic"] = row.analytic ? json(*row.analytic) : json(nullptr);
    rows.push_back(std::move(item));
  }
  j["rows"] = std::move(rows);
  return j;
}

json gaussian_report_to_json(const GaussianShiftReport& report) {
  json j;
  j["dimension"] = report.config.dimension;
  j["mean_grid_sizes"] = report.config.mean_grid_sizes;
  j["bin_counts"] = report.config.bin_counts;
  j["mean_span"] = report.config.mean_span;
  j["edge_span"] = report.config.edge_span;
  j["svd_tol"] = report.config.svd_tol;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json item;
    item["bin_count"] = row.bin_count;
    item["mean_grid_size"] = row.mean_grid_size;
    item["total_bins"] = row.total_bins;
    item["rank"] = row.rank;
    item["saturated"] = row.saturated;
    rows.push_back(std::move(item));
  }
  j["rows"] = std::move(rows);
  return j;
}

namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string martingale_report_to_csv(const MartingaleReport& report) {
  std::ostringstream out;
  out << "level,estimate,se,analytic\n";
  for (const auto& row : report.rows) {
    out << row.level << ',' << format_double(row.estimate) << ',' << format_double(row.se) << ',';
    if (row.analytic) out << format_double(*row.analytic);
    out << '\n';
  }
  return out.str();
}

std::string gaussian_report_to_csv(const GaussianShiftReport& report) {
  std::ostringstream out;
  out << "bin_count,mean_grid_size,total_bins,rank,saturated\n";
  for (const auto& row : report.rows) {
    out << row.bin_count << ',' << row.mean_grid_size << ',' << row.total_bins << ',' << row.rank
        << ',' << (row.saturated ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string prop2_sweep_to_csv(const Prop2SweepReport& report) {
  std::ostringstream out;
  out << "attempts,valid,not_applicable,violations,only_if_findings\n";
  out << report.attempts << ',' << report.valid << ',' << report.not_applicable << ','
      << report.violations.size() << ',' << report.only_if_findings.size() << '\n';
  return out.str();
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ParseError, "cannot write " + path.string());
  out << text;
}

}  // namespace bclab
