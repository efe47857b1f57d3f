#ifndef BCLAB_IO_HPP
#define BCLAB_IO_HPP

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "bclab/brownian.hpp"
#include "bclab/completeness.hpp"
#include "bclab/conditioning.hpp"
#include "bclab/experiment.hpp"
#include "bclab/filtration_harness.hpp"

namespace bclab {

const char* version();

// --- file schemas -------------------------------------------------------
//
// Experiment: {"observations": [...], "parameters": [...],
//              "probs": [[...], ...], "p0": [...]?}
// Partition:  [[0,1],[2]]            (integer-index blocks)
// Filtration: [partition, partition, ...]

struct ExperimentFile {
  DiscreteExperiment experiment;
  std::optional<Eigen::VectorXd> p0;
};

ExperimentFile experiment_from_json(const nlohmann::json& j);
nlohmann::json experiment_to_json(const DiscreteExperiment& exp,
                                  const std::optional<Eigen::VectorXd>& p0 = std::nullopt);

Partition partition_from_json(const nlohmann::json& j, std::optional<int> ground_size = std::nullopt);
nlohmann::json partition_to_json(const Partition& part);

Filtration filtration_from_json(const nlohmann::json& j, std::optional<int> ground_size = std::nullopt);
nlohmann::json filtration_to_json(const Filtration& filt);

nlohmann::json certificate_to_json(const CompletenessCertificate& cert);
nlohmann::json prop1_report_to_json(const Prop1SweepReport& report);
nlohmann::json prop2_report_to_json(const Prop2Report& report);
nlohmann::json prop2_sweep_to_json(const Prop2SweepReport& report);
nlohmann::json identity_report_to_json(const IdentityReport& report);
nlohmann::json martingale_report_to_json(const MartingaleReport& report);
nlohmann::json gaussian_report_to_json(const GaussianShiftReport& report);

std::string martingale_report_to_csv(const MartingaleReport& report);
std::string gaussian_report_to_csv(const GaussianShiftReport& report);
std::string prop2_sweep_to_csv(const Prop2SweepReport& report);

/// Parses a file, converting json exceptions into ParseError.
nlohmann::json load_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bclab

#endif
