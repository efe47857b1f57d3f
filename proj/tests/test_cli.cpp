// End-to-end checks of the installed binary: exit codes, report files,
// and byte-level determinism with the timestamp masked.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const std::string cmd =
      std::string(BCLAB_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  result.stdout_text = buf.str();
  return result;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string mask_timestamp(const std::string& text) {
  static const std::regex ts("\"generated_at\": \"[^\"]*\"");
  return std::regex_replace(text, ts, "\"generated_at\": \"-\"");
}

fs::path docs() { return fs::path(BCLAB_DOCS_DIR); }

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bclab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("certify on the Bernoulli input exits 0 with a dense verdict") {
  const auto dir = fresh_dir("certify");
  const auto result = run_cli("certify --experiment " +
                                  (docs() / "bernoulli_experiment.json").string() +
                                  " --partition " + (docs() / "partition_singletons2.json").string() +
                                  " --out " + (dir / "out").string(),
                              dir);
  CHECK(result.exit_code == 0);
  CHECK(result.stdout_text.find("dense") != std::string::npos);
  const std::string report = read_file(dir / "out" / "certify.json");
  CHECK(report.find("\"verdict\": \"dense\"") != std::string::npos);
  CHECK(report.find("\"generated_at\"") != std::string::npos);
}

TEST_CASE("certify on the trinomial input reports the witness") {
  const auto dir = fresh_dir("certify_witness");
  const auto result = run_cli("certify --experiment " +
                                  (docs() / "trinomial_experiment.json").string() +
                                  " --partition " + (docs() / "partition_singletons3.json").string() +
                                  " --out " + (dir / "out").string(),
                              dir);
  CHECK(result.exit_code == 0);
  const std::string report = read_file(dir / "out" / "certify.json");
  CHECK(report.find("\"verdict\": \"witness\"") != std::string::npos);
  CHECK(report.find("max_abs_expectation") != std::string::npos);
}

TEST_CASE("malformed input exits 2") {
  const auto dir = fresh_dir("malformed");
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\"observations\": [\"a\"], \"parameters\": [\"t\"], \"probs\": [[0.5, 0.6]]}";
  const auto result = run_cli("certify --experiment " + bad.string() + " --partition " +
                                  (docs() / "partition_singletons2.json").string() + " --out " +
                                  (dir / "out").string(),
                              dir);
  CHECK(result.exit_code == 2);
}

TEST_CASE("missing seed on a stochastic command exits 2") {
  const auto dir = fresh_dir("noseed");
  const auto result = run_cli("prop1-sweep --trials 10 --out " + (dir / "out").string(), dir);
  CHECK(result.exit_code == 2);
}

TEST_CASE("unparseable flag values and missing subcommands exit 2") {
  const auto dir = fresh_dir("badflag");
  CHECK(run_cli("certify --svd-tol not_a_number", dir).exit_code == 2);
  CHECK(run_cli("", dir).exit_code == 2);
  CHECK(run_cli("--help", dir).exit_code == 0);
}

TEST_CASE("tolerances outside (0, 1e-2) exit 2") {
  const auto dir = fresh_dir("badtol");
  const auto result =
      run_cli("certify --experiment " + (docs() / "bernoulli_experiment.json").string() +
                  " --partition " + (docs() / "partition_singletons2.json").string() +
                  " --svd-tol 0.5 --out " + (dir / "out").string(),
              dir);
  CHECK(result.exit_code == 2);
}

TEST_CASE("prop1 sweep exits 0 and reruns byte-identically") {
  const auto dir = fresh_dir("sweep");
  const std::string args =
      "prop1-sweep --trials 120 --seed 42 --out " + (dir / "out").string();
  const auto first = run_cli(args, dir);
  CHECK(first.exit_code == 0);
  const std::string a = mask_timestamp(read_file(dir / "out" / "prop1-sweep.json"));
  const auto second = run_cli(args, dir);
  CHECK(second.exit_code == 0);
  const std::string b = mask_timestamp(read_file(dir / "out" / "prop1-sweep.json"));
  CHECK(a == b);
  CHECK(a.find("\"disagreements\": []") != std::string::npos);
}

TEST_CASE("prop2 verify against the dyadic chain") {
  const auto dir = fresh_dir("p2v");
  const auto result = run_cli(
      "prop2-verify --experiment " + (docs() / "trinomial_experiment.json").string() +
          " --target " + (docs() / "partition_singletons3.json").string() + " --filtration " +
          (docs() / "filtration_dyadic3.json").string() + " --out " + (dir / "out").string(),
      dir);
  CHECK(result.exit_code == 0);
  const std::string report = read_file(dir / "out" / "prop2-verify.json");
  CHECK(report.find("\"conclusion_ok\"") != std::string::npos);
}

TEST_CASE("worker count env does not change report bytes") {
  const auto dir = fresh_dir("threads");
  const std::string base = "brownian-martingale --config " +
                           (docs() / "martingale_config.json").string() + " --paths 20000 --out " +
                           (dir / "out").string() + " > /dev/null 2>&1";
  const std::string cmd1 = "BCLAB_THREADS=1 " + std::string(BCLAB_CLI_PATH) + " " + base;
  const std::string cmd4 = "BCLAB_THREADS=4 " + std::string(BCLAB_CLI_PATH) + " " + base;
  REQUIRE(std::system(cmd1.c_str()) == 0);
  const std::string a = mask_timestamp(read_file(dir / "out" / "brownian-martingale.json"));
  const std::string csv_a = read_file(dir / "out" / "brownian-martingale.csv");
  REQUIRE(std::system(cmd4.c_str()) == 0);
  const std::string b = mask_timestamp(read_file(dir / "out" / "brownian-martingale.json"));
  const std::string csv_b = read_file(dir / "out" / "brownian-martingale.csv");
  CHECK(a == b);
  CHECK(csv_a == csv_b);
  // the --paths flag must win over the config file's 100000
  CHECK(a.find("\"n_paths\": 20000") != std::string::npos);
}

TEST_CASE("gaussian sweep writes the rank table") {
  const auto dir = fresh_dir("gauss");
  const auto result =
      run_cli("gaussian-sweep --config " + (docs() / "gaussian_config.json").string() + " --out " +
                  (dir / "out").string(),
              dir);
  CHECK(result.exit_code == 0);
  const std::string csv = read_file(dir / "out" / "gaussian-sweep.csv");
  CHECK(csv.find("bin_count,mean_grid_size") == 0);
}

TEST_CASE("a report with violation records exits 1") {
  // sweeping the mean grids in shrinking order forces a recorded rank
  // decrease, which must surface in the exit status
  const auto dir = fresh_dir("exit1");
  const fs::path config = dir / "config.json";
  std::ofstream(config) << "{\"bins\": [8], \"grids\": [9, 3]}";
  const auto result = run_cli("gaussian-sweep --config " + config.string() + " --out " +
                                  (dir / "out").string(),
                              dir);
  CHECK(result.exit_code == 1);
  const std::string report = read_file(dir / "out" / "gaussian-sweep.json");
  CHECK(report.find("rank_decrease") != std::string::npos);
}

TEST_CASE("prop2 sweep and brownian identity commands run end to end") {
  const auto dir = fresh_dir("misc");
  const auto sweep =
      run_cli("prop2-sweep --trials 40 --seed 7 --out " + (dir / "p2").string(), dir);
  CHECK(sweep.exit_code == 0);
  CHECK(read_file(dir / "p2" / "prop2-sweep.json").find("\"valid\": 40") != std::string::npos);

  const auto identity = run_cli("brownian-identity --config " +
                                    (docs() / "identity_config.json").string() + " --paths 20000 --out " +
                                    (dir / "id").string(),
                                dir);
  CHECK(identity.exit_code == 0);
  CHECK(read_file(dir / "id" / "brownian-identity.json").find("\"algebraic_ok\": true") !=
        std::string::npos);
}
