#include <doctest.h>

#include <Eigen/Dense>

#include "bclab/experiment.hpp"
#include "bclab/random_experiments.hpp"
#include "bclab/rng.hpp"

using namespace bclab;

namespace {

Eigen::MatrixXd bernoulli_pair() {
  Eigen::MatrixXd m(2, 2);
  m << 0.7, 0.3, 0.3, 0.7;
  return m;
}

}  // namespace

TEST_CASE("point mass experiment is valid") {
  Eigen::MatrixXd m(1, 1);
  m << 1.0;
  const auto exp = build_experiment(m);
  CHECK(exp.n_observations() == 1);
  CHECK(exp.n_parameters() == 1);
}

TEST_CASE("two-parameter Bernoulli family is valid") {
  const auto exp = build_experiment(bernoulli_pair());
  CHECK(exp.n_parameters() == 2);
  CHECK(exp.probs()(0, 0) == doctest::Approx(0.7));
}

TEST_CASE("row sum off by more than 1e-12 is rejected") {
  Eigen::MatrixXd m(1, 2);
  m << 0.5, 0.6;
  CHECK_THROWS_WITH_AS(build_experiment(m), doctest::Contains("sums to"), Error);
  try {
    build_experiment(m);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonStochasticRow);
  }
}

TEST_CASE("negative entries are rejected") {
  Eigen::MatrixXd m(1, 2);
  m << 1.2, -0.2;
  try {
    build_experiment(m);
    FAIL("expected NegativeEntry");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeEntry);
  }
}

TEST_CASE("empty experiments are rejected") {
  try {
    build_experiment(Eigen::MatrixXd(0, 0));
    FAIL("expected EmptyExperiment");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyExperiment);
  }
}

TEST_CASE("duplicate labels are rejected") {
  Eigen::MatrixXd m(1, 2);
  m << 0.5, 0.5;
  try {
    build_experiment(m, {"a", "a"}, {"t"});
    FAIL("expected DuplicateLabel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicateLabel);
  }
}

TEST_CASE("default measure is the uniform mixture of the rows") {
  const auto exp = build_experiment(bernoulli_pair());
  const auto p0 = privileged_measure(exp);
  CHECK(p0.weights()[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p0.weights()[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p0.support().size() == 2);
}

TEST_CASE("weights vanishing where the family has mass are rejected") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.0, 0.0, 1.0;
  const auto exp = build_experiment(m);
  Eigen::VectorXd w(2);
  w << 1.0, 0.0;
  try {
    privileged_measure(exp, w);
    FAIL("expected NotPrivileged");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPrivileged);
  }
}

TEST_CASE("explicit uniform mixture weights are accepted") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.0, 0.0, 1.0;
  const auto exp = build_experiment(m);
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  const auto p0 = privileged_measure(exp, w);
  CHECK(p0.support().size() == 2);
}

TEST_CASE("invalid weight vectors are rejected") {
  const auto exp = build_experiment(bernoulli_pair());
  Eigen::VectorXd bad_sum(2);
  bad_sum << 0.5, 0.6;
  Eigen::VectorXd negative(2);
  negative << 1.5, -0.5;
  for (const auto& w : {bad_sum, negative}) {
    try {
      privileged_measure(exp, w);
      FAIL("expected InvalidWeights");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidWeights);
    }
  }
}

TEST_CASE("Bernoulli likelihood ratios against the uniform mixture") {
  const auto exp = build_experiment(bernoulli_pair());
  const auto table = likelihood_ratio_table(exp, privileged_measure(exp));
  CHECK(table.ratios()(0, 0) == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(table.ratios()(0, 1) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(table.ratios()(1, 0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(table.ratios()(1, 1) == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(table.dropped_columns().empty());
}

TEST_CASE("a single row equal to the measure gives the all-ones ratio") {
  Eigen::MatrixXd m(1, 3);
  m << 0.2, 0.3, 0.5;
  const auto exp = build_experiment(m);
  const auto table = likelihood_ratio_table(exp, privileged_measure(exp));
  for (int j = 0; j < 3; ++j) CHECK(table.ratios()(0, j) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("point-mass rows give ratio rows (2,0) and (0,2)") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.0, 0.0, 1.0;
  const auto exp = build_experiment(m);
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  const auto table = likelihood_ratio_table(exp, privileged_measure(exp, w));
  CHECK(table.ratios()(0, 0) == doctest::Approx(2.0));
  CHECK(table.ratios()(0, 1) == doctest::Approx(0.0));
  CHECK(table.ratios()(1, 0) == doctest::Approx(0.0));
  CHECK(table.ratios()(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("zero-weight columns are dropped and recorded") {
  Eigen::MatrixXd m(2, 3);
  m << 0.5, 0.0, 0.5, 0.25, 0.0, 0.75;
  const auto exp = build_experiment(m);
  const auto p0 = privileged_measure(exp);
  const auto table = likelihood_ratio_table(exp, p0);
  CHECK(table.support() == std::vector<int>{0, 2});
  CHECK(table.dropped_columns() == std::vector<int>{1});
  // dropping never discards family mass
  for (int x : table.dropped_columns()) CHECK(exp.probs().col(x).maxCoeff() == 0.0);
}

TEST_CASE("property: weighted ratio row sums are 1 and the mixture dominates") {
  for (int trial = 0; trial < 200; ++trial) {
    SubRng rng(99, 7, static_cast<std::uint64_t>(trial));
    const int nx = rng.next_int(1, 12);
    const int nt = rng.next_int(1, 12);
    const auto exp = build_experiment(random_stochastic_matrix(rng, nt, nx));
    const auto p0 = random_privileged_measure(rng, exp);
    const auto table = likelihood_ratio_table(exp, p0);
    for (int t = 0; t < nt; ++t) {
      const double s = table.ratios().row(t).dot(table.support_weights());
      CHECK(std::abs(s - 1.0) <= 1e-10);
    }
    // weights(x) = 0 implies the column is all-zero
    for (int x : table.dropped_columns()) CHECK(exp.probs().col(x).maxCoeff() == 0.0);
  }
}
