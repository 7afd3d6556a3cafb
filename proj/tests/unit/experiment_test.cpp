#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "linkbound/experiment.hpp"

using namespace linkbound;

namespace {

const char* kHeader =
    "sweep_param,value,fano_raw,fano_clamped,kl_mean,bound_gamma_or_kappa,err_exact,se_exact,"
    "err_gibbs,se_gibbs,seconds\n";

SweepSpec small_spec() {
  SweepSpec spec = preset_sweep("table1b", 3);
  spec.fixed.entities = 15;
  spec.replicates = 3;
  spec.root_seed = 42;
  return spec;
}

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.sampler.iterations = 200;
  config.exact_draws = 200;
  config.record_timing = false;
  return config;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_csv(r, out);
  return out.str();
}

}  // namespace

TEST(Csv, EmptyResultIsHeaderOnly) {
  ExperimentResult empty{"x", "N", {}};
  EXPECT_EQ(csv_of(empty), kHeader);
}

TEST(Csv, OnePointGivesOneRow) {
  ExperimentResult one{"x", "beta", {ExperimentRow{.value = 0.5}}};
  const auto csv = csv_of(one);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.substr(std::string(kHeader).size(), 9), "beta,0.5,");
}

TEST(Csv, RoundTripsThroughJson) {
  ExperimentRow row{.value = 0.1,
                    .fano_raw = -std::numeric_limits<double>::infinity(),
                    .fano_clamped = 0.0,
                    .kl_mean = 1.0 / 3.0,
                    .bound = std::numeric_limits<double>::infinity(),
                    .err_exact = 0.123456789012345678,
                    .se_exact = 1e-17,
                    .err_gibbs = 2.0 / 7.0,
                    .se_gibbs = 0.0,
                    .seconds = 12.5};
  ExperimentResult r{"t", "beta", {row, row}};
  r.rows[1].value = 1e-300;
  const auto csv = csv_of(r);
  const auto back = result_from_json(result_to_json(result_from_csv(csv, "t")));
  EXPECT_EQ(csv_of(back), csv);
  EXPECT_EQ(back.sweep_param, "beta");
}

TEST(Experiment, DeterministicAcrossRunsAndWorkers) {
  const auto spec = small_spec();
  auto config = small_config();
  const auto first = csv_of(run_experiment(spec, config));
  EXPECT_EQ(first, csv_of(run_experiment(spec, config)));
  config.workers = 4;
  EXPECT_EQ(first, csv_of(run_experiment(spec, config)));
  auto other = spec;
  other.root_seed = 43;
  EXPECT_NE(first, csv_of(run_experiment(other, config)));
}

TEST(Experiment, RowsAreWellFormed) {
  const auto result = run_experiment(small_spec(), small_config());
  ASSERT_EQ(result.rows.size(), 3u);
  EXPECT_EQ(result.sweep_param, "beta");
  for (const auto& row : result.rows) {
    EXPECT_FALSE(row.failed());
    EXPECT_GE(row.se_exact, 0.0);
    EXPECT_GE(row.se_gibbs, 0.0);
    EXPECT_GE(row.fano_clamped, 0.0);
    EXPECT_LE(row.fano_clamped, 1.0);
    EXPECT_EQ(row.seconds, 0.0);
  }
  // beta = 1: every entity equally likely.
  EXPECT_NEAR(result.rows.back().err_exact, 1.0 - 1.0 / 15.0, 0.03);
  EXPECT_TRUE(fano_violations(result).empty());
}

TEST(Experiment, FailuresAreMarkedNotThrown) {
  auto spec = small_spec();
  spec.fixed.entities = 2;  // Fano needs at least three entities
  const auto result = run_experiment(spec, small_config());
  ASSERT_EQ(result.rows.size(), 3u);
  for (const auto& row : result.rows) {
    EXPECT_TRUE(row.failed());
    EXPECT_TRUE(std::isnan(row.err_exact));
  }
  EXPECT_NE(result_to_json(result).find("Fano"), std::string::npos);
}

TEST(Plotdata, ThreeSeries) {
  ExperimentResult r{"table1a", "N", {ExperimentRow{.value = 10, .fano_clamped = 0.2, .err_exact = 0.5}}};
  const auto text = plotdata_json(r);
  for (const char* key : {"\"bound\"", "\"exact\"", "\"gibbs\"", "\"table1a\""})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST(Spearman, RankCorrelation) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_NEAR(spearman(x, std::vector<double>{2, 4, 6, 8, 100}), 1.0, 1e-15);
  EXPECT_NEAR(spearman(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0, 1e-15);
  // Ties share the average rank: y ranks (1.5, 1.5, 3, 4, 5).
  const double r = spearman(x, std::vector<double>{1, 1, 2, 3, 4});
  EXPECT_NEAR(r, 0.9746794344808963, 1e-12);
  EXPECT_TRUE(std::isnan(spearman(x, std::vector<double>(5, 1.0))));
  EXPECT_THROW(spearman(x, std::vector<double>{1, 2}), Error);
}
