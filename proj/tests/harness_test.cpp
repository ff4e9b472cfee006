//
// Copyright 2026 The dplearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dplearn/harness.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "gtest/gtest.h"

namespace dplearn {
namespace {

nlohmann::json base_config_json() {
  return nlohmann::json{
      {"learner", "threshold"},
      {"domain_size", 16},
      {"distribution", {{"kind", "noisy-threshold"}, {"u_star", 8}, {"rho", 0.1}}},
      {"n", 60},
      {"m", 2},
      {"alpha", 0.2},
      {"beta", 0.2},
      {"epsilon", 2.0},
      {"trials", 4},
      {"seed", 11},
      {"constants_mode", "practical"}};
}

TEST(ExperimentConfigTest, ParsesFullDocument) {
  nlohmann::json j = base_config_json();
  j["sweep"] = {{"m", {1, 4, 16}}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  EXPECT_EQ(cfg.learner, RunKind::kThreshold);
  EXPECT_EQ(cfg.domain_size, 16);
  EXPECT_EQ(cfg.distribution.u_star, 8);
  EXPECT_EQ(cfg.sweep.m.size(), 3u);
  EXPECT_EQ(cfg.policy().slack_scale, ConstantsPolicy::kPracticalSlackScale);
}

TEST(ExperimentConfigTest, RejectsUnknownKeys) {
  nlohmann::json j = base_config_json();
  j["unknown_knob"] = 3;
  EXPECT_THROW(ExperimentConfig::from_json(j), ConfigError);
  nlohmann::json nested = base_config_json();
  nested["distribution"]["typo"] = 1;
  EXPECT_THROW(ExperimentConfig::from_json(nested), ConfigError);
}

TEST(ExperimentConfigTest, ValidationErrors) {
  nlohmann::json j = base_config_json();
  j["trials"] = 0;
  EXPECT_THROW(ExperimentConfig::from_json(j), ConfigError);
  j = base_config_json();
  j["learner"] = "item";
  j["m"] = 2;
  EXPECT_THROW(ExperimentConfig::from_json(j), ConfigError);
  j = base_config_json();
  j["sweep"] = {{"m", nlohmann::json::array()}};
  EXPECT_THROW(ExperimentConfig::from_json(j), ConfigError);
  j = base_config_json();
  j["distribution"]["u_star"] = 99;
  EXPECT_THROW(ExperimentConfig::from_json(j), ConfigError);
}

TEST(GenerateDistributionTest, NoisyThresholdMatchesItsParameters) {
  const Domain domain(16);
  DistributionSpec spec;
  spec.kind = DistributionSpec::Kind::kNoisyThreshold;
  spec.u_star = 8;
  spec.rho = 0.0;
  EXPECT_DOUBLE_EQ(
      population_error(generate_distribution(spec, domain), Hypothesis::threshold(8)), 0.0);

  spec.rho = 0.1;
  const DiscreteJointDistribution noisy = generate_distribution(spec, domain);
  const std::vector<double> errs = threshold_population_errors(noisy);
  double best = 1.0;
  int64_t best_u = -1;
  for (int64_t u = 0; u <= 16; ++u) {
    if (errs[static_cast<std::size_t>(u)] < best) {
      best = errs[static_cast<std::size_t>(u)];
      best_u = u;
    }
  }
  EXPECT_EQ(best_u, 8);
  EXPECT_NEAR(best, 0.1, 1e-12);
}

TEST(GenerateDistributionTest, UniformLabelErrorIsHalf) {
  const Domain domain(8);
  DistributionSpec spec;
  spec.kind = DistributionSpec::Kind::kUniformLabel;
  const DiscreteJointDistribution d = generate_distribution(spec, domain);
  for (int64_t u = 0; u <= 8; ++u) {
    EXPECT_NEAR(population_error(d, Hypothesis::threshold(u)), 0.5, 1e-12);
  }
}

TEST(GenerateDistributionTest, PointMassAndCustom) {
  const Domain domain(4);
  DistributionSpec point;
  point.kind = DistributionSpec::Kind::kPointMass;
  point.x = 3;
  point.y = 1;
  const DiscreteJointDistribution d = generate_distribution(point, domain);
  EXPECT_DOUBLE_EQ(d.prob(3, 1), 1.0);

  DistributionSpec custom;
  custom.kind = DistributionSpec::Kind::kCustom;
  custom.probs = {0.5, 0.0, 0.0, 0.25, 0.25, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(generate_distribution(custom, domain).prob(2, 1), 0.25);
  custom.probs = {0.5, 0.5};
  EXPECT_THROW(generate_distribution(custom, domain), ConfigError);
}

TEST(RunExperimentTest, SweepShapeAndAggregates) {
  nlohmann::json j = base_config_json();
  j["sweep"] = {{"m", {1, 4, 16}}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const ExperimentResult result = run_experiment(cfg);
  EXPECT_EQ(result.aggregates.size(), 3u);
  EXPECT_EQ(result.records.size(), 12u);
  for (std::size_t p = 0; p < result.aggregates.size(); ++p) {
    const AggregateRecord& agg = result.aggregates[p];
    EXPECT_GE(agg.success_rate, 0.0);
    EXPECT_LE(agg.success_rate, 1.0);
    double mean = 0.0;
    for (int64_t t = 0; t < cfg.trials; ++t) {
      mean += result.records[p * 4 + static_cast<std::size_t>(t)].success ? 1.0 : 0.0;
    }
    EXPECT_DOUBLE_EQ(agg.success_rate, mean / cfg.trials);
  }
  for (const TrialRecord& rec : result.records) {
    EXPECT_GE(rec.population_excess, -1e-12);
  }
}

TEST(RunExperimentTest, ByteIdenticalAcrossRunsAndParallelism) {
  nlohmann::json j = base_config_json();
  j["sweep"] = {{"m", {1, 2}}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const std::string first = to_csv(cfg, run_experiment(cfg, 1));
  const std::string second = to_csv(cfg, run_experiment(cfg, 1));
  const std::string threaded = to_csv(cfg, run_experiment(cfg, 3));
  EXPECT_EQ(first, second);
  EXPECT_EQ(first, threaded);
}

TEST(RunExperimentTest, MinErrorRunsReportEtaAccuracy) {
  nlohmann::json j = base_config_json();
  j["learner"] = "min-error";
  j["n"] = 400;
  j["m"] = 4;
  j["trials"] = 3;
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const ExperimentResult result = run_experiment(cfg);
  for (const TrialRecord& rec : result.records) {
    EXPECT_EQ(rec.hypothesis_id.rfind("eta=", 0), 0u);
    EXPECT_GE(rec.population_excess, 0.0);
  }
}

TEST(CsvTest, HeaderShapeMatchesRows) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(base_config_json());
  const std::string csv = to_csv(cfg, run_experiment(cfg));
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, csv_header());
  const auto commas = std::count(header.begin(), header.end(), ',');
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), commas);
    ++rows;
  }
  EXPECT_EQ(rows, cfg.trials + 1);
}

TEST(EmitPlotScriptTest, SweepAxisAndColumnReferences) {
  nlohmann::json j = base_config_json();
  j["sweep"] = {{"m", {1, 4, 16}}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const std::string csv_path = "plot_test_results.csv";
  const std::string script_path = "plot_test_script.gp";
  write_file(csv_path, to_csv(cfg, run_experiment(cfg)));
  emit_plot_script(csv_path, script_path);

  std::ifstream in(script_path);
  ASSERT_TRUE(in.good());
  std::string script((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(script.find("set xlabel \"m\""), std::string::npos);
  // Referenced column indices stay within the header.
  const std::string header = csv_header();
  const auto columns = 1 + std::count(header.begin(), header.end(), ',');
  std::size_t at = 0;
  while ((at = script.find("column(", at)) != std::string::npos) {
    at += 7;
    EXPECT_LE(std::stoi(script.substr(at)), columns);
  }
  std::remove(csv_path.c_str());
  std::remove(script_path.c_str());
}

TEST(EmitPlotScriptTest, Errors) {
  EXPECT_THROW(emit_plot_script("does_not_exist.csv", "out.gp"), ConfigError);
  const std::string path = "plot_test_empty.csv";
  write_file(path, csv_header() + "\n");
  EXPECT_THROW(emit_plot_script(path, "out.gp"), ConfigError);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace dplearn
