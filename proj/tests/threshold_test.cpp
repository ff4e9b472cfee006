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

#include "dplearn/threshold.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "dplearn/harness.hpp"
#include "gtest/gtest.h"

namespace dplearn {
namespace {

DiscreteJointDistribution noisy_threshold_distribution(Domain domain, int64_t u_star,
                                                       double rho) {
  DistributionSpec spec;
  spec.kind = DistributionSpec::Kind::kNoisyThreshold;
  spec.u_star = u_star;
  spec.rho = rho;
  return generate_distribution(spec, domain);
}

ConstantsPolicy noiseless_policy() {
  ConstantsPolicy policy = ConstantsPolicy::practical();
  policy.noiseless = true;
  return policy;
}

LearnParams params_with(double alpha, double beta, double epsilon, bool noiseless = false) {
  LearnParams params;
  params.alpha = alpha;
  params.beta = beta;
  params.epsilon = epsilon;
  params.policy = noiseless ? noiseless_policy() : ConstantsPolicy::practical();
  return params;
}

TEST(PrivateMedianTest, PointMassHasZeroScoreAndWins) {
  // Every user holds both examples at x = 5, so u = 5 is the unique candidate
  // with neither side holding more than s = 1 points per user.
  const Domain domain(10);
  std::vector<LabeledExample> entries;
  for (int i = 0; i < 20; ++i) {
    entries.push_back(LabeledExample{5, 0});
    entries.push_back(LabeledExample{5, 1});
  }
  const UserDataset z(domain, 20, 2, entries);
  RandomStream rng(1);
  PrivacyBudget budget(1.0);
  EXPECT_EQ(private_median(z, budget, 1.0, 0, 10, 1.0, noiseless_policy(), rng), 5);
}

TEST(PrivateMedianTest, SingletonRangeAndErrors) {
  const Domain domain(6);
  std::vector<LabeledExample> entries{{1, 0}, {2, 1}, {3, 0}, {4, 1}};
  const UserDataset z(domain, 2, 2, entries);
  RandomStream rng(2);
  PrivacyBudget budget(1.0);
  EXPECT_EQ(private_median(z, budget, 0.25, 4, 4, 1.0, ConstantsPolicy::practical(), rng), 4);
  EXPECT_THROW(private_median(z, budget, 0.25, 5, 4, 1.0, ConstantsPolicy::practical(), rng),
               std::invalid_argument);
  EXPECT_THROW(private_median(z, budget, 0.25, 0, 7, 1.0, ConstantsPolicy::practical(), rng),
               std::invalid_argument);
  EXPECT_THROW(private_median(z, budget, 0.25, 0, 4, 1.5, ConstantsPolicy::practical(), rng),
               std::invalid_argument);
}

TEST(PrivateMedianTest, SideMassContract) {
  // Over the full domain at alpha_k = 1 both side masses must fall below 2/3
  // with probability at least 1 - beta once n is sized.
  RandomStream rng(3);
  const Domain domain(64);
  const DiscreteJointDistribution d = noisy_threshold_distribution(domain, 32, 0.1);
  int ok = 0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    const UserDataset z = sample_dataset(d, 1500, 4, rng);
    PrivacyBudget budget(1.0);
    const int64_t mid =
        private_median(z, budget, 1.0, 0, 64, 1.0, ConstantsPolicy::practical(), rng);
    const double left = d.interval_mass(0, mid - 1);
    const double right = d.interval_mass(mid + 1, 64);
    ok += (std::max(left, right) <= 2.0 / 3.0);
  }
  EXPECT_GE(ok, 45);
}

TEST(PrivateThresholdTest, NoiselessRealizableDataRecoversZeroError) {
  // Points 1..8 labeled by f_3 with both boundary points present force the
  // empirical minimum to be uniquely u = 3.
  const Domain domain(8);
  std::vector<LabeledExample> entries;
  for (int rep = 0; rep < 2; ++rep) {
    for (int64_t x = 1; x <= 8; ++x) {
      entries.push_back(LabeledExample{x, static_cast<uint8_t>(x > 3 ? 1 : 0)});
    }
  }
  const UserDataset z(domain, 16, 1, entries);
  RandomStream rng(4);
  PrivacyBudget budget(1.0);
  const ThresholdConfig config = ThresholdConfig::for_budget(1.0, 0.1, 0);
  const Hypothesis out = private_threshold(z, budget, config, noiseless_policy(), rng);
  EXPECT_EQ(empirical_error(z, out).count, 0);
  EXPECT_EQ(out.threshold_value(), 3);
}

TEST(PrivateThresholdTest, CollapsedIntervalBreaksToLeftEndpoint) {
  const Domain domain(1);
  std::vector<LabeledExample> entries(8, LabeledExample{1, 1});
  const UserDataset z(domain, 8, 1, entries);
  RandomStream rng(5);
  PrivacyBudget budget(1.0);
  const ThresholdConfig config = ThresholdConfig::for_budget(1.0, 0.2, 0);
  ThresholdTrace trace;
  const Hypothesis out =
      private_threshold(z, budget, config, noiseless_policy(), rng, &trace);
  // Round one shrinks [0, 1] to the correct endpoint; round two hits l == r
  // and breaks, returning f_l.
  EXPECT_EQ(out.threshold_value(), 0);
  EXPECT_FALSE(trace.early_return);
  EXPECT_LT(static_cast<int>(trace.rounds.size()), config.iterations);
}

TEST(PrivateThresholdTest, BudgetSpendsFourEpsilonPrimePerRound) {
  RandomStream rng(6);
  const Domain domain(64);
  const DiscreteJointDistribution d = noisy_threshold_distribution(domain, 20, 0.1);
  const UserDataset z = sample_dataset(d, 500, 2, rng);
  const double epsilon = 1.0;
  const ThresholdConfig config = ThresholdConfig::for_budget(epsilon, 0.1, 0);
  PrivacyBudget budget(epsilon);
  ThresholdTrace trace;
  private_threshold(z, budget, config, ConstantsPolicy::practical(), rng, &trace);
  const double spent = 4.0 * config.epsilon_prime * static_cast<double>(trace.rounds.size());
  EXPECT_NEAR(budget.remaining(), epsilon - spent, 1e-9);
}

TEST(PrivateThresholdTest, NoiselessDescentKeepsTheGlobalMinimum) {
  RandomStream rng(7);
  const Domain domain(128);
  const DiscreteJointDistribution d = noisy_threshold_distribution(domain, 77, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    const UserDataset z = sample_dataset(d, 300, 2, rng);
    const int t = 0;
    const std::vector<int64_t> counts = threshold_user_error_counts(z, t);
    RandomStream run_rng = rng.fork(42, trial);
    PrivacyBudget budget(1.0);
    const ThresholdConfig config = ThresholdConfig::for_budget(1.0, 0.1, t);
    ThresholdTrace trace;
    private_threshold(z, budget, config, noiseless_policy(), run_rng, &trace);
    const auto range_min = [&counts](int64_t lo, int64_t hi) {
      int64_t best = std::numeric_limits<int64_t>::max();
      for (int64_t u = lo; u <= hi; ++u) best = std::min(best, counts[std::size_t(u)]);
      return best;
    };
    for (const ThresholdIterationRecord& round : trace.rounds) {
      if (trace.early_return && round.next_l == round.mid) continue;
      // The side the search descended into holds a minimum no worse than the
      // discarded side's.
      const int64_t chosen = range_min(round.next_l, round.next_r);
      const int64_t other = round.next_r < round.r ? range_min(round.mid + 1, round.r)
                                                   : range_min(round.l, round.mid - 1);
      EXPECT_LE(chosen, other);
    }
  }
}

TEST(PrivateThresholdTest, IntervalMassDecayUnderMetContracts) {
  RandomStream rng(8);
  const Domain domain(256);
  const DiscreteJointDistribution d = noisy_threshold_distribution(domain, 100, 0.1);
  const UserDataset z = sample_dataset(d, 3000, 4, rng);
  PrivacyBudget budget(1.0);
  const ThresholdConfig config = ThresholdConfig::for_budget(1.0, 0.1, 1);
  ThresholdTrace trace;
  private_threshold(z, budget, config, noiseless_policy(), rng, &trace);
  bool contracts_held = true;
  for (const ThresholdIterationRecord& round : trace.rounds) {
    const double left = d.interval_mass(round.l, round.mid - 1);
    const double right = d.interval_mass(round.mid + 1, round.r);
    contracts_held =
        contracts_held && (std::max(left, right) <= (2.0 / 3.0) * round.alpha_k + 1e-12);
  }
  ASSERT_TRUE(contracts_held);
  if (!trace.early_return && !trace.rounds.empty()) {
    // One mass decay step per completed round.
    double bound = 1.0;
    for (std::size_t k = 0; k < trace.rounds.size(); ++k) bound *= 2.0 / 3.0;
    const ThresholdIterationRecord& last = trace.rounds.back();
    EXPECT_LE(d.interval_mass(last.next_l, last.next_r), bound + 1e-12);
  }
}

TEST(LearnThresholdTest, OutputIsAlwaysAValidThreshold) {
  RandomStream rng(9);
  const Domain domain(32);
  const DiscreteJointDistribution d = noisy_threshold_distribution(domain, 11, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    const UserDataset z = sample_dataset(d, 200, 2, rng);
    const Hypothesis out = learn_threshold(z, params_with(0.2, 0.1, 2.0), rng);
    EXPECT_TRUE(out.is_threshold());
    EXPECT_GE(out.threshold_value(), 0);
    EXPECT_LE(out.threshold_value(), 32);
  }
}

TEST(LearnThresholdTest, TruncatesExamplesBeyondAlphaCap) {
  RandomStream rng(10);
  const Domain domain(16);
  const DiscreteJointDistribution d = noisy_threshold_distribution(domain, 8, 0.1);
  const UserDataset z = sample_dataset(d, 150, 30, rng);
  ThresholdTrace trace;
  learn_threshold(z, params_with(0.25, 0.1, 2.0), rng, &trace);
  EXPECT_EQ(trace.effective_m, 16);  // ceil(1 / 0.25^2)
}

TEST(LearnThresholdTest, NoiselessRunsMatchBruteForceUserErrorMinimum) {
  RandomStream rng(11);
  const Domain domain(64);
  for (int instance = 0; instance < 20; ++instance) {
    const int64_t u_star = 1 + static_cast<int64_t>(rng.next_u64() % 62);
    std::vector<LabeledExample> entries;
    const int64_t n = 25;
    for (int64_t i = 0; i < n; ++i) {
      entries.push_back(LabeledExample{u_star, 0});
      entries.push_back(LabeledExample{u_star + 1, 1});
    }
    const UserDataset z(domain, n, 2, entries);
    RandomStream run_rng = rng.fork(7, instance);
    ThresholdTrace trace;
    const Hypothesis out =
        learn_threshold(z, params_with(0.1, 0.1, 2.0, /*noiseless=*/true), run_rng, &trace);
    const std::vector<int64_t> counts = threshold_user_error_counts(z, trace.t);
    const int64_t brute_force_min = *std::min_element(counts.begin(), counts.end());
    EXPECT_EQ(user_error(z, out, trace.t).count, brute_force_min);
    EXPECT_EQ(out.threshold_value(), u_star);
  }
}

TEST(LearnThresholdTest, ExcessErrorWithinAlphaOnNoisyThresholds) {
  RandomStream rng(12);
  const Domain domain(256);
  const double rho = 0.1;
  const DiscreteJointDistribution d = noisy_threshold_distribution(domain, 100, rho);
  const std::vector<double> errs = threshold_population_errors(d);
  const double eta = *std::min_element(errs.begin(), errs.end());
  const double alpha = 0.1;
  int ok = 0;
  const int trials = 30;
  for (int trial = 0; trial < trials; ++trial) {
    const UserDataset z = sample_dataset(d, 6000, 16, rng);
    const Hypothesis out = learn_threshold(z, params_with(alpha, 0.1, 2.0), rng);
    ok += (errs[static_cast<std::size_t>(out.threshold_value())] - eta <= alpha);
  }
  EXPECT_GE(ok, 24);
}

TEST(PrivateThresholdTest, PerIterationNoiseMagnitudeBound) {
  // Each per-iteration draw is Laplace(1/(n eps')), so it stays within
  // ln(1/beta') / (n eps') with probability 1 - beta'.
  RandomStream rng(13);
  const double n = 500.0;
  const double epsilon_prime = 1.0 / 32.0;
  const double beta_prime = 0.05;
  const double bound = std::log(1.0 / beta_prime) / (n * epsilon_prime);
  const int draws = 20000;
  int inside = 0;
  for (int i = 0; i < draws; ++i) {
    inside += (std::fabs(laplace_sample(1.0 / (n * epsilon_prime), rng)) <= bound);
  }
  const double sigma = std::sqrt(beta_prime * (1.0 - beta_prime) / draws);
  EXPECT_GE(static_cast<double>(inside) / draws, 1.0 - beta_prime - 3.0 * sigma);
}

TEST(PrivateThresholdTest, RangeMinimaStayWithinLinearTimeBudget) {
  // The per-iteration statistics are prefix sweeps, O(n*m + |X|); a quarter
  //-million examples over a quarter-million-point domain must run in far less
  // than a second per iteration even on modest hardware.
  RandomStream rng(14);
  const Domain domain(1 << 18);
  const DiscreteJointDistribution d = noisy_threshold_distribution(domain, 77777, 0.1);
  const UserDataset z = sample_dataset(d, 50000, 4, rng);
  const auto started = std::chrono::steady_clock::now();
  const ThresholdConfig config = ThresholdConfig::for_budget(1.0, 0.1, 0);
  PrivacyBudget budget(1.0);
  private_threshold(z, budget, config, ConstantsPolicy::practical(), rng);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  EXPECT_LT(seconds, 10.0);
}

TEST(ThresholdConfigTest, ValidationAndDefaults) {
  const ThresholdConfig config = ThresholdConfig::for_budget(1.0, 0.1, 2);
  EXPECT_EQ(config.iterations, static_cast<int>(std::ceil(std::log(20.0) / std::log(1.5))));
  EXPECT_NEAR(config.theta, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(config.epsilon_prime * 4.0 * config.iterations, 1.0, 1e-12);
  EXPECT_NO_THROW(config.validate(4));
  EXPECT_THROW(config.validate(1), std::invalid_argument);  // t exceeds m
  ThresholdConfig bad = config;
  bad.theta = 1.0;
  EXPECT_THROW(bad.validate(4), std::invalid_argument);
}

}  // namespace
}  // namespace dplearn
