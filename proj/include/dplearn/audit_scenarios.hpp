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

#ifndef DPLEARN_AUDIT_SCENARIOS_HPP_
#define DPLEARN_AUDIT_SCENARIOS_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dplearn/audit.hpp"
#include "dplearn/harness.hpp"

namespace dplearn {

/// Every single-example-per-user dataset over X x {0,1} with n users, paired
/// with every swap neighbor (one position changed). Sizes explode as
/// (2|X|)^n, so this is for exhaustive certification on tiny instances only.
inline std::vector<NeighborPair> all_swap_neighbor_pairs(Domain domain, int64_t n) {
  const int64_t values = 2 * domain.size;
  double datasets = 1.0;
  for (int64_t i = 0; i < n; ++i) datasets *= static_cast<double>(values);
  if (datasets > 50000.0) {
    throw ConfigError("all_swap_neighbor_pairs: instance too large to enumerate");
  }
  const auto decode = [&](int64_t code) {
    std::vector<LabeledExample> entries(static_cast<std::size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      const int64_t v = code % values;
      code /= values;
      entries[static_cast<std::size_t>(i)] =
          LabeledExample{v / 2 + 1, static_cast<uint8_t>(v % 2)};
    }
    return entries;
  };
  std::vector<NeighborPair> pairs;
  const int64_t total = static_cast<int64_t>(datasets);
  for (int64_t code = 0; code < total; ++code) {
    const std::vector<LabeledExample> base = decode(code);
    for (int64_t pos = 0; pos < n; ++pos) {
      const int64_t current =
          2 * (base[static_cast<std::size_t>(pos)].x - 1) + base[static_cast<std::size_t>(pos)].y;
      for (int64_t v = current + 1; v < values; ++v) {
        std::vector<LabeledExample> other = base;
        other[static_cast<std::size_t>(pos)] =
            LabeledExample{v / 2 + 1, static_cast<uint8_t>(v % 2)};
        pairs.push_back(NeighborPair{
            UserDataset(domain, n, 1, base), UserDataset(domain, n, 1, other),
            "z" + std::to_string(code) + ":pos" + std::to_string(pos) + "->" +
                std::to_string(v)});
      }
    }
  }
  return pairs;
}

/// Exact output-distribution oracle of the item learner conditioned on a fixed
/// sampled class H: surrogate scores against `cls`, exponential-mechanism
/// probabilities at the given sensitivity. Feeding a sensitivity below 2/n
/// models a buggy mechanism and should be caught by the audit.
inline ProbabilityOracle item_learner_oracle(const HypothesisClass& cls,
                                             const HypothesisClass& fixed_candidates,
                                             double epsilon, double delta) {
  return [&cls, &fixed_candidates, epsilon, delta](const UserDataset& z) {
    const std::vector<double> scores = surrogate_scores(z, cls, fixed_candidates);
    return exp_mech_probabilities(scores, SensitivitySpec{delta}, epsilon);
  };
}

/// Runs learn_threshold and reports the returned threshold.
inline OutcomeSampler threshold_learner_sampler(const LearnParams& params) {
  return [params](const UserDataset& z, RandomStream& rng) {
    return learn_threshold(z, params, rng).threshold_value();
  };
}

/// Sampled dataset plus a swap neighbor: user 0's block is replaced by
/// examples concentrated on the top of the domain with label 0, the block a
/// worst-case user would contribute against a mid-domain threshold.
inline NeighborPair sampled_neighbor_pair(const DiscreteJointDistribution& dist, int64_t n,
                                          int64_t m, uint64_t seed) {
  RandomStream rng(seed);
  const UserDataset z = sample_dataset(dist, n, m, rng);
  const std::vector<LabeledExample> block(
      static_cast<std::size_t>(m), LabeledExample{dist.domain().size, 0});
  return NeighborPair{z, z.with_user_replaced(0, block), "sampled-vs-adversarial-user0"};
}

/// Laplace mechanism on the count of positive labels, discretized to `bins`
/// cells over [-2, 3) with the tails clamped into the edge cells. The narrow
/// range keeps every cell's expected count high enough that the min-count
/// filter admits only well-estimated frequencies, while the cells right of 1
/// still exhibit the full e^epsilon density ratio.
inline OutcomeSampler laplace_count_sampler(double epsilon, int bins) {
  return [epsilon, bins](const UserDataset& z, RandomStream& rng) {
    double value = 0.0;
    for (const LabeledExample& e : z.all()) value += e.y;
    PrivacyBudget budget(epsilon);
    const double noised =
        laplace_mechanism(value, SensitivitySpec{1.0}, budget, epsilon, rng);
    const double lo = -2.0;
    const double hi = 3.0;
    const double width = (hi - lo) / bins;
    int64_t bin = static_cast<int64_t>(std::floor((noised - lo) / width));
    if (bin < 0) bin = 0;
    if (bin >= bins) bin = bins - 1;
    return bin;
  };
}

/// Dispatches the audit described by the config's audit section.
inline AuditReport run_audit(const ExperimentConfig& cfg) {
  if (!cfg.audit.has_value()) throw ConfigError("run_audit: config has no audit section");
  const AuditConfig& audit = *cfg.audit;
  RandomStream rng(cfg.seed);
  if (audit.method == "exact") {
    if (audit.target != "exp-mech") {
      throw ConfigError("run_audit: exact audits support only the exp-mech target");
    }
    const Domain domain(cfg.domain_size);
    const HypothesisClass thresholds = HypothesisClass::all_thresholds(domain);
    const std::vector<NeighborPair> pairs = all_swap_neighbor_pairs(domain, cfg.n);
    const double delta = 2.0 / static_cast<double>(cfg.n);
    return exact_dp_check(item_learner_oracle(thresholds, thresholds, cfg.epsilon, delta),
                          pairs, cfg.epsilon);
  }
  if (audit.target == "laplace") {
    const Domain domain(cfg.domain_size);
    const std::vector<LabeledExample> zero{LabeledExample{1, 0}};
    const std::vector<LabeledExample> one{LabeledExample{1, 1}};
    const NeighborPair pair{UserDataset(domain, 1, 1, zero), UserDataset(domain, 1, 1, one),
                            "count0-vs-count1"};
    return empirical_dp_estimate(laplace_count_sampler(cfg.epsilon, audit.bins), pair,
                                 cfg.epsilon, audit.trials, rng);
  }
  if (audit.target == "threshold-learner") {
    const Domain domain(cfg.domain_size);
    const DiscreteJointDistribution dist = generate_distribution(cfg.distribution, domain);
    const NeighborPair pair = sampled_neighbor_pair(dist, cfg.n, cfg.m, cfg.seed);
    LearnParams params;
    params.alpha = cfg.alpha;
    params.beta = cfg.beta;
    params.epsilon = cfg.epsilon;
    params.policy = cfg.policy();
    return empirical_dp_estimate(threshold_learner_sampler(params), pair, cfg.epsilon,
                                 audit.trials, rng);
  }
  throw ConfigError("run_audit: empirical exp-mech target is not a canned scenario");
}

}  // namespace dplearn

#endif  // DPLEARN_AUDIT_SCENARIOS_HPP_
