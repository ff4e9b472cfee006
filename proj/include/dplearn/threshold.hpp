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

#ifndef DPLEARN_THRESHOLD_HPP_
#define DPLEARN_THRESHOLD_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "dplearn/learners.hpp"

namespace dplearn {

/// Parameters of the private binary-search threshold learner.
struct ThresholdConfig {
  int iterations = 1;          // T
  double theta = 2.0 / 3.0;    // per-round interval mass decay target
  int t = 0;                   // user-level mistake threshold
  double epsilon_prime = 0.0;  // per-step privacy, epsilon / (4T)

  static ThresholdConfig for_budget(double epsilon, double alpha, int t) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("ThresholdConfig: alpha must lie in (0, 1)");
    }
    ThresholdConfig config;
    config.iterations =
        static_cast<int>(std::ceil(std::log(2.0 / alpha) / std::log(1.5)));
    config.theta = 2.0 / 3.0;
    config.t = t;
    config.epsilon_prime = epsilon / (4.0 * config.iterations);
    return config;
  }

  void validate(int64_t m) const {
    if (iterations < 1) throw std::invalid_argument("ThresholdConfig: T must be at least 1");
    if (!(theta > 0.0 && theta < 1.0)) {
      throw std::invalid_argument("ThresholdConfig: theta must lie in (0, 1)");
    }
    if (t < 0 || t > m) throw std::invalid_argument("ThresholdConfig: t must lie in [0, m]");
    if (!(epsilon_prime > 0.0)) {
      throw std::invalid_argument("ThresholdConfig: epsilon_prime must be positive");
    }
  }
};

/// Privately picks an approximate median of the data points inside [l, r]:
/// the candidate u minimizing the larger of the two user-level disagreement
/// fractions of the intervals [l, u-1] and [u+1, r].
///
/// The disagreement cut s is the tail cut separating Bin(m, alpha_k/2) from
/// Bin(m, 2 alpha_k/3). The required gap is m*alpha_k/4200 while m <= 1/alpha_k
/// and drops to the sqrt(m)*alpha_k/4200 regime beyond that, where the linear
/// amplification is no longer available. Scores have sensitivity 1/n, so the
/// exponential mechanism runs with delta = 1/n at the given epsilon.
inline int64_t private_median(const UserDataset& z, PrivacyBudget& budget, double epsilon,
                              int64_t l, int64_t r, double alpha_k,
                              const ConstantsPolicy& policy, RandomStream& rng) {
  if (l > r) throw std::invalid_argument("private_median: empty candidate range");
  if (l < 0 || r > z.domain().size) {
    throw std::invalid_argument("private_median: range outside [0, |X|]");
  }
  if (!(alpha_k > 0.0 && alpha_k <= 1.0)) {
    throw std::invalid_argument("private_median: alpha_k must lie in (0, 1]");
  }
  const int m = static_cast<int>(z.examples_per_user());
  const int64_t n = z.user_count();
  const double required_gap =
      (static_cast<double>(m) <= 1.0 / alpha_k
           ? static_cast<double>(m) * alpha_k
           : std::sqrt(static_cast<double>(m)) * alpha_k) /
      4200.0;
  const BinomialSplit s_split =
      find_separating_threshold(m, alpha_k / 2.0, 2.0 * alpha_k / 3.0, required_gap);

  const IntervalUserCounts counts = interval_user_counts(z, l, r, s_split.threshold);
  std::vector<double> scores(counts.left.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = static_cast<double>(std::max(counts.left[i], counts.right[i])) /
                static_cast<double>(n);
  }
  const MechanismOutcome out = detail::select_candidate(
      scores, 1.0 / static_cast<double>(n), budget, epsilon, policy, rng);
  return l + static_cast<int64_t>(out.index);
}

struct ThresholdIterationRecord {
  int64_t l = 0;
  int64_t r = 0;
  int64_t mid = 0;
  double alpha_k = 0.0;
  double v_mid = 0.0;
  double v_l = 0.0;
  double v_r = 0.0;
  int64_t next_l = 0;  // interval after the round's descent (mid, mid on early return)
  int64_t next_r = 0;
};

struct ThresholdTrace {
  MinErrorEstimate eta;
  BinomialSplit t_split;
  int effective_m = 0;
  int t = 0;
  std::vector<ThresholdIterationRecord> rounds;
  bool early_return = false;
  int64_t result_u = 0;
};

/// The noisy binary-search descent over thresholds. Per iteration: one
/// private_median call plus three Laplace-noised user-level error values, each
/// at epsilon_prime, so a full run consumes 4 * T * epsilon_prime.
///
/// The minimum over an empty candidate range is +infinity and is excluded from
/// noising; an infinite value loses every comparison against a finite noised
/// one. Returns f_mid as soon as its noised error beats both sides, otherwise
/// descends into the side with the smaller noised minimum, and falls back to
/// f_l on exhaustion.
inline Hypothesis private_threshold(const UserDataset& z, PrivacyBudget& budget,
                                    const ThresholdConfig& config,
                                    const ConstantsPolicy& policy, RandomStream& rng,
                                    ThresholdTrace* trace = nullptr) {
  config.validate(z.examples_per_user());
  const int64_t n = z.user_count();
  const double eps = config.epsilon_prime;
  const double noise_scale = 1.0 / (static_cast<double>(n) * eps);
  const std::vector<int64_t> error_counts = threshold_user_error_counts(z, config.t);

  const auto noised_value = [&](double value) {
    budget.spend(eps);
    if (policy.noiseless) return value;
    return value + laplace_sample(noise_scale, rng);
  };
  // Empty ranges score +infinity and receive no noise; the spend is still the
  // declared one per drawn value.
  const auto noised_range_min = [&](int64_t lo, int64_t hi) {
    if (lo > hi) {
      budget.spend(eps);
      return std::numeric_limits<double>::infinity();
    }
    int64_t best = std::numeric_limits<int64_t>::max();
    for (int64_t u = lo; u <= hi; ++u) {
      best = std::min(best, error_counts[static_cast<std::size_t>(u)]);
    }
    return noised_value(static_cast<double>(best) / static_cast<double>(n));
  };

  int64_t l = 0;
  int64_t r = z.domain().size;
  for (int k = 1; k <= config.iterations; ++k) {
    if (l == r) break;
    const double alpha_k = std::pow(config.theta, k - 1);
    const int64_t mid = private_median(z, budget, eps, l, r, alpha_k, policy, rng);

    const double v_mid = noised_value(
        static_cast<double>(error_counts[static_cast<std::size_t>(mid)]) /
        static_cast<double>(n));
    const double v_l = noised_range_min(l, mid - 1);
    const double v_r = noised_range_min(mid + 1, r);
    ThresholdIterationRecord record{l, r, mid, alpha_k, v_mid, v_l, v_r, l, r};

    if (v_mid < std::min(v_l, v_r)) {
      if (trace != nullptr) {
        record.next_l = mid;
        record.next_r = mid;
        trace->rounds.push_back(record);
        trace->early_return = true;
        trace->result_u = mid;
      }
      return Hypothesis::threshold(mid);
    }
    if (v_l < v_r) {
      r = mid - 1;
    } else {
      l = mid + 1;
    }
    if (trace != nullptr) {
      record.next_l = l;
      record.next_r = r;
      trace->rounds.push_back(record);
    }
  }
  if (trace != nullptr) trace->result_u = l;
  return Hypothesis::threshold(l);
}

/// End-to-end threshold learner: estimate the minimum error at epsilon/2,
/// derive the mistake cut t from it, then run the binary-search descent at
/// epsilon/2. Examples beyond ceil(1/alpha^2) per user are discarded.
inline Hypothesis learn_threshold(const UserDataset& z, const LearnParams& params,
                                  RandomStream& rng, ThresholdTrace* trace = nullptr) {
  params.validate();
  const int64_t m_cap =
      static_cast<int64_t>(std::ceil(1.0 / (params.alpha * params.alpha)));
  std::optional<UserDataset> truncated_storage;
  if (z.examples_per_user() > m_cap) truncated_storage.emplace(z.truncated(m_cap));
  const UserDataset& working = truncated_storage ? *truncated_storage : z;
  const int m = static_cast<int>(working.examples_per_user());

  const HypothesisClass thresholds = HypothesisClass::all_thresholds(working.domain());
  PrivacyBudget budget(params.epsilon);
  const MinErrorEstimate estimate =
      private_min_error(working, thresholds, budget, params.epsilon / 2.0, params.alpha / 6.0,
                        params.beta / 4.0, params.policy, rng);
  const double eta_hat = std::clamp(estimate.eta_hat, 0.0, 1.0 - params.alpha / 3.0);
  const BinomialSplit t_split = choose_t(m, eta_hat, params.alpha, 4200.0);

  const ThresholdConfig config =
      ThresholdConfig::for_budget(params.epsilon / 2.0, params.alpha, t_split.threshold);
  if (trace != nullptr) {
    trace->eta = estimate;
    trace->t_split = t_split;
    trace->effective_m = m;
    trace->t = t_split.threshold;
  }
  return private_threshold(working, budget, config, params.policy, rng, trace);
}

}  // namespace dplearn

#endif  // DPLEARN_THRESHOLD_HPP_
