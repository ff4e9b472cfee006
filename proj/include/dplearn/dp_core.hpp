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

#ifndef DPLEARN_DP_CORE_HPP_
#define DPLEARN_DP_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dplearn/errors.hpp"
#include "dplearn/random.hpp"

namespace dplearn {

/// Sensitivity of a query or score function.
struct SensitivitySpec {
  double delta = 0.0;
};

/// Tracks the privacy parameter of a composed algorithm. Every mechanism
/// invocation decrements `remaining` by its declared epsilon and fails with a
/// BudgetError if the spend would go negative. Sequential invocations at
/// eps_1, ..., eps_k all succeed iff their sum is at most the initial epsilon
/// (basic composition); a small relative tolerance absorbs floating-point
/// rounding when epsilon is split into non-dyadic parts.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon), remaining_(epsilon) {
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument("PrivacyBudget: epsilon must be positive");
    }
  }

  void spend(double epsilon) {
    if (!(epsilon >= 0.0)) {
      throw std::invalid_argument("PrivacyBudget::spend: epsilon must be nonnegative");
    }
    const double tolerance = 1e-9 * (epsilon_ + 1.0);
    if (epsilon > remaining_ + tolerance) {
      throw BudgetError("privacy budget exhausted: requested " + std::to_string(epsilon) +
                        ", remaining " + std::to_string(remaining_));
    }
    remaining_ = std::max(0.0, remaining_ - epsilon);
  }

  double epsilon() const { return epsilon_; }
  double remaining() const { return remaining_; }

 private:
  double epsilon_;
  double remaining_;
};

/// One output of a randomized selection mechanism, together with the exact
/// probability it was emitted with. Exact probabilities are what make the
/// e^epsilon ratio audits in audit.hpp possible.
struct MechanismOutcome {
  std::size_t index = 0;
  double probability = 0.0;
};

/// One draw from Laplace(0, scale) by inverse CDF; exactly one uniform is
/// consumed per sample, so streams are reproducible and easy to reason about.
inline double laplace_sample(double scale, RandomStream& rng) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("laplace_sample: scale must be positive");
  }
  const double u = rng.next_unit_open() - 0.5;  // (-1/2, 1/2)
  // sgn(u) * ln(1 - 2|u|) with the sign folded in; u = 0.5 maps to 0.
  return u < 0.0 ? scale * std::log1p(2.0 * u) : -scale * std::log1p(-2.0 * u);
}

/// value + Laplace(delta / epsilon) noise, spending `epsilon` from `budget`.
/// delta = 0 is the noiseless degenerate case and returns the value unchanged
/// (the spend still happens).
inline double laplace_mechanism(double value, const SensitivitySpec& sens,
                                PrivacyBudget& budget, double epsilon, RandomStream& rng) {
  if (!(sens.delta >= 0.0)) {
    throw std::invalid_argument("laplace_mechanism: sensitivity must be nonnegative");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("laplace_mechanism: epsilon must be positive");
  }
  budget.spend(epsilon);
  if (sens.delta == 0.0) return value;
  return value + laplace_sample(sens.delta / epsilon, rng);
}

/// Exact selection probabilities of the exponential mechanism over a vector of
/// scores (lower is better): p_i proportional to exp(-epsilon * score_i / (2 delta)).
///
/// The minimum score is subtracted before exponentiation, which is the
/// log-sum-exp stabilization for this sign convention: all exponents are <= 0,
/// the largest weight is exactly 1, and the normalizer lies in [1, k]. The
/// sampler and the exact DP audits share this one computation.
///
/// delta = 0 is only legal when all scores are equal; epsilon = 0 yields the
/// uniform distribution regardless of scores.
inline std::vector<double> exp_mech_probabilities(const std::vector<double>& scores,
                                                  const SensitivitySpec& sens,
                                                  double epsilon) {
  if (scores.empty()) {
    throw std::invalid_argument("exp_mech_probabilities: empty candidate list");
  }
  if (!(sens.delta >= 0.0)) {
    throw std::invalid_argument("exp_mech_probabilities: sensitivity must be nonnegative");
  }
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("exp_mech_probabilities: epsilon must be nonnegative");
  }
  const std::size_t k = scores.size();
  if (sens.delta == 0.0) {
    for (double s : scores) {
      if (s != scores.front()) {
        throw std::invalid_argument(
            "exp_mech_probabilities: zero sensitivity with unequal scores");
      }
    }
    return std::vector<double>(k, 1.0 / static_cast<double>(k));
  }
  if (epsilon == 0.0) {
    return std::vector<double>(k, 1.0 / static_cast<double>(k));
  }
  const double min_score = *std::min_element(scores.begin(), scores.end());
  std::vector<double> probs(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    probs[i] = std::exp(-epsilon * (scores[i] - min_score) / (2.0 * sens.delta));
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

/// Samples a candidate index by inverse CDF over exp_mech_probabilities and
/// returns it with its exact probability. Spends `epsilon` from `budget`.
inline MechanismOutcome exponential_mechanism(const std::vector<double>& scores,
                                              const SensitivitySpec& sens,
                                              PrivacyBudget& budget, double epsilon,
                                              RandomStream& rng) {
  const std::vector<double> probs = exp_mech_probabilities(scores, sens, epsilon);
  budget.spend(epsilon);
  const double u = rng.next_unit();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return MechanismOutcome{i, probs[i]};
  }
  const std::size_t last = probs.size() - 1;
  return MechanismOutcome{last, probs[last]};
}

}  // namespace dplearn

#endif  // DPLEARN_DP_CORE_HPP_
