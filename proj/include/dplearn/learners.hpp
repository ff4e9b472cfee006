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

#ifndef DPLEARN_LEARNERS_HPP_
#define DPLEARN_LEARNERS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "dplearn/binomial.hpp"
#include "dplearn/dp_core.hpp"
#include "dplearn/model.hpp"
#include "dplearn/random.hpp"
#include "dplearn/representation.hpp"
#include "dplearn/statistics.hpp"

namespace dplearn {

enum class ConstantsMode { kTheory, kPractical };

/// Controls the additive slack margins inside the private comparison rule.
///
/// Theory mode keeps the literal constants (margins of sqrt(m)*alpha/2800
/// against a required tail gap of sqrt(m)*alpha/1400). Those margins are what
/// the proofs need, but they force astronomically large n before the noise and
/// sampling error fit inside them. Practical mode multiplies the margins by
/// `slack_scale`, capped at half the tail gap actually achieved by the chosen
/// cut; half the achieved gap is the largest margin for which both one-sided
/// comparison guarantees still hold, so the cap keeps practical mode sound
/// rather than merely optimistic. The default scale of 1400 pushes margins to
/// that cap in essentially every regime.
struct ConstantsPolicy {
  ConstantsMode mode = ConstantsMode::kPractical;
  double slack_scale = kPracticalSlackScale;
  bool noiseless = false;  // testing switch: zero noise, argmin selection

  static constexpr double kTheorySlackScale = 1.0;
  static constexpr double kPracticalSlackScale = 1400.0;

  static ConstantsPolicy theory() {
    return ConstantsPolicy{ConstantsMode::kTheory, kTheorySlackScale, false};
  }
  static ConstantsPolicy practical() {
    return ConstantsPolicy{ConstantsMode::kPractical, kPracticalSlackScale, false};
  }

  double margin(double base_margin, double achieved_gap) const {
    return std::min(slack_scale * base_margin, achieved_gap / 2.0);
  }
};

/// Target excess error, failure probability and privacy parameter of a
/// learner invocation.
struct LearnParams {
  double alpha = 0.1;
  double beta = 0.1;
  double epsilon = 1.0;
  ConstantsPolicy policy = ConstantsPolicy::practical();

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("LearnParams: alpha must lie in (0, 1)");
    }
    if (!(beta > 0.0 && beta < 1.0)) {
      throw std::invalid_argument("LearnParams: beta must lie in (0, 1)");
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("LearnParams: epsilon must be positive");
    if (!(policy.slack_scale >= 1.0)) {
      throw std::invalid_argument("LearnParams: slack scale must be at least 1");
    }
  }
};

/// Result of the private minimum-error binary search.
struct MinErrorEstimate {
  double eta_hat = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  int iterations = 0;
};

namespace detail {

inline std::size_t argmin_index(const std::vector<double>& values) {
  return static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
}

/// Exponential-mechanism selection, or deterministic argmin in noiseless test
/// mode. Spends `epsilon` either way so budget accounting stays identical.
inline MechanismOutcome select_candidate(const std::vector<double>& scores, double delta,
                                         PrivacyBudget& budget, double epsilon,
                                         const ConstantsPolicy& policy, RandomStream& rng) {
  if (policy.noiseless) {
    if (scores.empty()) throw std::invalid_argument("select_candidate: empty candidate list");
    budget.spend(epsilon);
    return MechanismOutcome{argmin_index(scores), 1.0};
  }
  return exponential_mechanism(scores, SensitivitySpec{delta}, budget, epsilon, rng);
}

}  // namespace detail

/// Privately decides whether a guess eta_tilde is consistent with the minimum
/// achievable error eta = inf_c err_D(c). Returns 0 ("eta_tilde >= eta - alpha/2
/// holds") or 1 ("eta_tilde <= eta + alpha/2 holds"); each answer is reliable
/// up to the Laplace noise and sampling error fitting inside the margin.
///
/// Mechanics: pick the tail cut t best separating Bin(m, eta_tilde) from
/// Bin(m, eta_tilde + alpha/2), then return 0 iff
///   min_c err^t_z(c) + Lap(1/(epsilon n)) <= Pr[Bin(m, eta_tilde) > t] + margin.
/// When eta_tilde >= 1 the clamped guess admits no separating cut; the
/// right-hand threshold is ~1 and the comparison degenerates to returning 0.
inline int private_compare(const UserDataset& z, const HypothesisClass& cls,
                           PrivacyBudget& budget, double epsilon, double eta_tilde,
                           double alpha, const ConstantsPolicy& policy, RandomStream& rng) {
  if (!(eta_tilde >= 0.0 && eta_tilde <= 1.0)) {
    throw std::invalid_argument("private_compare: eta_tilde must lie in [0, 1]");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("private_compare: alpha must lie in (0, 1]");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("private_compare: epsilon must be positive");
  const int m = static_cast<int>(z.examples_per_user());
  const int64_t n = z.user_count();
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  const double base_margin = sqrt_m * alpha / 2800.0;

  int t = m - 1;
  double tail_at_guess = 1.0;
  double margin = policy.slack_scale * base_margin;
  if (eta_tilde < 1.0) {
    const double q = std::min(eta_tilde + alpha / 2.0, 1.0);
    const BinomialSplit split =
        find_separating_threshold(m, eta_tilde, q, sqrt_m * alpha / 1400.0);
    t = split.threshold;
    tail_at_guess = binom_tail(m, eta_tilde, t);
    margin = policy.margin(base_margin, split.gap);
  }

  const double min_rate = static_cast<double>(min_user_error_count(z, cls, t)) /
                          static_cast<double>(n);
  double noisy = min_rate;
  budget.spend(epsilon);
  if (!policy.noiseless) {
    noisy += laplace_sample(1.0 / (epsilon * static_cast<double>(n)), rng);
  }
  return noisy <= tail_at_guess + margin ? 0 : 1;
}

/// Binary search for eta = inf_c err_D(c) over [0, 1]: T = ceil(log2(2/alpha))
/// rounds of private_compare at epsilon/T each, so the total privacy cost is
/// epsilon by basic composition. Returns the final left endpoint; the bracket
/// width is exactly 2^-T <= alpha/2.
///
/// A compare answer of 0 certifies eta <= mid + alpha/2, so the upper half is
/// discarded; an answer of 1 certifies eta >= mid - alpha/2, discarding the
/// lower half. Either way the surviving interval still meets
/// [eta - alpha/2, eta + alpha/2].
inline MinErrorEstimate private_min_error(const UserDataset& z, const HypothesisClass& cls,
                                          PrivacyBudget& budget, double epsilon, double alpha,
                                          double beta, const ConstantsPolicy& policy,
                                          RandomStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("private_min_error: alpha must lie in (0, 1)");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("private_min_error: beta must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("private_min_error: epsilon must be positive");
  }
  const int iterations = static_cast<int>(std::ceil(std::log2(2.0 / alpha)));
  const double epsilon_step = epsilon / static_cast<double>(iterations);
  double lower = 0.0;
  double upper = 1.0;
  for (int k = 0; k < iterations; ++k) {
    const double mid = (lower + upper) / 2.0;
    const int sigma = private_compare(z, cls, budget, epsilon_step, mid, alpha, policy, rng);
    if (sigma == 0) {
      upper = mid;
    } else {
      lower = mid;
    }
  }
  return MinErrorEstimate{lower, lower, upper, iterations};
}

/// Item-level agnostic learner: samples H from the representation, scores
/// every h in H by the surrogate q(z, h) = min_c err_z(c) + dis_x(c, h)
/// (sensitivity 2/n under replacement of one example), and runs the
/// exponential mechanism at the full epsilon. Requires one example per user.
/// The supplied representation should be an (alpha/18, beta/5)-representation
/// of the class for the utility guarantee to carry over.
inline Hypothesis learn_item(const UserDataset& z, const HypothesisClass& cls,
                             const Representation& rep, const LearnParams& params,
                             RandomStream& rng) {
  params.validate();
  if (z.examples_per_user() != 1) {
    throw std::invalid_argument("learn_item: requires exactly one example per user");
  }
  if (!(cls.domain() == z.domain())) {
    throw std::invalid_argument("learn_item: class/dataset domain mismatch");
  }
  PrivacyBudget budget(params.epsilon);
  const HypothesisClass candidates = rep.sample(rng);
  const std::vector<double> scores = surrogate_scores(z, cls, candidates);
  const double delta = 2.0 / static_cast<double>(z.user_count());
  const MechanismOutcome out =
      detail::select_candidate(scores, delta, budget, params.epsilon, params.policy, rng);
  return candidates[out.index];
}

/// Intermediate quantities of a learn_user run, for tests and diagnostics.
struct UserLearnerTrace {
  MinErrorEstimate eta;
  BinomialSplit t_split;
  BinomialSplit s_split;
  double psi_hat = 0.0;  // Pr[Bin(m, eta_hat + alpha/6) > t]
  int effective_m = 0;
};

/// User-level agnostic learner. Budget epsilon splits as epsilon/2 for the
/// minimum-error estimate and epsilon/2 for the exponential mechanism over the
/// user-level surrogate scores (sensitivity 2/n under replacement of one
/// user's block).
///
/// Pipeline: estimate eta_hat to within alpha/6; pick the mistake cut t
/// separating Bin(m, eta_hat + alpha/6) from Bin(m, eta_hat + alpha/3); verify
/// the disagreement cut s = 0; sample H and select by exponential mechanism.
/// Examples beyond ceil(1/alpha^2) per user are discarded up front. The
/// representation should be an (alpha/(134400 sqrt(m)), beta/7)-representation
/// for the full guarantee.
inline Hypothesis learn_user(const UserDataset& z, const HypothesisClass& cls,
                             const Representation& rep, const LearnParams& params,
                             RandomStream& rng, UserLearnerTrace* trace = nullptr) {
  params.validate();
  if (!(cls.domain() == z.domain())) {
    throw std::invalid_argument("learn_user: class/dataset domain mismatch");
  }
  const int64_t m_cap =
      static_cast<int64_t>(std::ceil(1.0 / (params.alpha * params.alpha)));
  std::optional<UserDataset> truncated_storage;
  if (z.examples_per_user() > m_cap) truncated_storage.emplace(z.truncated(m_cap));
  const UserDataset& working = truncated_storage ? *truncated_storage : z;
  const int m = static_cast<int>(working.examples_per_user());
  const int64_t n = working.user_count();

  PrivacyBudget budget(params.epsilon);
  const MinErrorEstimate estimate =
      private_min_error(working, cls, budget, params.epsilon / 2.0, params.alpha / 6.0,
                        params.beta / 7.0, params.policy, rng);
  const double eta_hat = std::clamp(estimate.eta_hat, 0.0, 1.0 - params.alpha / 3.0);
  const BinomialSplit t_split = choose_t(m, eta_hat, params.alpha, 4200.0);
  const double psi_hat =
      binom_tail(m, std::min(eta_hat + params.alpha / 6.0, 1.0), t_split.threshold);
  const BinomialSplit s_split = choose_s(m, params.alpha);

  const HypothesisClass candidates = rep.sample(rng);
  const UserErrorParams user_params{t_split.threshold, s_split.threshold, t_split.gap,
                                    s_split.gap};
  const std::vector<double> scores = user_surrogate_scores(working, cls, candidates, user_params);
  const double delta = 2.0 / static_cast<double>(n);
  const MechanismOutcome out = detail::select_candidate(scores, delta, budget,
                                                        params.epsilon / 2.0, params.policy, rng);
  if (trace != nullptr) {
    *trace = UserLearnerTrace{estimate, t_split, s_split, psi_hat, m};
  }
  return candidates[out.index];
}

}  // namespace dplearn

#endif  // DPLEARN_LEARNERS_HPP_
