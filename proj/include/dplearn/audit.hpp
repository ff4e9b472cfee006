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

#ifndef DPLEARN_AUDIT_HPP_
#define DPLEARN_AUDIT_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dplearn/model.hpp"
#include "dplearn/random.hpp"

namespace dplearn {

/// Outcome of a differential-privacy check. `epsilon_measured` is the largest
/// observed |log p - log p'| over neighboring datasets; for the exact method
/// it is a certificate over the supplied pairs, for the empirical method it is
/// a plug-in estimate with a minimum-count filter, a smoke detector rather
/// than a formal bound.
struct AuditReport {
  double epsilon_declared = 0.0;
  double epsilon_measured = 0.0;
  std::string method;  // "exact" | "empirical"
  int64_t trials = 0;
  std::string worst_pair;
  bool support_violation = false;  // some output possible on one side only
  bool low_coverage = false;       // empirical: too few distinct outputs observed

  bool within_declared(double slack = 0.0) const {
    return !support_violation && epsilon_measured <= epsilon_declared + slack;
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "method: " << method << '\n'
        << "epsilon_declared: " << epsilon_declared << '\n'
        << "epsilon_measured: " << epsilon_measured << '\n'
        << "trials: " << trials << '\n'
        << "worst_pair: " << (worst_pair.empty() ? "-" : worst_pair) << '\n'
        << "support_violation: " << (support_violation ? "true" : "false") << '\n'
        << "low_coverage: " << (low_coverage ? "true" : "false") << '\n';
    return out.str();
  }

  static std::string csv_header() {
    return "method,epsilon_declared,epsilon_measured,trials,worst_pair,support_violation,"
           "low_coverage";
  }

  std::string to_csv_row() const {
    std::ostringstream out;
    out << method << ',' << epsilon_declared << ',' << epsilon_measured << ',' << trials << ','
        << (worst_pair.empty() ? "-" : worst_pair) << ',' << (support_violation ? 1 : 0) << ','
        << (low_coverage ? 1 : 0);
    return out.str();
  }
};

/// Maps a dataset to the exact output distribution of a mechanism over a
/// finite candidate set.
using ProbabilityOracle = std::function<std::vector<double>(const UserDataset&)>;

struct NeighborPair {
  UserDataset z;
  UserDataset z_prime;
  std::string id;
};

/// Exact epsilon certificate over explicit neighbor pairs: evaluates the
/// oracle on both sides of every pair and takes the worst log-ratio across all
/// outputs. Probabilities of 0 on both sides are a ratio of 1; probability on
/// one side only raises the support-violation flag (an infinite ratio).
inline AuditReport exact_dp_check(const ProbabilityOracle& oracle,
                                  const std::vector<NeighborPair>& pairs, double epsilon) {
  AuditReport report;
  report.method = "exact";
  report.epsilon_declared = epsilon;
  for (const NeighborPair& pair : pairs) {
    const std::vector<double> p = oracle(pair.z);
    const std::vector<double> q = oracle(pair.z_prime);
    if (p.size() != q.size()) {
      throw std::invalid_argument("exact_dp_check: oracle output sizes differ across a pair");
    }
    for (const std::vector<double>* vec : {&p, &q}) {
      double total = 0.0;
      for (double v : *vec) total += v;
      if (std::fabs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("exact_dp_check: oracle vector does not sum to 1");
      }
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0 && q[i] == 0.0) continue;
      if (p[i] == 0.0 || q[i] == 0.0) {
        report.support_violation = true;
        report.epsilon_measured = std::numeric_limits<double>::infinity();
        report.worst_pair = pair.id;
        continue;
      }
      const double ratio = std::fabs(std::log(p[i]) - std::log(q[i]));
      if (ratio > report.epsilon_measured) {
        report.epsilon_measured = ratio;
        report.worst_pair = pair.id;
      }
    }
  }
  return report;
}

/// Runs a sampler on a dataset, producing one finite-valued output per call.
using OutcomeSampler = std::function<int64_t(const UserDataset&, RandomStream&)>;

/// Monte Carlo epsilon estimate on one neighbor pair: builds frequency tables
/// over `trials` runs per side and reports the largest |log(f/f')| over
/// outputs seen at least 10 times on both sides. Per-trial streams are derived
/// from (side, trial), so the estimate is reproducible.
inline AuditReport empirical_dp_estimate(const OutcomeSampler& sampler, const NeighborPair& pair,
                                         double epsilon, int64_t trials, RandomStream& rng) {
  if (trials < 10000) {
    throw std::invalid_argument("empirical_dp_estimate: need at least 10^4 trials");
  }
  AuditReport report;
  report.method = "empirical";
  report.epsilon_declared = epsilon;
  report.trials = trials;
  report.worst_pair = pair.id;

  std::map<int64_t, int64_t> counts_z;
  std::map<int64_t, int64_t> counts_zp;
  for (int64_t i = 0; i < trials; ++i) {
    RandomStream trial_rng = rng.fork(0, static_cast<uint64_t>(i));
    counts_z[sampler(pair.z, trial_rng)]++;
  }
  for (int64_t i = 0; i < trials; ++i) {
    RandomStream trial_rng = rng.fork(1, static_cast<uint64_t>(i));
    counts_zp[sampler(pair.z_prime, trial_rng)]++;
  }

  std::map<int64_t, std::pair<int64_t, int64_t>> merged;
  for (const auto& [key, c] : counts_z) merged[key].first = c;
  for (const auto& [key, c] : counts_zp) merged[key].second = c;
  if (merged.size() <= 1) report.low_coverage = true;

  constexpr int64_t kMinCount = 10;
  for (const auto& [key, c] : merged) {
    if (c.first < kMinCount || c.second < kMinCount) continue;
    const double f = static_cast<double>(c.first) / static_cast<double>(trials);
    const double fp = static_cast<double>(c.second) / static_cast<double>(trials);
    report.epsilon_measured =
        std::max(report.epsilon_measured, std::fabs(std::log(f) - std::log(fp)));
  }
  return report;
}

}  // namespace dplearn

#endif  // DPLEARN_AUDIT_HPP_
