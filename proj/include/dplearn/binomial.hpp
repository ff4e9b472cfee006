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

#ifndef DPLEARN_BINOMIAL_HPP_
#define DPLEARN_BINOMIAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dplearn/errors.hpp"

namespace dplearn {

namespace detail {

/// Kahan compensated summation; keeps tail sums exact to double precision even
/// when thousands of terms are accumulated.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

/// A tail cut of a binomial distribution: counts strictly greater than
/// `threshold` are "over". `gap` is the achieved difference of the two tail
/// probabilities being separated; `k_bound` is the total-variation envelope
/// min(m|p-q|, sqrt(m)|p-q|/sqrt(p(1-p)), 1) for the pair.
struct BinomialSplit {
  int threshold = 0;  // in [-1, m-1]; the tail event is {count > threshold}
  double gap = 0.0;
  double k_bound = 0.0;
};

/// Full pmf table of Bin(m, p), indices 0..m.
///
/// Anchored at the mode via lgamma and extended outward with the
/// multiplicative recurrence pmf(k+1) = pmf(k) * (m-k)/(k+1) * p/(1-p).
/// Moving away from the mode the ratios are < 1, so the recurrence only
/// shrinks values and stays stable; entries far in the tails underflow to 0,
/// which is harmless at double precision. Handles m up to ~10^4.
inline std::vector<double> binom_pmf_table(int m, double p) {
  if (m < 1) throw std::invalid_argument("binom_pmf_table: m must be positive");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binom_pmf_table: p must lie in [0, 1]");
  }
  std::vector<double> pmf(static_cast<std::size_t>(m) + 1, 0.0);
  if (p == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf[static_cast<std::size_t>(m)] = 1.0;
    return pmf;
  }
  int mode = static_cast<int>(static_cast<double>(m + 1) * p);
  mode = std::clamp(mode, 0, m);
  const double log_anchor = std::lgamma(static_cast<double>(m) + 1.0) -
                            std::lgamma(static_cast<double>(mode) + 1.0) -
                            std::lgamma(static_cast<double>(m - mode) + 1.0) +
                            static_cast<double>(mode) * std::log(p) +
                            static_cast<double>(m - mode) * std::log1p(-p);
  pmf[static_cast<std::size_t>(mode)] = std::exp(log_anchor);
  const double odds = p / (1.0 - p);
  for (int k = mode; k < m; ++k) {
    pmf[static_cast<std::size_t>(k) + 1] =
        pmf[static_cast<std::size_t>(k)] * (static_cast<double>(m - k) / (k + 1.0)) * odds;
  }
  for (int k = mode; k > 0; --k) {
    pmf[static_cast<std::size_t>(k) - 1] =
        pmf[static_cast<std::size_t>(k)] * (static_cast<double>(k) / (m - k + 1.0)) / odds;
  }
  // Dividing by the exact sum cancels the anchor's absolute error; what is
  // left is the per-entry relative error of the recurrence, well below 1e-12.
  detail::KahanSum total;
  for (double v : pmf) total.add(v);
  for (double& v : pmf) v /= total.sum;
  return pmf;
}

/// Pr[Bin(m, p) > ell]. ell < 0 gives 1, ell >= m gives 0. The smaller of the
/// two tails is accumulated directly and complemented if needed, so the result
/// is exact to double precision on both ends of the range.
inline double binom_tail(int m, double p, int ell) {
  if (m < 1) throw std::invalid_argument("binom_tail: m must be positive");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binom_tail: p must lie in [0, 1]");
  }
  if (ell < 0) return 1.0;
  if (ell >= m) return 0.0;
  const std::vector<double> pmf = binom_pmf_table(m, p);
  detail::KahanSum acc;
  const int upper_terms = m - ell;
  if (upper_terms <= ell + 1) {
    for (int k = m; k > ell; --k) acc.add(pmf[static_cast<std::size_t>(k)]);
    return std::min(1.0, acc.sum);
  }
  for (int k = 0; k <= ell; ++k) acc.add(pmf[static_cast<std::size_t>(k)]);
  return std::clamp(1.0 - acc.sum, 0.0, 1.0);
}

/// Exact total-variation distance between Bin(m, p) and Bin(m, q).
inline double binom_tv(int m, double p, double q) {
  const std::vector<double> pmf_p = binom_pmf_table(m, p);
  const std::vector<double> pmf_q = binom_pmf_table(m, q);
  detail::KahanSum acc;
  for (std::size_t k = 0; k < pmf_p.size(); ++k) acc.add(std::fabs(pmf_p[k] - pmf_q[k]));
  return std::min(1.0, 0.5 * acc.sum);
}

/// The envelope K = min(m|p-q|, sqrt(m)|p-q|/sqrt(p(1-p)), 1) sandwiching the
/// binomial total-variation distance between K/700 and K. Note the asymmetry:
/// the variance term uses p, not q.
inline double binom_tv_bound(int m, double p, double q) {
  const double diff = std::fabs(p - q);
  double k = std::min(static_cast<double>(m) * diff, 1.0);
  const double var = p * (1.0 - p);
  if (var > 0.0) {
    k = std::min(k, std::sqrt(static_cast<double>(m)) * diff / std::sqrt(var));
  }
  return k;
}

/// Best tail cut separating Bin(m, p) from Bin(m, q), p <= q: the ell in
/// {-1, ..., m-1} maximizing Pr[Bin(m,q) > ell] - Pr[Bin(m,p) > ell], found by
/// exhaustive search over all m+1 cuts. Fails with an InfeasibilityError
/// naming the achieved maximum when it falls short of `required_gap`.
inline BinomialSplit find_separating_threshold(int m, double p, double q,
                                               double required_gap) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("find_separating_threshold: p, q must lie in [0, 1]");
  }
  if (p > q) throw std::invalid_argument("find_separating_threshold: requires p <= q");
  const std::vector<double> pmf_p = binom_pmf_table(m, p);
  const std::vector<double> pmf_q = binom_pmf_table(m, q);
  // Suffix sums give every tail in one pass; gap(-1) is always 0.
  int best_ell = -1;
  double best_gap = 0.0;
  detail::KahanSum tail_p;
  detail::KahanSum tail_q;
  for (int ell = m - 1; ell >= 0; --ell) {
    tail_p.add(pmf_p[static_cast<std::size_t>(ell) + 1]);
    tail_q.add(pmf_q[static_cast<std::size_t>(ell) + 1]);
    const double gap = tail_q.sum - tail_p.sum;
    if (gap > best_gap) {
      best_gap = gap;
      best_ell = ell;
    }
  }
  if (best_gap < required_gap) {
    throw InfeasibilityError(
        "find_separating_threshold: best achievable tail gap " + std::to_string(best_gap) +
            " is below the required " + std::to_string(required_gap) + " (m=" +
            std::to_string(m) + ", p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")",
        best_gap, required_gap);
  }
  return BinomialSplit{best_ell, best_gap, binom_tv_bound(m, p, q)};
}

/// Mistake threshold t separating Bin(m, eta_hat + alpha/6) from
/// Bin(m, eta_hat + alpha/3), with required gap sqrt(m) * alpha / gap_constant.
/// Both probabilities are clamped to 1; if clamping collapses them the
/// underlying search reports infeasibility.
inline BinomialSplit choose_t(int m, double eta_hat, double alpha, double gap_constant) {
  if (!(eta_hat >= 0.0)) throw std::invalid_argument("choose_t: eta_hat must be nonnegative");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("choose_t: alpha must lie in (0, 1]");
  }
  if (!(gap_constant > 0.0)) {
    throw std::invalid_argument("choose_t: gap_constant must be positive");
  }
  const double p = std::min(eta_hat + alpha / 6.0, 1.0);
  const double q = std::min(eta_hat + alpha / 3.0, 1.0);
  const double required = std::sqrt(static_cast<double>(m)) * alpha / gap_constant;
  return find_separating_threshold(m, p, q, required);
}

/// Disagreement threshold s = 0, verified to satisfy
/// Pr[Bin(m, alpha/3) > 0] >= sqrt(m) * alpha / 2100 rather than trusted.
/// The baseline term Pr[Bin(m, 0) > 0] is identically zero.
inline BinomialSplit choose_s(int m, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("choose_s: alpha must lie in (0, 1]");
  }
  const double required = std::sqrt(static_cast<double>(m)) * alpha / 2100.0;
  const double achieved = binom_tail(m, alpha / 3.0, 0);
  if (achieved < required) {
    throw InfeasibilityError("choose_s: Pr[Bin(m, alpha/3) > 0] = " + std::to_string(achieved) +
                                 " is below the required gap " + std::to_string(required),
                             achieved, required);
  }
  return BinomialSplit{0, achieved, binom_tv_bound(m, 0.0, alpha / 3.0)};
}

}  // namespace dplearn

#endif  // DPLEARN_BINOMIAL_HPP_
