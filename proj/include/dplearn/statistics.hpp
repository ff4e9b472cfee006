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

#ifndef DPLEARN_STATISTICS_HPP_
#define DPLEARN_STATISTICS_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "dplearn/binomial.hpp"
#include "dplearn/model.hpp"
#include "dplearn/random.hpp"

namespace dplearn {

// All empirical statistics are exact integer counts; rates divide once at the
// end. Nothing in this header accumulates floating point over examples.

struct CountRate {
  int64_t count = 0;
  double rate = 0.0;
};

namespace detail {

inline void require_over_domain(const Hypothesis& h, const Domain& d, const char* who) {
  if (!h.valid_over(d)) {
    throw std::invalid_argument(std::string(who) + ": hypothesis does not match domain");
  }
}

/// Examples grouped by point value (counting sort); the backbone of every
/// O(n*m + |X|) threshold sweep below.
struct XBuckets {
  std::vector<int64_t> start;  // size |X|+2; examples at x occupy [start[x], start[x+1])
  std::vector<int32_t> user;
  std::vector<uint8_t> label;
};

template <typename LabelFn>
XBuckets bucket_by_point(const UserDataset& z, LabelFn label_of) {
  const int64_t domain_size = z.domain().size;
  XBuckets b;
  b.start.assign(static_cast<std::size_t>(domain_size) + 2, 0);
  for (const LabeledExample& e : z.all()) b.start[static_cast<std::size_t>(e.x) + 1]++;
  for (std::size_t x = 1; x < b.start.size(); ++x) b.start[x] += b.start[x - 1];
  b.user.resize(static_cast<std::size_t>(z.total_examples()));
  b.label.resize(b.user.size());
  std::vector<int64_t> cursor(b.start.begin(), b.start.end() - 1);
  const int64_t m = z.examples_per_user();
  int64_t index = 0;
  for (const LabeledExample& e : z.all()) {
    const int64_t slot = cursor[static_cast<std::size_t>(e.x)]++;
    b.user[static_cast<std::size_t>(slot)] = static_cast<int32_t>(index / m);
    b.label[static_cast<std::size_t>(slot)] = label_of(e) ? 1 : 0;
    ++index;
  }
  return b;
}

/// For every u in [0, |X|]: the total number of examples on which f_u
/// disagrees with the example's binary label. At u = 0 the prediction is 1
/// everywhere; raising u past x flips that example's prediction to 0.
template <typename LabelFn>
std::vector<int64_t> threshold_mismatch_totals(const UserDataset& z, LabelFn label_of) {
  const int64_t domain_size = z.domain().size;
  const XBuckets b = bucket_by_point(z, label_of);
  std::vector<int64_t> out(static_cast<std::size_t>(domain_size) + 1, 0);
  int64_t mismatches = 0;
  for (uint8_t lbl : b.label) mismatches += (lbl == 0);
  out[0] = mismatches;
  for (int64_t x = 1; x <= domain_size; ++x) {
    for (int64_t i = b.start[static_cast<std::size_t>(x)];
         i < b.start[static_cast<std::size_t>(x) + 1]; ++i) {
      mismatches += b.label[static_cast<std::size_t>(i)] ? 1 : -1;
    }
    out[static_cast<std::size_t>(x)] = mismatches;
  }
  return out;
}

/// User-level companion: for every u, the number of users whose per-user
/// mismatch count against f_u strictly exceeds `bound`.
template <typename LabelFn>
std::vector<int64_t> threshold_user_mismatch_gt(const UserDataset& z, LabelFn label_of,
                                                int bound) {
  const int64_t domain_size = z.domain().size;
  const int64_t n = z.user_count();
  const XBuckets b = bucket_by_point(z, label_of);
  std::vector<int32_t> per_user(static_cast<std::size_t>(n), 0);
  for (int64_t i = 0; i < n; ++i) {
    int32_t mism = 0;
    for (const LabeledExample& e : z.user(i)) mism += label_of(e) ? 0 : 1;
    per_user[static_cast<std::size_t>(i)] = mism;
  }
  int64_t over = 0;
  for (int32_t c : per_user) over += (c > bound);
  std::vector<int64_t> out(static_cast<std::size_t>(domain_size) + 1, 0);
  out[0] = over;
  for (int64_t x = 1; x <= domain_size; ++x) {
    for (int64_t i = b.start[static_cast<std::size_t>(x)];
         i < b.start[static_cast<std::size_t>(x) + 1]; ++i) {
      int32_t& c = per_user[static_cast<std::size_t>(b.user[static_cast<std::size_t>(i)])];
      if (b.label[static_cast<std::size_t>(i)]) {
        ++c;
        if (c == bound + 1) ++over;
      } else {
        if (c == bound + 1) --over;
        --c;
      }
    }
    out[static_cast<std::size_t>(x)] = over;
  }
  return out;
}

}  // namespace detail

inline CountRate empirical_error(const UserDataset& z, const Hypothesis& h) {
  detail::require_over_domain(h, z.domain(), "empirical_error");
  int64_t count = 0;
  for (const LabeledExample& e : z.all()) count += (h(e.x) != (e.y != 0));
  return CountRate{count, static_cast<double>(count) / static_cast<double>(z.total_examples())};
}

inline CountRate empirical_disagreement(const UserDataset& z, const Hypothesis& c,
                                        const Hypothesis& h) {
  detail::require_over_domain(c, z.domain(), "empirical_disagreement");
  detail::require_over_domain(h, z.domain(), "empirical_disagreement");
  int64_t count = 0;
  for (const LabeledExample& e : z.all()) count += (c(e.x) != h(e.x));
  return CountRate{count, static_cast<double>(count) / static_cast<double>(z.total_examples())};
}

/// Fraction of users on whose examples `c` makes more than t mistakes.
inline CountRate user_error(const UserDataset& z, const Hypothesis& c, int t) {
  detail::require_over_domain(c, z.domain(), "user_error");
  if (t < 0 || t > z.examples_per_user()) {
    throw std::invalid_argument("user_error: t must lie in [0, m]");
  }
  int64_t count = 0;
  for (int64_t i = 0; i < z.user_count(); ++i) {
    int64_t mistakes = 0;
    for (const LabeledExample& e : z.user(i)) mistakes += (c(e.x) != (e.y != 0));
    count += (mistakes > t);
  }
  return CountRate{count, static_cast<double>(count) / static_cast<double>(z.user_count())};
}

inline CountRate user_disagreement(const UserDataset& z, const Hypothesis& c,
                                   const Hypothesis& h, int s) {
  detail::require_over_domain(c, z.domain(), "user_disagreement");
  detail::require_over_domain(h, z.domain(), "user_disagreement");
  if (s < 0 || s > z.examples_per_user()) {
    throw std::invalid_argument("user_disagreement: s must lie in [0, m]");
  }
  int64_t count = 0;
  for (int64_t i = 0; i < z.user_count(); ++i) {
    int64_t differs = 0;
    for (const LabeledExample& e : z.user(i)) differs += (c(e.x) != h(e.x));
    count += (differs > s);
  }
  return CountRate{count, static_cast<double>(count) / static_cast<double>(z.user_count())};
}

inline double population_error(const DiscreteJointDistribution& d, const Hypothesis& h) {
  detail::require_over_domain(h, d.domain(), "population_error");
  double sum = 0.0;
  double carry = 0.0;
  for (int64_t x = 1; x <= d.domain().size; ++x) {
    const double p = d.prob(x, h(x) ? 0 : 1);
    const double y = p - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

inline double population_disagreement(const DiscreteJointDistribution& d, const Hypothesis& c,
                                      const Hypothesis& h) {
  detail::require_over_domain(c, d.domain(), "population_disagreement");
  detail::require_over_domain(h, d.domain(), "population_disagreement");
  double sum = 0.0;
  double carry = 0.0;
  for (int64_t x = 1; x <= d.domain().size; ++x) {
    if (c(x) == h(x)) continue;
    const double y = d.marginal_x(x) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

/// Pr over a fresh user of m i.i.d. draws that `c` makes more than t mistakes;
/// the per-user mistake count is Bin(m, err_D(c)) exactly.
inline double population_user_error(const DiscreteJointDistribution& d, const Hypothesis& c,
                                    int t, int m) {
  if (t < 0 || t > m) throw std::invalid_argument("population_user_error: t must lie in [0, m]");
  return binom_tail(m, population_error(d, c), t);
}

inline double population_user_disagreement(const DiscreteJointDistribution& d,
                                           const Hypothesis& c, const Hypothesis& h, int s,
                                           int m) {
  if (s < 0 || s > m) {
    throw std::invalid_argument("population_user_disagreement: s must lie in [0, m]");
  }
  return binom_tail(m, population_disagreement(d, c, h), s);
}

/// err_D(f_u) for every u in [0, |X|], via prefix sums over the exact table.
inline std::vector<double> threshold_population_errors(const DiscreteJointDistribution& d) {
  const int64_t domain_size = d.domain().size;
  std::vector<double> errs(static_cast<std::size_t>(domain_size) + 1);
  double total_zero = 0.0;
  for (int64_t x = 1; x <= domain_size; ++x) total_zero += d.prob(x, 0);
  // f_0 predicts 1 everywhere, so its mistakes are exactly the mass of y = 0.
  double prefix_ones = 0.0;
  double prefix_zeros = 0.0;
  errs[0] = total_zero;
  for (int64_t u = 1; u <= domain_size; ++u) {
    prefix_ones += d.prob(u, 1);
    prefix_zeros += d.prob(u, 0);
    errs[static_cast<std::size_t>(u)] = prefix_ones + (total_zero - prefix_zeros);
  }
  return errs;
}

// Threshold-class sweeps: each returns a vector indexed by u in [0, |X|] and
// costs O(n*m + |X|) total.

inline std::vector<int64_t> threshold_error_counts(const UserDataset& z) {
  return detail::threshold_mismatch_totals(z, [](const LabeledExample& e) { return e.y != 0; });
}

inline std::vector<int64_t> threshold_disagreement_counts(const UserDataset& z,
                                                          const Hypothesis& h) {
  detail::require_over_domain(h, z.domain(), "threshold_disagreement_counts");
  return detail::threshold_mismatch_totals(z, [&h](const LabeledExample& e) { return h(e.x); });
}

inline std::vector<int64_t> threshold_user_error_counts(const UserDataset& z, int t) {
  if (t < 0 || t > z.examples_per_user()) {
    throw std::invalid_argument("threshold_user_error_counts: t must lie in [0, m]");
  }
  return detail::threshold_user_mismatch_gt(
      z, [](const LabeledExample& e) { return e.y != 0; }, t);
}

inline std::vector<int64_t> threshold_user_disagreement_counts(const UserDataset& z,
                                                               const Hypothesis& h, int s) {
  detail::require_over_domain(h, z.domain(), "threshold_user_disagreement_counts");
  if (s < 0 || s > z.examples_per_user()) {
    throw std::invalid_argument("threshold_user_disagreement_counts: s must lie in [0, m]");
  }
  return detail::threshold_user_mismatch_gt(
      z, [&h](const LabeledExample& e) { return h(e.x); }, s);
}

/// min over the class of the number of users with more than t mistakes.
inline int64_t min_user_error_count(const UserDataset& z, const HypothesisClass& cls, int t) {
  if (!(cls.domain() == z.domain())) {
    throw std::invalid_argument("min_user_error_count: class/dataset domain mismatch");
  }
  if (cls.all_threshold_members()) {
    const std::vector<int64_t> counts = threshold_user_error_counts(z, t);
    int64_t best = std::numeric_limits<int64_t>::max();
    for (const Hypothesis& c : cls.members()) {
      best = std::min(best, counts[static_cast<std::size_t>(c.threshold_value())]);
    }
    return best;
  }
  int64_t best = std::numeric_limits<int64_t>::max();
  for (const Hypothesis& c : cls.members()) best = std::min(best, user_error(z, c, t).count);
  return best;
}

/// The surrogate score q(z, h) = min_c err_z(c) + dis_x(c, h): the witness is
/// the minimizing class index (ties to the lowest), and the integer counts of
/// the minimizer are kept so sensitivity checks can stay in exact arithmetic.
struct SurrogateScore {
  double value = 0.0;
  int64_t err_count = 0;
  int64_t dis_count = 0;
  std::size_t witness = 0;
};

/// Shared-precomputation scorer for the item-level surrogate. For a class
/// whose members are all thresholds, one error sweep plus one prefix table
/// make each candidate O(|C|) instead of O(|C| * n * m).
class SurrogateScorer {
 public:
  SurrogateScorer(const UserDataset& z, const HypothesisClass& cls) : z_(z), cls_(cls) {
    if (!(cls.domain() == z.domain())) {
      throw std::invalid_argument("SurrogateScorer: class/dataset domain mismatch");
    }
    if (cls_.all_threshold_members()) {
      error_counts_ = threshold_error_counts(z_);
      // prefix_[u] = number of examples with x <= u
      prefix_.assign(static_cast<std::size_t>(z_.domain().size) + 1, 0);
      for (const LabeledExample& e : z_.all()) prefix_[static_cast<std::size_t>(e.x)]++;
      for (std::size_t u = 1; u < prefix_.size(); ++u) prefix_[u] += prefix_[u - 1];
    } else {
      member_error_counts_.reserve(cls_.size());
      for (const Hypothesis& c : cls_.members()) {
        member_error_counts_.push_back(empirical_error(z_, c).count);
      }
    }
  }

  SurrogateScore score(const Hypothesis& h) const {
    detail::require_over_domain(h, z_.domain(), "SurrogateScorer::score");
    SurrogateScore best;
    int64_t best_total = std::numeric_limits<int64_t>::max();
    if (cls_.all_threshold_members()) {
      std::vector<int64_t> dis;
      int64_t h_prefix_hits = -1;  // threshold candidate: dis via example prefix counts
      if (h.is_threshold()) h_prefix_hits = prefix_[static_cast<std::size_t>(h.threshold_value())];
      if (!h.is_threshold()) dis = threshold_disagreement_counts(z_, h);
      for (std::size_t i = 0; i < cls_.size(); ++i) {
        const int64_t u = cls_[i].threshold_value();
        const int64_t err = error_counts_[static_cast<std::size_t>(u)];
        const int64_t dis_count =
            h.is_threshold()
                ? std::abs(h_prefix_hits - prefix_[static_cast<std::size_t>(u)])
                : dis[static_cast<std::size_t>(u)];
        if (err + dis_count < best_total) {
          best_total = err + dis_count;
          best = SurrogateScore{0.0, err, dis_count, i};
        }
      }
    } else {
      for (std::size_t i = 0; i < cls_.size(); ++i) {
        const int64_t err = member_error_counts_[i];
        const int64_t dis_count = empirical_disagreement(z_, cls_[i], h).count;
        if (err + dis_count < best_total) {
          best_total = err + dis_count;
          best = SurrogateScore{0.0, err, dis_count, i};
        }
      }
    }
    best.value = static_cast<double>(best_total) / static_cast<double>(z_.total_examples());
    return best;
  }

 private:
  const UserDataset& z_;
  const HypothesisClass& cls_;
  std::vector<int64_t> error_counts_;
  std::vector<int64_t> prefix_;
  std::vector<int64_t> member_error_counts_;
};

/// User-level surrogate q(z, h) = min_c err^t_z(c) + dis^s_x(c, h).
class UserSurrogateScorer {
 public:
  UserSurrogateScorer(const UserDataset& z, const HypothesisClass& cls,
                      const UserErrorParams& params)
      : z_(z), cls_(cls), params_(params) {
    if (!(cls.domain() == z.domain())) {
      throw std::invalid_argument("UserSurrogateScorer: class/dataset domain mismatch");
    }
    if (cls_.all_threshold_members()) {
      user_error_counts_ = threshold_user_error_counts(z_, params_.t);
    } else {
      member_error_counts_.reserve(cls_.size());
      for (const Hypothesis& c : cls_.members()) {
        member_error_counts_.push_back(user_error(z_, c, params_.t).count);
      }
    }
  }

  SurrogateScore score(const Hypothesis& h) const {
    detail::require_over_domain(h, z_.domain(), "UserSurrogateScorer::score");
    SurrogateScore best;
    int64_t best_total = std::numeric_limits<int64_t>::max();
    if (cls_.all_threshold_members()) {
      const std::vector<int64_t> dis = threshold_user_disagreement_counts(z_, h, params_.s);
      for (std::size_t i = 0; i < cls_.size(); ++i) {
        const int64_t u = cls_[i].threshold_value();
        const int64_t err = user_error_counts_[static_cast<std::size_t>(u)];
        const int64_t dis_count = dis[static_cast<std::size_t>(u)];
        if (err + dis_count < best_total) {
          best_total = err + dis_count;
          best = SurrogateScore{0.0, err, dis_count, i};
        }
      }
    } else {
      for (std::size_t i = 0; i < cls_.size(); ++i) {
        const int64_t err = member_error_counts_[i];
        const int64_t dis_count = user_disagreement(z_, cls_[i], h, params_.s).count;
        if (err + dis_count < best_total) {
          best_total = err + dis_count;
          best = SurrogateScore{0.0, err, dis_count, i};
        }
      }
    }
    best.value = static_cast<double>(best_total) / static_cast<double>(z_.user_count());
    return best;
  }

 private:
  const UserDataset& z_;
  const HypothesisClass& cls_;
  UserErrorParams params_;
  std::vector<int64_t> user_error_counts_;
  std::vector<int64_t> member_error_counts_;
};

inline SurrogateScore surrogate_score(const UserDataset& z, const HypothesisClass& cls,
                                      const Hypothesis& h) {
  return SurrogateScorer(z, cls).score(h);
}

inline SurrogateScore user_surrogate_score(const UserDataset& z, const HypothesisClass& cls,
                                           const Hypothesis& h, const UserErrorParams& params) {
  return UserSurrogateScorer(z, cls, params).score(h);
}

inline std::vector<double> surrogate_scores(const UserDataset& z, const HypothesisClass& cls,
                                            const HypothesisClass& candidates) {
  const SurrogateScorer scorer(z, cls);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const Hypothesis& h : candidates.members()) out.push_back(scorer.score(h).value);
  return out;
}

inline std::vector<double> user_surrogate_scores(const UserDataset& z,
                                                 const HypothesisClass& cls,
                                                 const HypothesisClass& candidates,
                                                 const UserErrorParams& params) {
  const UserSurrogateScorer scorer(z, cls, params);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const Hypothesis& h : candidates.members()) out.push_back(scorer.score(h).value);
  return out;
}

/// For every u in [l, r]: how many users hold more than s examples in
/// [l, u-1] (left) and in [u+1, r] (right). Used by the median-selection score.
struct IntervalUserCounts {
  std::vector<int64_t> left;
  std::vector<int64_t> right;
};

inline IntervalUserCounts interval_user_counts(const UserDataset& z, int64_t l, int64_t r,
                                               int s) {
  if (l > r || l < 0 || r > z.domain().size) {
    throw std::invalid_argument("interval_user_counts: invalid range");
  }
  if (s < 0) throw std::invalid_argument("interval_user_counts: s must be nonnegative");
  const detail::XBuckets b =
      detail::bucket_by_point(z, [](const LabeledExample&) { return false; });
  const std::size_t width = static_cast<std::size_t>(r - l) + 1;
  IntervalUserCounts out;
  out.left.assign(width, 0);
  out.right.assign(width, 0);
  std::vector<int32_t> per_user(static_cast<std::size_t>(z.user_count()), 0);
  int64_t over = 0;
  // Left: the interval [l, u-1] gains the point u-1 as u advances.
  for (int64_t u = l + 1; u <= r; ++u) {
    const int64_t x = u - 1;
    if (x >= 1) {
      for (int64_t i = b.start[static_cast<std::size_t>(x)];
           i < b.start[static_cast<std::size_t>(x) + 1]; ++i) {
        int32_t& c = per_user[static_cast<std::size_t>(b.user[static_cast<std::size_t>(i)])];
        ++c;
        if (c == s + 1) ++over;
      }
    }
    out.left[static_cast<std::size_t>(u - l)] = over;
  }
  std::fill(per_user.begin(), per_user.end(), 0);
  over = 0;
  // Right: the interval [u+1, r] gains the point u+1 as u retreats.
  for (int64_t u = r - 1; u >= l; --u) {
    const int64_t x = u + 1;
    for (int64_t i = b.start[static_cast<std::size_t>(x)];
         i < b.start[static_cast<std::size_t>(x) + 1]; ++i) {
      int32_t& c = per_user[static_cast<std::size_t>(b.user[static_cast<std::size_t>(i)])];
      ++c;
      if (c == s + 1) ++over;
    }
    out.right[static_cast<std::size_t>(u - l)] = over;
  }
  return out;
}

/// n*m i.i.d. draws from D, grouped into users; deterministic given the seed.
inline UserDataset sample_dataset(const DiscreteJointDistribution& d, int64_t n, int64_t m,
                                  RandomStream& rng) {
  if (n < 1 || m < 1) throw std::invalid_argument("sample_dataset: need n, m >= 1");
  std::vector<LabeledExample> entries;
  entries.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
  for (int64_t i = 0; i < n * m; ++i) {
    const auto [x, y] = d.sample(rng);
    entries.push_back(LabeledExample{x, y});
  }
  return UserDataset(d.domain(), n, m, std::move(entries));
}

}  // namespace dplearn

#endif  // DPLEARN_STATISTICS_HPP_
