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

#ifndef DPLEARN_MODEL_HPP_
#define DPLEARN_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dplearn/random.hpp"

namespace dplearn {

/// Finite domain X = {1, ..., size}.
struct Domain {
  explicit Domain(int64_t size_in) : size(size_in) {
    if (size < 1) throw std::invalid_argument("Domain: size must be at least 1");
  }
  bool contains(int64_t x) const { return x >= 1 && x <= size; }
  friend bool operator==(const Domain& a, const Domain& b) { return a.size == b.size; }

  int64_t size;
};

/// A {0,1}-valued function on the domain: either a threshold f_u (1 iff x > u)
/// or an explicit bit table. Thresholds keep the parametric form so evaluation
/// is O(1) and dataset-wide statistics can use prefix sweeps.
class Hypothesis {
 public:
  static Hypothesis threshold(int64_t u) {
    Hypothesis h;
    h.threshold_u_ = u;
    h.is_threshold_ = true;
    return h;
  }

  static Hypothesis table(std::vector<uint8_t> bits) {
    if (bits.empty()) throw std::invalid_argument("Hypothesis: empty bit table");
    for (uint8_t b : bits) {
      if (b > 1) throw std::invalid_argument("Hypothesis: table entries must be 0 or 1");
    }
    Hypothesis h;
    h.bits_ = std::move(bits);
    return h;
  }

  bool operator()(int64_t x) const {
    if (is_threshold_) return x > threshold_u_;
    if (x < 1 || static_cast<std::size_t>(x) > bits_.size()) {
      throw std::invalid_argument("Hypothesis: point outside table domain");
    }
    return bits_[static_cast<std::size_t>(x) - 1] != 0;
  }

  bool is_threshold() const { return is_threshold_; }
  int64_t threshold_value() const {
    if (!is_threshold_) throw std::invalid_argument("Hypothesis: not a threshold");
    return threshold_u_;
  }

  bool valid_over(const Domain& domain) const {
    if (is_threshold_) return threshold_u_ >= 0 && threshold_u_ <= domain.size;
    return static_cast<int64_t>(bits_.size()) == domain.size;
  }

  std::string id() const {
    if (is_threshold_) return "u=" + std::to_string(threshold_u_);
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the bit table
    for (uint8_t b : bits_) h = (h ^ b) * 0x100000001b3ULL;
    std::ostringstream out;
    out << "table:" << std::hex << h;
    return out.str();
  }

 private:
  Hypothesis() = default;
  bool is_threshold_ = false;
  int64_t threshold_u_ = 0;
  std::vector<uint8_t> bits_;
};

/// A finite, nonempty collection of hypotheses over one domain.
class HypothesisClass {
 public:
  HypothesisClass(Domain domain, std::vector<Hypothesis> members)
      : domain_(domain), members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("HypothesisClass: empty class");
    all_thresholds_ = true;
    for (const Hypothesis& h : members_) {
      if (!h.valid_over(domain_)) {
        throw std::invalid_argument("HypothesisClass: member invalid over domain");
      }
      all_thresholds_ = all_thresholds_ && h.is_threshold();
    }
  }

  /// The full threshold class {f_0, ..., f_|X|}; member index equals u.
  static HypothesisClass all_thresholds(Domain domain) {
    std::vector<Hypothesis> members;
    members.reserve(static_cast<std::size_t>(domain.size) + 1);
    for (int64_t u = 0; u <= domain.size; ++u) members.push_back(Hypothesis::threshold(u));
    return HypothesisClass(domain, std::move(members));
  }

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return members_.size(); }
  const Hypothesis& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Hypothesis>& members() const { return members_; }
  bool all_threshold_members() const { return all_thresholds_; }

 private:
  Domain domain_;
  std::vector<Hypothesis> members_;
  bool all_thresholds_ = false;
};

struct LabeledExample {
  int64_t x = 0;
  uint8_t y = 0;
  friend bool operator==(const LabeledExample& a, const LabeledExample& b) {
    return a.x == b.x && a.y == b.y;
  }
};

/// n users with exactly m labeled examples each, stored user-major.
class UserDataset {
 public:
  UserDataset(Domain domain, int64_t n, int64_t m, std::vector<LabeledExample> entries)
      : domain_(domain), n_(n), m_(m), entries_(std::move(entries)) {
    if (n_ < 1 || m_ < 1) {
      throw std::invalid_argument("UserDataset: need at least one user and one example");
    }
    if (entries_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(m_)) {
      throw std::invalid_argument("UserDataset: entry count must equal n*m");
    }
    for (const LabeledExample& e : entries_) {
      if (!domain_.contains(e.x)) {
        throw std::invalid_argument("UserDataset: point outside domain");
      }
      if (e.y > 1) throw std::invalid_argument("UserDataset: label must be 0 or 1");
    }
  }

  const Domain& domain() const { return domain_; }
  int64_t user_count() const { return n_; }
  int64_t examples_per_user() const { return m_; }
  int64_t total_examples() const { return n_ * m_; }

  std::span<const LabeledExample> user(int64_t i) const {
    return std::span<const LabeledExample>(entries_)
        .subspan(static_cast<std::size_t>(i) * static_cast<std::size_t>(m_),
                 static_cast<std::size_t>(m_));
  }
  std::span<const LabeledExample> all() const { return entries_; }

  /// Keeps only the first `new_m` examples of every user.
  UserDataset truncated(int64_t new_m) const {
    if (new_m < 1 || new_m > m_) {
      throw std::invalid_argument("UserDataset::truncated: invalid target size");
    }
    if (new_m == m_) return *this;
    std::vector<LabeledExample> kept;
    kept.reserve(static_cast<std::size_t>(n_) * static_cast<std::size_t>(new_m));
    for (int64_t i = 0; i < n_; ++i) {
      const auto block = user(i);
      kept.insert(kept.end(), block.begin(), block.begin() + new_m);
    }
    return UserDataset(domain_, n_, new_m, std::move(kept));
  }

  /// Swap-neighbor construction: replaces user i's whole block.
  UserDataset with_user_replaced(int64_t i, std::span<const LabeledExample> block) const {
    if (i < 0 || i >= n_) throw std::invalid_argument("with_user_replaced: bad user index");
    if (static_cast<int64_t>(block.size()) != m_) {
      throw std::invalid_argument("with_user_replaced: block must have m examples");
    }
    std::vector<LabeledExample> entries = entries_;
    std::copy(block.begin(), block.end(),
              entries.begin() + static_cast<std::size_t>(i) * static_cast<std::size_t>(m_));
    return UserDataset(domain_, n_, m_, std::move(entries));
  }

  /// Line-oriented text form: one user per line, comma-separated "x:y" pairs.
  std::string serialize() const {
    std::ostringstream out;
    for (int64_t i = 0; i < n_; ++i) {
      const auto block = user(i);
      for (int64_t j = 0; j < m_; ++j) {
        if (j > 0) out << ',';
        out << block[static_cast<std::size_t>(j)].x << ':'
            << static_cast<int>(block[static_cast<std::size_t>(j)].y);
      }
      out << '\n';
    }
    return out.str();
  }

  static UserDataset parse(Domain domain, const std::string& text) {
    std::vector<LabeledExample> entries;
    int64_t n = 0;
    int64_t m = -1;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) throw std::invalid_argument("UserDataset::parse: empty user line");
      int64_t count = 0;
      std::istringstream fields(line);
      std::string field;
      while (std::getline(fields, field, ',')) {
        const std::size_t colon = field.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 >= field.size()) {
          throw std::invalid_argument("UserDataset::parse: malformed pair '" + field + "'");
        }
        std::size_t used = 0;
        const int64_t x = std::stoll(field.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("UserDataset::parse: bad point");
        const std::string label = field.substr(colon + 1);
        if (label != "0" && label != "1") {
          throw std::invalid_argument("UserDataset::parse: label must be 0 or 1");
        }
        entries.push_back(LabeledExample{x, static_cast<uint8_t>(label == "1" ? 1 : 0)});
        ++count;
      }
      if (m < 0) {
        m = count;
      } else if (count != m) {
        throw std::invalid_argument("UserDataset::parse: users must have equal example counts");
      }
      ++n;
    }
    if (n == 0) throw std::invalid_argument("UserDataset::parse: no users");
    return UserDataset(domain, n, m, std::move(entries));
  }

  friend bool operator==(const UserDataset& a, const UserDataset& b) {
    return a.domain_ == b.domain_ && a.n_ == b.n_ && a.m_ == b.m_ && a.entries_ == b.entries_;
  }

 private:
  Domain domain_;
  int64_t n_;
  int64_t m_;
  std::vector<LabeledExample> entries_;
};

/// Exact probability table over X x {0,1}; the source of every exact
/// generalization-error oracle. prob(x, y) is stored at index 2*(x-1) + y.
class DiscreteJointDistribution {
 public:
  DiscreteJointDistribution(Domain domain, std::vector<double> probs)
      : domain_(domain), probs_(std::move(probs)) {
    if (probs_.size() != 2 * static_cast<std::size_t>(domain_.size)) {
      throw std::invalid_argument("DiscreteJointDistribution: table must have 2|X| entries");
    }
    double total = 0.0;
    double carry = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0)) {
        throw std::invalid_argument("DiscreteJointDistribution: negative probability");
      }
      const double y = p - carry;
      const double t = total + y;
      carry = (t - total) - y;
      total = t;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("DiscreteJointDistribution: entries must sum to 1");
    }
    cumulative_.resize(probs_.size());
    double running = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      running += probs_[i];
      cumulative_[i] = running;
    }
    cumulative_.back() = 1.0;
  }

  const Domain& domain() const { return domain_; }

  double prob(int64_t x, uint8_t y) const {
    if (!domain_.contains(x) || y > 1) {
      throw std::invalid_argument("DiscreteJointDistribution::prob: invalid point");
    }
    return probs_[index(x, y)];
  }

  double marginal_x(int64_t x) const { return prob(x, 0) + prob(x, 1); }

  /// Exact mass of {x : lo <= x <= hi} under the marginal; empty ranges are 0.
  double interval_mass(int64_t lo, int64_t hi) const {
    lo = std::max<int64_t>(lo, 1);
    hi = std::min<int64_t>(hi, domain_.size);
    double mass = 0.0;
    double carry = 0.0;
    for (int64_t x = lo; x <= hi; ++x) {
      const double y = marginal_x(x) - carry;
      const double t = mass + y;
      carry = (t - mass) - y;
      mass = t;
    }
    return mass;
  }

  std::pair<int64_t, uint8_t> sample(RandomStream& rng) const {
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i >= probs_.size()) i = probs_.size() - 1;
    return {static_cast<int64_t>(i / 2) + 1, static_cast<uint8_t>(i % 2)};
  }

 private:
  std::size_t index(int64_t x, uint8_t y) const {
    return 2 * (static_cast<std::size_t>(x) - 1) + y;
  }

  Domain domain_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// The user-level mistake/disagreement thresholds (t, s) together with the
/// binomial tail gaps that back them.
struct UserErrorParams {
  int t = 0;
  int s = 0;
  double gap_t = 0.0;
  double gap_s = 0.0;
};

}  // namespace dplearn

#endif  // DPLEARN_MODEL_HPP_
