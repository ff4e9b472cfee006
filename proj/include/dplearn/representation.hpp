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

#ifndef DPLEARN_REPRESENTATION_HPP_
#define DPLEARN_REPRESENTATION_HPP_

#include <cmath>
#include <functional>
#include <utility>

#include "dplearn/model.hpp"
#include "dplearn/random.hpp"

namespace dplearn {

/// A probabilistic representation: a seeded sampler of finite hypothesis
/// classes, declared to place a hypothesis alpha-close to any concept with
/// probability 1 - beta. `size_bound` caps ln|H| over the sampler's support
/// and is enforced on every draw.
///
/// The learners accept any Representation; callers supply one appropriate for
/// their class (for thresholds the trivial representation below already has
/// size ln(|X|+1), the optimal order).
class Representation {
 public:
  using Sampler = std::function<HypothesisClass(RandomStream&)>;

  Representation(Sampler sampler, double size_bound, double alpha, double beta)
      : sampler_(std::move(sampler)), size_bound_(size_bound), alpha_(alpha), beta_(beta) {
    if (!sampler_) throw std::invalid_argument("Representation: sampler required");
    if (!(size_bound_ >= 0.0)) {
      throw std::invalid_argument("Representation: size bound must be nonnegative");
    }
    if (!(alpha_ >= 0.0 && beta_ >= 0.0)) {
      throw std::invalid_argument("Representation: alpha, beta must be nonnegative");
    }
  }

  /// One class draw; deterministic given the stream state.
  HypothesisClass sample(RandomStream& rng) const {
    HypothesisClass drawn = sampler_(rng);
    if (std::log(static_cast<double>(drawn.size())) > size_bound_ + 1e-9) {
      throw std::invalid_argument("Representation: sampled class exceeds declared size bound");
    }
    return drawn;
  }

  double size_bound() const { return size_bound_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  Sampler sampler_;
  double size_bound_;
  double alpha_;
  double beta_;
};

inline HypothesisClass sample_class(const Representation& rep, RandomStream& rng) {
  return rep.sample(rng);
}

/// The deterministic (0, 0)-representation that always returns the class
/// itself; size bound ln|C|.
inline Representation trivial_representation(const HypothesisClass& cls) {
  const double bound = std::log(static_cast<double>(cls.size()));
  return Representation([cls](RandomStream&) { return cls; }, bound, 0.0, 0.0);
}

}  // namespace dplearn

#endif  // DPLEARN_REPRESENTATION_HPP_
