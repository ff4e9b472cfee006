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

#include "dplearn/representation.hpp"

#include <cmath>
#include <vector>

#include "dplearn/statistics.hpp"
#include "gtest/gtest.h"

namespace dplearn {
namespace {

TEST(TrivialRepresentationTest, SizeBoundIsLogClassSize) {
  const HypothesisClass thresholds = HypothesisClass::all_thresholds(Domain(1024));
  const Representation rep = trivial_representation(thresholds);
  EXPECT_NEAR(rep.size_bound(), std::log(1025.0), 1e-12);
  EXPECT_DOUBLE_EQ(rep.alpha(), 0.0);
  EXPECT_DOUBLE_EQ(rep.beta(), 0.0);
}

TEST(TrivialRepresentationTest, SamplesAreTheClassItself) {
  const HypothesisClass thresholds = HypothesisClass::all_thresholds(Domain(16));
  const Representation rep = trivial_representation(thresholds);
  RandomStream a(1);
  RandomStream b(999);
  const HypothesisClass ha = rep.sample(a);
  const HypothesisClass hb = rep.sample(b);
  ASSERT_EQ(ha.size(), thresholds.size());
  ASSERT_EQ(hb.size(), thresholds.size());
  for (std::size_t i = 0; i < ha.size(); ++i) {
    EXPECT_EQ(ha[i].threshold_value(), static_cast<int64_t>(i));
    EXPECT_EQ(hb[i].threshold_value(), static_cast<int64_t>(i));
  }
}

TEST(TrivialRepresentationTest, ZeroZeroRepresentationProperty) {
  // Sampled H contains every concept, so the best disagreement is exactly 0.
  const Domain domain(16);
  const HypothesisClass thresholds = HypothesisClass::all_thresholds(domain);
  const Representation rep = trivial_representation(thresholds);
  RandomStream rng(2);
  const HypothesisClass sampled = rep.sample(rng);
  std::vector<double> probs(32, 1.0 / 32.0);
  const DiscreteJointDistribution d(domain, probs);
  for (const Hypothesis& c : thresholds.members()) {
    double best = 1.0;
    for (const Hypothesis& h : sampled.members()) {
      best = std::min(best, population_disagreement(d, c, h));
    }
    EXPECT_DOUBLE_EQ(best, 0.0);
  }
}

TEST(RepresentationTest, SizeBoundEnforcedOnEveryDraw) {
  const HypothesisClass thresholds = HypothesisClass::all_thresholds(Domain(8));
  const Representation lying(
      [thresholds](RandomStream&) { return thresholds; }, std::log(4.0), 0.0, 0.0);
  RandomStream rng(3);
  EXPECT_THROW(lying.sample(rng), std::invalid_argument);
}

TEST(RepresentationTest, CoverageAuditOfStochasticRepresentation) {
  // Keep each threshold with probability 1/2 (f_0 always kept); for a uniform
  // marginal over 16 points a run of 9 consecutive drops is needed to miss
  // alpha = 1/4, so coverage easily clears 1 - beta.
  const Domain domain(16);
  const double alpha = 0.25;
  const double beta = 0.05;
  const Representation rep(
      [domain](RandomStream& rng) {
        std::vector<Hypothesis> kept;
        kept.push_back(Hypothesis::threshold(0));
        for (int64_t u = 1; u <= domain.size; ++u) {
          if (rng.next_unit() < 0.5) kept.push_back(Hypothesis::threshold(u));
        }
        return HypothesisClass(domain, std::move(kept));
      },
      std::log(17.0), alpha, beta);

  std::vector<double> probs(32, 1.0 / 32.0);
  const DiscreteJointDistribution d(domain, probs);
  RandomStream rng(4);
  const int draws = 1000;
  for (int concept_trial = 0; concept_trial < 10; ++concept_trial) {
    const Hypothesis c = Hypothesis::threshold(static_cast<int64_t>(rng.next_u64() % 17));
    int covered = 0;
    for (int i = 0; i < draws; ++i) {
      const HypothesisClass sampled = rep.sample(rng);
      EXPECT_LE(std::log(static_cast<double>(sampled.size())), rep.size_bound() + 1e-9);
      double best = 1.0;
      for (const Hypothesis& h : sampled.members()) {
        best = std::min(best, population_disagreement(d, c, h));
      }
      covered += (best <= alpha);
    }
    EXPECT_GE(static_cast<double>(covered) / draws, 1.0 - beta);
  }
}

TEST(RepresentationTest, ConstructionErrors) {
  EXPECT_THROW(Representation(nullptr, 1.0, 0.0, 0.0), std::invalid_argument);
  const HypothesisClass cls = HypothesisClass::all_thresholds(Domain(4));
  EXPECT_THROW(Representation([cls](RandomStream&) { return cls; }, -1.0, 0.0, 0.0),
               std::invalid_argument);
}

}  // namespace
}  // namespace dplearn
