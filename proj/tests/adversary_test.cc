// Copyright 2026 The Locpriv Authors
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

#include "locpriv/adversary.h"

#include <limits>
#include <memory>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "locpriv/harness/oracle_suites.h"
#include "locpriv/mechanisms.h"
#include "test_util.h"

namespace locpriv {
namespace {

using ::locpriv::harness::RandomChannel;
using ::locpriv::harness::RandomDistance;
using ::locpriv::harness::RandomProfile;
using ::locpriv::testing::LineDistance;
using ::locpriv::testing::MakeProfile;
using ::locpriv::testing::Vec;
using ::testing::Each;
using ::testing::ElementsAre;

Matrix Mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

TraceRecord RecordWithLikelihoods(const Trace& x, const Trace& z,
                                  const Vector& likelihood) {
  TraceRecord record;
  record.x = x;
  record.z = z;
  record.likelihoods.assign(x.size(), likelihood);
  return record;
}

TEST(BayesEstimateTest, Examples) {
  const DistMatrix d = LineDistance(3);
  EXPECT_EQ(BayesEstimate(Vec({0, 0, 1}), d), 2);
  // Costs 0.7, 0.7, 1.3: the tie goes to the lower id.
  EXPECT_NEAR(Vec({0.5, 0.3, 0.2}).dot(d.matrix().col(0)), 0.7, 1e-15);
  EXPECT_NEAR(Vec({0.5, 0.3, 0.2}).dot(d.matrix().col(1)), 0.7, 1e-15);
  EXPECT_NEAR(Vec({0.5, 0.3, 0.2}).dot(d.matrix().col(2)), 1.3, 1e-15);
  EXPECT_EQ(BayesEstimate(Vec({0.5, 0.3, 0.2}), d), 0);
  EXPECT_EQ(BayesEstimate(Vector::Constant(7, 1.0 / 7), LineDistance(7)), 3);
}

TEST(BayesEstimateTest, InvariantUnderRescaling) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 8;
    const DistMatrix d = RandomDistance(n, rng);
    const Vector belief = RandomProfile(n, rng, trial % 2 == 0).probs();
    const double scale = std::exp(20.0 * (UniformUnit(rng) - 0.5));
    EXPECT_EQ(BayesEstimate(belief, d), BayesEstimate(scale * belief, d));
  }
}

TEST(AttackSporadicTest, IdentityChannelRecoversTruth) {
  const Trace x = {0, 3, 2, 2, 1};
  TraceRecord record;
  record.x = x;
  record.z = x;
  for (CellId c : x) record.likelihoods.push_back(Matrix::Identity(4, 4).col(c));
  ASSERT_OK_AND_ASSIGN(
      const Estimate est,
      AttackSporadic(record, Profile::Uniform(4), LineDistance(4)));
  EXPECT_EQ(est.x_hat, x);
  EXPECT_TRUE(est.degenerate_steps.empty());
}

TEST(AttackSporadicTest, UniformChannelGivesPriorEstimate) {
  const Profile pi = MakeProfile({0.1, 0.1, 0.2, 0.6});
  const TraceRecord record = RecordWithLikelihoods(
      {0, 1, 2, 3}, {2, 2, 0, 1}, Vector::Constant(4, 0.25));
  ASSERT_OK_AND_ASSIGN(const Estimate est,
                       AttackSporadic(record, pi, LineDistance(4)));
  EXPECT_THAT(est.x_hat, Each(BayesEstimate(pi.probs(), LineDistance(4))));
}

// Estimates against the remapped three-cell mechanism, checked against a
// posterior and an argmin written out per step.
TEST(AttackSporadicTest, MatchesHandPosteriorOnThreeCellRemap) {
  const Profile pi = MakeProfile({0.5, 0.3, 0.2});
  const DistMatrix d = LineDistance(3);
  ASSERT_OK_AND_ASSIGN(const Channel base, LocationHiding(0.5, 3));
  ASSERT_OK_AND_ASSIGN(SporadicMechanism mech,
                       SporadicMechanism::Create(base, pi, d));
  Rng rng(4);
  const Trace x = SampleIid(pi, 200, rng);
  ASSERT_OK_AND_ASSIGN(const TraceRecord record, RunTrace(mech, x, rng));
  ASSERT_OK_AND_ASSIGN(const Estimate est, AttackSporadic(record, pi, d));
  const Matrix& f = mech.remapped().channel.matrix();
  for (int r = 0; r < record.length(); ++r) {
    double post[3];
    double norm = 0.0;
    for (int i = 0; i < 3; ++i) {
      post[i] = pi[i] * f(i, record.z[r]);
      norm += post[i];
    }
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int h = 0; h < 3; ++h) {
      double cost = 0.0;
      for (int i = 0; i < 3; ++i) cost += post[i] / norm * std::abs(i - h);
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        best = h;
      }
    }
    EXPECT_EQ(est.x_hat[r], best) << "step " << r;
  }
  // The remapped mechanism only releases cells 0 and 1, and the adversary's
  // best guess is the released cell.
  EXPECT_EQ(est.x_hat, record.z);
}

TEST(AttackSporadicTest, DegeneratePosteriorFallsBackToPrior) {
  const Profile pi = MakeProfile({0.0, 0.2, 0.8});
  const TraceRecord record =
      RecordWithLikelihoods({0}, {0}, Matrix::Identity(3, 3).col(0));
  ASSERT_OK_AND_ASSIGN(const Estimate est,
                       AttackSporadic(record, pi, LineDistance(3)));
  EXPECT_THAT(est.x_hat, ElementsAre(2));
  EXPECT_THAT(est.degenerate_steps, ElementsAre(0));
}

TEST(AttackSporadicTest, RejectsMalformedRecords) {
  TraceRecord record = RecordWithLikelihoods({0, 1}, {0, 1}, Vec({0.5, 0.5}));
  record.z.pop_back();
  EXPECT_FALSE(
      AttackSporadic(record, Profile::Uniform(2), LineDistance(2)).ok());
  EXPECT_FALSE(AttackSporadic(RecordWithLikelihoods({0}, {0}, Vec({1, 0})),
                              Profile::Uniform(3), LineDistance(3))
                   .ok());
}

TEST(AttackMarkovTest, TwoCycleAlternatesAfterTieBreak) {
  ASSERT_OK_AND_ASSIGN(
      const MarkovModel model,
      MarkovModel::Create(MakeProfile({0.7, 0.3}), Mat2(0, 1, 1, 0)));
  const TraceRecord record = RecordWithLikelihoods(
      {0, 1, 0, 1, 0}, {0, 0, 0, 0, 0}, Vec({0.5, 0.5}));
  ASSERT_OK_AND_ASSIGN(const Estimate est,
                       AttackMarkov(record, model, LineDistance(2)));
  EXPECT_THAT(est.x_hat, ElementsAre(0, 1, 0, 1, 0));
}

TEST(AttackMarkovTest, IdentityChannelRecoversTruth) {
  ASSERT_OK_AND_ASSIGN(
      const MarkovModel model,
      MarkovModel::Create(Profile::Uniform(2), Mat2(0.5, 0.5, 0.5, 0.5)));
  const Trace x = {1, 1, 0, 1};
  TraceRecord record;
  record.x = x;
  record.z = x;
  for (CellId c : x) record.likelihoods.push_back(Matrix::Identity(2, 2).col(c));
  ASSERT_OK_AND_ASSIGN(const Estimate est,
                       AttackMarkov(record, model, LineDistance(2)));
  EXPECT_EQ(est.x_hat, x);
}

TEST(AttackMarkovTest, IidChainEqualsSporadicAttack) {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 5;
    const Profile pi = RandomProfile(n, rng, trial % 2 == 1);
    ASSERT_OK_AND_ASSIGN(
        const MarkovModel chain,
        MarkovModel::Create(pi, pi.probs().transpose().replicate(n, 1)));
    const DistMatrix d = RandomDistance(n, rng);
    ASSERT_OK_AND_ASSIGN(SporadicMechanism mech,
                         SporadicMechanism::Create(RandomChannel(n, n, rng),
                                                   pi, d));
    const Trace x = SampleIid(pi, 50, rng);
    ASSERT_OK_AND_ASSIGN(const TraceRecord record, RunTrace(mech, x, rng));
    ASSERT_OK_AND_ASSIGN(const Estimate a, AttackMarkov(record, chain, d));
    ASSERT_OK_AND_ASSIGN(const Estimate b, AttackSporadic(record, pi, d));
    EXPECT_EQ(a.x_hat, b.x_hat) << "trial " << trial;
  }
}

// The attack reads only releases and likelihoods: scrambling the real trace
// in the record leaves the estimates unchanged.
TEST(AttackMarkovTest, IgnoresRealTrace) {
  const int n = 4;
  Rng rng(8);
  Matrix m(n, n);
  for (int j = 0; j < n; ++j) m.row(j) = RandomProfile(n, rng).probs();
  ASSERT_OK_AND_ASSIGN(const MarkovModel model,
                       MarkovModel::Create(RandomProfile(n, rng), m));
  const DistMatrix d = LineDistance(n);
  ASSERT_OK_AND_ASSIGN(const Channel base, LocationHiding(0.4, n));
  ASSERT_OK_AND_ASSIGN(
      MarkovMechanism mech,
      MarkovMechanism::Create(
          std::make_shared<const Remapper>(*Remapper::Create(base, d)), model));
  const Trace x = SampleMarkov(model, 40, rng);
  ASSERT_OK_AND_ASSIGN(TraceRecord record, RunTrace(mech, x, rng));
  ASSERT_OK_AND_ASSIGN(const Estimate a, AttackMarkov(record, model, d));
  for (CellId& c : record.x) c = (c + 1) % n;
  ASSERT_OK_AND_ASSIGN(const Estimate b, AttackMarkov(record, model, d));
  EXPECT_EQ(a.x_hat, b.x_hat);
}

}  // namespace
}  // namespace locpriv
