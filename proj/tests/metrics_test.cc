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

#include "locpriv/metrics.h"

#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "locpriv/harness/oracle_suites.h"
#include "test_util.h"

namespace locpriv {
namespace {

using ::locpriv::harness::RandomChannel;
using ::locpriv::harness::RandomDistance;
using ::locpriv::harness::RandomProfile;
using ::locpriv::testing::LineDistance;
using ::locpriv::testing::MakeProfile;

TEST(StepWindowTest, Halves) {
  EXPECT_EQ(StepWindow::All(7).size(), 7);
  EXPECT_EQ(StepWindow::FirstHalf(7).end, 3);
  EXPECT_EQ(StepWindow::LastHalf(7).begin, 3);
  EXPECT_EQ(StepWindow::LastHalf(7).size(), 4);
}

TEST(TheoreticalTest, UniformChannelOnLine) {
  const Profile pi = MakeProfile({0.5, 0.3, 0.2});
  ASSERT_OK_AND_ASSIGN(const Channel uniform,
                       Channel::Create(Matrix::Constant(3, 3, 1.0 / 3.0)));
  ASSERT_OK_AND_ASSIGN(const double q,
                       TheoreticalQavg(uniform, pi, LineDistance(3)));
  ASSERT_OK_AND_ASSIGN(const double p,
                       TheoreticalPaeOpt(uniform, pi, LineDistance(3)));
  EXPECT_NEAR(q, 0.9, 1e-12);
  EXPECT_NEAR(p, 0.7, 1e-12);
}

TEST(TheoreticalTest, LocationHidingScalesLoss) {
  const Profile pi = MakeProfile({0.5, 0.3, 0.2});
  for (double alpha : {0.0, 0.25, 0.6, 1.0}) {
    ASSERT_OK_AND_ASSIGN(const Channel lh, LocationHiding(alpha, 3));
    ASSERT_OK_AND_ASSIGN(const double q, TheoreticalQavg(lh, pi, LineDistance(3)));
    EXPECT_NEAR(q, (1.0 - alpha) * 0.9, 1e-12) << alpha;
  }
}

TEST(TheoreticalTest, IdentityChannelHasNoLossAndNoError) {
  ASSERT_OK_AND_ASSIGN(const Channel id, Channel::Create(Matrix::Identity(4, 4)));
  const Profile pi = MakeProfile({0.1, 0.2, 0.3, 0.4});
  EXPECT_NEAR(*TheoreticalQavg(id, pi, LineDistance(4)), 0.0, 1e-15);
  EXPECT_NEAR(*TheoreticalPaeOpt(id, pi, LineDistance(4)), 0.0, 1e-15);
}

TEST(TheoreticalTest, RejectsMismatchedSizes) {
  ASSERT_OK_AND_ASSIGN(const Channel lh, LocationHiding(0.5, 3));
  EXPECT_FALSE(TheoreticalQavg(lh, Profile::Uniform(4), LineDistance(3)).ok());
  EXPECT_FALSE(TheoreticalPaeOpt(lh, Profile::Uniform(3), LineDistance(2)).ok());
}

// Post-processing a channel cannot help the optimal adversary.
TEST(TheoreticalTest, PostProcessingNeverLowersOptimalError) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 6;
    const int m = n;  // the error is measured on the input alphabet
    const Channel base = RandomChannel(n, m, rng);
    const Profile pi = RandomProfile(n, rng, trial % 3 == 0);
    const DistMatrix d = RandomDistance(n, rng);
    std::vector<CellId> targets(m);
    for (CellId& t : targets) {
      t = static_cast<CellId>(UniformUnit(rng) * m);
    }
    ASSERT_OK_AND_ASSIGN(const RemapTable g, RemapTable::Create(targets, m));
    ASSERT_OK_AND_ASSIGN(const Channel composed, Compose(base, g));
    ASSERT_OK_AND_ASSIGN(const double before, TheoreticalPaeOpt(base, pi, d));
    ASSERT_OK_AND_ASSIGN(const double after, TheoreticalPaeOpt(composed, pi, d));
    EXPECT_GE(after, before - 1e-12) << "trial " << trial;
  }
}

TraceRecord Record(const Trace& x, const Trace& z) {
  TraceRecord record;
  record.x = x;
  record.z = z;
  record.likelihoods.assign(x.size(), Vector::Constant(4, 0.25));
  return record;
}

TEST(EmpiricalTest, HandExamples) {
  const DistMatrix d = LineDistance(4);
  const std::vector<TraceRecord> records = {Record({0, 1, 2, 3}, {0, 3, 2, 0}),
                                            Record({3, 3, 3, 3}, {3, 3, 1, 1})};
  // Distances: (0, 2, 0, 3) and (0, 0, 2, 2).
  EXPECT_NEAR(*EmpiricalQavg(records, d, StepWindow::All(4)), 9.0 / 8.0, 1e-15);
  EXPECT_NEAR(*EmpiricalQavg(records, d, StepWindow::FirstHalf(4)), 0.5, 1e-15);
  EXPECT_NEAR(*EmpiricalQavg(records, d, StepWindow::LastHalf(4)), 7.0 / 4.0,
              1e-15);

  const std::vector<Estimate> estimates = {
      Estimate{.x_hat = {1, 1, 1, 1}, .degenerate_steps = {}},
      Estimate{.x_hat = {3, 3, 3, 3}, .degenerate_steps = {}}};
  // Errors: (1, 0, 1, 2) and zeros.
  EXPECT_NEAR(*EmpiricalPae(records, estimates, d, StepWindow::All(4)), 0.5,
              1e-15);
  EXPECT_NEAR(*EmpiricalPae(records, estimates, d, StepWindow::LastHalf(4)),
              0.75, 1e-15);
}

TEST(EmpiricalTest, SingleStep) {
  Matrix m(2, 2);
  m << 0, 2.5, 2.5, 0;
  ASSERT_OK_AND_ASSIGN(const DistMatrix d, DistMatrix::Create(m));
  TraceRecord record;
  record.x = {0};
  record.z = {1};
  record.likelihoods = {Vector::Constant(2, 0.5)};
  const std::vector<TraceRecord> records = {record};
  EXPECT_DOUBLE_EQ(*EmpiricalQavg(records, d, StepWindow::All(1)), 2.5);
}

TEST(EmpiricalTest, Errors) {
  const DistMatrix d = LineDistance(4);
  const std::vector<TraceRecord> records = {Record({0, 1}, {0, 1})};
  EXPECT_FALSE(EmpiricalQavg({}, d, StepWindow::All(2)).ok());
  EXPECT_FALSE(EmpiricalQavg(records, d, StepWindow{1, 1}).ok());
  EXPECT_FALSE(EmpiricalQavg(records, d, StepWindow{0, 3}).ok());
  const std::vector<Estimate> short_estimates = {
      Estimate{.x_hat = {0}, .degenerate_steps = {}}};
  EXPECT_FALSE(
      EmpiricalPae(records, short_estimates, d, StepWindow::All(2)).ok());
  EXPECT_FALSE(EmpiricalPae(records, {}, d, StepWindow::All(2)).ok());
}

// Long runs of the remapped sporadic mechanism with its matching attack agree
// with the closed forms of the remapped channel within three standard errors.
TEST(EmpiricalTest, MonteCarloMatchesClosedForm) {
  const int n = 5;
  const DistMatrix d = LineDistance(n);
  const Profile pi = MakeProfile({0.35, 0.25, 0.2, 0.15, 0.05});
  ASSERT_OK_AND_ASSIGN(const Channel base, LocationHiding(0.4, n));
  ASSERT_OK_AND_ASSIGN(SporadicMechanism mech,
                       SporadicMechanism::Create(base, pi, d));
  const Channel& f = mech.remapped().channel;
  Rng rng(2718);
  constexpr int kSteps = 40000;
  const Trace x = SampleIid(pi, kSteps, rng);
  ASSERT_OK_AND_ASSIGN(const TraceRecord record, RunTrace(mech, x, rng));
  ASSERT_OK_AND_ASSIGN(const Estimate est, AttackSporadic(record, pi, d));
  const std::vector<TraceRecord> records = {record};
  const std::vector<Estimate> estimates = {est};
  ASSERT_OK_AND_ASSIGN(const double q_emp,
                       EmpiricalQavg(records, d, StepWindow::All(kSteps)));
  ASSERT_OK_AND_ASSIGN(const double p_emp, EmpiricalPae(records, estimates, d,
                                                        StepWindow::All(kSteps)));
  ASSERT_OK_AND_ASSIGN(const double q_th, TheoreticalQavg(f, pi, d));
  ASSERT_OK_AND_ASSIGN(const double p_th, TheoreticalPaeOpt(f, pi, d));

  // Per-step distances are bounded by n - 1, which bounds the variance.
  const double se = (n - 1) / std::sqrt(static_cast<double>(kSteps));
  EXPECT_NEAR(q_emp, q_th, 3.0 * se);
  EXPECT_NEAR(p_emp, p_th, 3.0 * se);
}

}  // namespace
}  // namespace locpriv
