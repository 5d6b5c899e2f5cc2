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

#include "locpriv/mobility.h"

#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace locpriv {
namespace {

using ::locpriv::testing::MakeProfile;
using ::locpriv::testing::Vec;
using ::testing::ElementsAre;

Matrix Mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

TEST(ProfileTest, CreateAndNormalizeValidate) {
  EXPECT_OK(Profile::Create(Vec({0.25, 0.75})));
  EXPECT_FALSE(Profile::Create(Vec({0.5, 0.6})).ok());
  EXPECT_FALSE(Profile::Create(Vec({1.5, -0.5})).ok());
  EXPECT_FALSE(Profile::Normalize(Vec({0.0, 0.0})).ok());
  ASSERT_OK_AND_ASSIGN(const Profile p, Profile::Normalize(Vec({1, 3})));
  EXPECT_DOUBLE_EQ(p[0], 0.25);
  EXPECT_DOUBLE_EQ(p[1], 0.75);
}

TEST(TrainProfileTest, NormalizesCounts) {
  const std::vector<Trace> traces = {{0, 1}, {0, 2}};
  ASSERT_OK_AND_ASSIGN(const Profile p, TrainProfile(traces, 4, 0.0));
  EXPECT_THAT(std::vector<double>(p.probs().begin(), p.probs().end()),
              ElementsAre(0.5, 0.25, 0.25, 0.0));
}

TEST(TrainProfileTest, EmptyWithPseudocountIsUniform) {
  ASSERT_OK_AND_ASSIGN(const Profile p, TrainProfile({}, 5, 1.0));
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(p[i], 0.2);
}

TEST(TrainProfileTest, EmptyWithoutPseudocountFails) {
  EXPECT_FALSE(TrainProfile({}, 5, 0.0).ok());
  const std::vector<Trace> empty_traces = {{}, {}};
  EXPECT_FALSE(TrainProfile(empty_traces, 5, 0.0).ok());
}

TEST(TrainProfileTest, PseudocountFormula) {
  const std::vector<Trace> traces = {{0, 0, 1}};
  ASSERT_OK_AND_ASSIGN(const Profile p, TrainProfile(traces, 3, 0.5));
  EXPECT_DOUBLE_EQ(p[0], 2.5 / 4.5);
  EXPECT_DOUBLE_EQ(p[1], 1.5 / 4.5);
  EXPECT_DOUBLE_EQ(p[2], 0.5 / 4.5);
}

TEST(TrainProfileTest, RejectsOutOfRangeCells) {
  const std::vector<Trace> traces = {{0, 3}};
  EXPECT_FALSE(TrainProfile(traces, 3, 0.0).ok());
}

TEST(TrainMarkovTest, AlternatingChain) {
  const std::vector<Trace> traces = {{0, 1, 0, 1}};
  ASSERT_OK_AND_ASSIGN(const MarkovTraining t, TrainMarkov(traces, 2, 0.0));
  EXPECT_EQ(t.model.transitions(), Mat2(0, 1, 1, 0));
  EXPECT_DOUBLE_EQ(t.model.initial()[0], 0.5);
  EXPECT_TRUE(t.uniform_rows.empty());
}

TEST(TrainMarkovTest, SelfLoopAndUniformFallback) {
  const std::vector<Trace> traces = {{0, 0, 0}};
  ASSERT_OK_AND_ASSIGN(const MarkovTraining t, TrainMarkov(traces, 3, 0.0));
  EXPECT_EQ(t.model.transitions()(0, 0), 1.0);
  EXPECT_EQ(t.model.transitions()(0, 1), 0.0);
  EXPECT_THAT(t.uniform_rows, ElementsAre(1, 2));
  EXPECT_DOUBLE_EQ(t.model.transitions()(1, 2), 1.0 / 3.0);
}

TEST(TrainMarkovTest, NoTransitionsAcrossTraceBoundaries) {
  const std::vector<Trace> traces = {{0, 1}, {1, 0}};
  ASSERT_OK_AND_ASSIGN(const MarkovTraining t, TrainMarkov(traces, 2, 0.0));
  // Counts are 0->1 once and 1->0 once; joining the traces would add 1->1.
  EXPECT_EQ(t.model.transitions(), Mat2(0, 1, 1, 0));
}

TEST(TrainMarkovTest, RowsSumToOne) {
  Rng rng(5);
  std::vector<Trace> traces;
  for (int i = 0; i < 4; ++i) {
    traces.push_back(SampleIid(Profile::Uniform(6), 40, rng));
  }
  ASSERT_OK_AND_ASSIGN(const MarkovTraining t, TrainMarkov(traces, 6, 0.3));
  for (int j = 0; j < 6; ++j) {
    EXPECT_NEAR(t.model.transitions().row(j).sum(), 1.0, 1e-12);
  }
  EXPECT_NEAR(t.model.initial().probs().sum(), 1.0, 1e-12);
}

TEST(MarkovModelTest, CreateValidatesRows) {
  EXPECT_OK(MarkovModel::Create(Profile::Uniform(2), Mat2(0.5, 0.5, 1, 0)));
  EXPECT_FALSE(
      MarkovModel::Create(Profile::Uniform(2), Mat2(0.5, 0.6, 1, 0)).ok());
  EXPECT_FALSE(MarkovModel::Create(Profile::Uniform(3), Mat2(1, 0, 0, 1)).ok());
}

TEST(SampleIidTest, PointMassGivesConstantTrace) {
  Rng rng(1);
  const Trace t = SampleIid(MakeProfile({1, 0, 0}), 50, rng);
  EXPECT_EQ(t, Trace(50, 0));
}

TEST(SampleIidTest, EmpiricalHistogramCloseToProfile) {
  const Profile p = MakeProfile({0.1, 0.2, 0.3, 0.15, 0.25});
  Rng rng(2);
  const Trace t = SampleIid(p, 100000, rng);
  ASSERT_OK_AND_ASSIGN(const Profile h,
                       TrainProfile(std::vector<Trace>{t}, 5, 0.0));
  EXPECT_LT(TotalVariation(h.probs(), p.probs()), 0.02);
}

TEST(SampleIidTest, SameSeedSameTrace) {
  const Profile p = Profile::Uniform(9);
  Rng a(42);
  Rng b(42);
  EXPECT_EQ(SampleIid(p, 100, a), SampleIid(p, 100, b));
}

TEST(SampleMarkovTest, TwoCycleAlternates) {
  ASSERT_OK_AND_ASSIGN(
      const MarkovModel m,
      MarkovModel::Create(MakeProfile({1, 0}), Mat2(0, 1, 1, 0)));
  Rng rng(1);
  EXPECT_EQ(SampleMarkov(m, 5, rng), (Trace{0, 1, 0, 1, 0}));
}

TEST(SampleMarkovTest, IdentityIsConstant) {
  ASSERT_OK_AND_ASSIGN(const MarkovModel m,
                       MarkovModel::Create(Profile::Uniform(4),
                                           Matrix::Identity(4, 4)));
  Rng rng(9);
  const Trace t = SampleMarkov(m, 30, rng);
  EXPECT_EQ(t, Trace(30, t[0]));
}

TEST(SampleMarkovTest, TrainingRecoversTransitions) {
  Matrix m(3, 3);
  m << 0.7, 0.2, 0.1,  //
      0.3, 0.4, 0.3,   //
      0.1, 0.1, 0.8;
  ASSERT_OK_AND_ASSIGN(const MarkovModel model,
                       MarkovModel::Create(Profile::Uniform(3), m));
  Rng rng(4);
  const Trace t = SampleMarkov(model, 100000, rng);
  ASSERT_OK_AND_ASSIGN(const MarkovTraining fit,
                       TrainMarkov(std::vector<Trace>{t}, 3, 0.0));
  for (int j = 0; j < 3; ++j) {
    EXPECT_LT(TotalVariation(fit.model.transitions().row(j).transpose(),
                             m.row(j).transpose()),
              0.02)
        << "row " << j;
  }
}

}  // namespace
}  // namespace locpriv
