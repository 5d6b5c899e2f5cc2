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

#include "locpriv/harness/model_io.h"

#include <filesystem>
#include <variant>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace locpriv::harness {
namespace {

using ::locpriv::testing::MakeProfile;
using ::locpriv::testing::Vec;

TEST(RegionJsonTest, RoundTripAndValidation) {
  const Region sf = Region::SanFrancisco();
  ASSERT_OK_AND_ASSIGN(const Region back, RegionFromJson(RegionToJson(sf)));
  EXPECT_EQ(back.lat_min, sf.lat_min);
  EXPECT_EQ(back.lon_max, sf.lon_max);
  EXPECT_EQ(back.rows, 25);
  EXPECT_EQ(back.cols, 10);
  nlohmann::json bad = RegionToJson(sf);
  bad["rows"] = 0;
  EXPECT_FALSE(RegionFromJson(bad).ok());
}

TEST(ModelJsonTest, ProfileRoundTrip) {
  const Profile pi = MakeProfile({0.125, 0.375, 0.5});
  ASSERT_OK_AND_ASSIGN(const ModelFile file,
                       ModelFromJson(ModelToJson(pi, std::nullopt)));
  EXPECT_FALSE(file.region.has_value());
  ASSERT_TRUE(std::holds_alternative<Profile>(file.model));
  EXPECT_EQ(std::get<Profile>(file.model).probs(), pi.probs());
}

TEST(ModelJsonTest, MarkovRoundTripIsExact) {
  Matrix t(3, 3);
  t << 0.1, 0.2, 0.7, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 1.0;
  ASSERT_OK_AND_ASSIGN(const MarkovModel chain,
                       MarkovModel::Create(MakeProfile({0.2, 0.3, 0.5}), t));
  const Region region{.lat_min = 0, .lat_max = 1, .lon_min = 0, .lon_max = 3,
                      .rows = 1, .cols = 3};
  ASSERT_OK_AND_ASSIGN(const ModelFile file,
                       ModelFromJson(ModelToJson(chain, region)));
  ASSERT_TRUE(file.region.has_value());
  EXPECT_EQ(file.region->cols, 3);
  const MarkovModel& back = std::get<MarkovModel>(file.model);
  EXPECT_EQ(back.transitions(), chain.transitions());
  EXPECT_EQ(back.initial().probs(), chain.initial().probs());
}

TEST(ModelJsonTest, RejectsMalformedModels) {
  EXPECT_FALSE(ModelFromJson(nlohmann::json{{"type", "profile"},
                                            {"probs", {0.5, 0.6}}})
                   .ok());
  EXPECT_FALSE(ModelFromJson(nlohmann::json{{"type", "lattice"}}).ok());
  EXPECT_FALSE(ModelFromJson(nlohmann::json{{"type", "markov"},
                                            {"initial", {0.5, 0.5}},
                                            {"transitions", {{1.0, 0.0}}}})
                   .ok());
  EXPECT_FALSE(ModelFromJson(nlohmann::json::array()).ok());
}

TEST(DatasetJsonTest, RoundTripAndCellChecks) {
  PreparedDataset data{.kind = "checkin",
                       .region = Region{.lat_min = 0,
                                        .lat_max = 1,
                                        .lon_min = 0,
                                        .lon_max = 1,
                                        .rows = 2,
                                        .cols = 2},
                       .users = {}};
  data.users.push_back(PreparedUser{.id = "7",
                                    .test = {{0, 1, 3}},
                                    .train_scarce = {{2}, {3, 3}},
                                    .train_rich = {},
                                    .train_other = {{1}}});
  const nlohmann::json j = DatasetToJson(data);
  ASSERT_OK_AND_ASSIGN(const PreparedDataset back, DatasetFromJson(j));
  EXPECT_EQ(back.kind, "checkin");
  ASSERT_EQ(back.users.size(), 1u);
  EXPECT_EQ(back.users[0].id, "7");
  EXPECT_EQ(back.users[0].test, data.users[0].test);
  EXPECT_EQ(back.users[0].train_scarce, data.users[0].train_scarce);
  EXPECT_TRUE(back.users[0].train_rich.empty());
  EXPECT_EQ(back.users[0].train_other, data.users[0].train_other);
  EXPECT_EQ(DatasetToJson(back), j);

  nlohmann::json out_of_grid = j;
  out_of_grid["users"][0]["test"][0][1] = 4;
  EXPECT_FALSE(DatasetFromJson(out_of_grid).ok());
  EXPECT_FALSE(DatasetFromJson(nlohmann::json{{"kind", "x"}}).ok());
}

TEST(FileIoTest, WriteThenRead) {
  const std::filesystem::path path =
      std::filesystem::path(::testing::TempDir()) / "locpriv_io_test.json";
  ASSERT_OK(WriteTextFile(path, R"({"a": [1, 2]})"));
  ASSERT_OK_AND_ASSIGN(const nlohmann::json j, ReadJsonFile(path));
  EXPECT_EQ(j.at("a").at(1), 2);
  ASSERT_OK(WriteTextFile(path, "{not json"));
  EXPECT_FALSE(ReadJsonFile(path).ok());
  std::filesystem::remove(path);
  EXPECT_FALSE(ReadJsonFile(path).ok());
  EXPECT_FALSE(WriteTextFile(path / "sub" / "file.json", "x").ok());
}

}  // namespace
}  // namespace locpriv::harness
