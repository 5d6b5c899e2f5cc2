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

// JSON documents for mobility models and prepared trace stores.
//
// Model file:
//   {"type": "profile", "probs": [...]}
//   {"type": "markov", "initial": [...], "transitions": [[...], ...]}
// Either may carry an optional "region" object with the grid it lives on.
//
// Trace store:
//   {"kind": "...", "region": {...},
//    "users": [{"id": "...", "test": [[...]], "train_scarce": [[...]],
//               "train_rich": [[...]], "train_other": [[...]]}]}

#ifndef LOCPRIV_HARNESS_MODEL_IO_H_
#define LOCPRIV_HARNESS_MODEL_IO_H_

#include <filesystem>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "locpriv/geo.h"
#include "locpriv/harness/dataset.h"
#include "locpriv/mobility.h"
#include "locpriv/oracle.h"

namespace locpriv::harness {

nlohmann::json RegionToJson(const Region& region);
absl::StatusOr<Region> RegionFromJson(const nlohmann::json& j);

struct ModelFile {
  MobilityModel model;
  std::optional<Region> region;
};

nlohmann::json ModelToJson(const MobilityModel& model,
                           const std::optional<Region>& region);
absl::StatusOr<ModelFile> ModelFromJson(const nlohmann::json& j);

nlohmann::json DatasetToJson(const PreparedDataset& dataset);
// Checks that every cell id fits the stored region's grid.
absl::StatusOr<PreparedDataset> DatasetFromJson(const nlohmann::json& j);

absl::StatusOr<nlohmann::json> ReadJsonFile(const std::filesystem::path& path);
absl::Status WriteTextFile(const std::filesystem::path& path,
                           const std::string& text);

}  // namespace locpriv::harness

#endif  // LOCPRIV_HARNESS_MODEL_IO_H_
