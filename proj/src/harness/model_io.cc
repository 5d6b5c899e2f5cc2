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

#include <fstream>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"

namespace locpriv::harness {
namespace {

using nlohmann::json;

json VectorToJson(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector VectorFromJson(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(),
                                  static_cast<Eigen::Index>(values.size()));
}

json TracesToJson(const std::vector<Trace>& traces) { return json(traces); }

absl::StatusOr<std::vector<Trace>> TracesFromJson(const json& j,
                                                  const char* key,
                                                  int num_cells) {
  if (!j.contains(key)) return std::vector<Trace>{};
  auto traces = j.at(key).get<std::vector<Trace>>();
  for (const Trace& trace : traces) {
    for (CellId c : trace) {
      if (c < 0 || c >= num_cells) {
        return absl::OutOfRangeError(
            absl::StrCat("cell ", c, " in '", key, "' outside the grid"));
      }
    }
  }
  return traces;
}

}  // namespace

json RegionToJson(const Region& region) {
  return json{{"lat_min", region.lat_min}, {"lat_max", region.lat_max},
              {"lon_min", region.lon_min}, {"lon_max", region.lon_max},
              {"rows", region.rows},       {"cols", region.cols}};
}

absl::StatusOr<Region> RegionFromJson(const json& j) {
  try {
    Region region{.lat_min = j.at("lat_min").get<double>(),
                  .lat_max = j.at("lat_max").get<double>(),
                  .lon_min = j.at("lon_min").get<double>(),
                  .lon_max = j.at("lon_max").get<double>(),
                  .rows = j.at("rows").get<int>(),
                  .cols = j.at("cols").get<int>()};
    if (absl::Status s = region.Validate(); !s.ok()) return s;
    return region;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad region: ", e.what()));
  }
}

json ModelToJson(const MobilityModel& model,
                 const std::optional<Region>& region) {
  json j;
  if (const Profile* pi = std::get_if<Profile>(&model)) {
    j["type"] = "profile";
    j["probs"] = VectorToJson(pi->probs());
  } else {
    const MarkovModel& chain = std::get<MarkovModel>(model);
    j["type"] = "markov";
    j["initial"] = VectorToJson(chain.initial().probs());
    json rows = json::array();
    for (Eigen::Index r = 0; r < chain.transitions().rows(); ++r) {
      rows.push_back(VectorToJson(chain.transitions().row(r).transpose()));
    }
    j["transitions"] = std::move(rows);
  }
  if (region) j["region"] = RegionToJson(*region);
  return j;
}

absl::StatusOr<ModelFile> ModelFromJson(const json& j) {
  try {
    std::optional<Region> region;
    if (j.contains("region")) {
      absl::StatusOr<Region> parsed = RegionFromJson(j.at("region"));
      if (!parsed.ok()) return parsed.status();
      region = *parsed;
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "profile") {
      absl::StatusOr<Profile> pi = Profile::Create(VectorFromJson(j.at("probs")));
      if (!pi.ok()) return pi.status();
      return ModelFile{.model = *std::move(pi), .region = region};
    }
    if (type == "markov") {
      absl::StatusOr<Profile> initial =
          Profile::Create(VectorFromJson(j.at("initial")));
      if (!initial.ok()) return initial.status();
      const json& rows = j.at("transitions");
      const int n = initial->size();
      if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
        return absl::InvalidArgumentError("transitions must have one row per cell");
      }
      Matrix m(n, n);
      for (int r = 0; r < n; ++r) {
        const Vector row = VectorFromJson(rows[r]);
        if (row.size() != n) {
          return absl::InvalidArgumentError(
              absl::StrCat("transition row ", r, " has ", row.size(),
                           " entries"));
        }
        m.row(r) = row.transpose();
      }
      absl::StatusOr<MarkovModel> chain =
          MarkovModel::Create(*std::move(initial), std::move(m));
      if (!chain.ok()) return chain.status();
      return ModelFile{.model = *std::move(chain), .region = region};
    }
    return absl::InvalidArgumentError(
        absl::StrCat("unknown model type '", type, "'"));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad model: ", e.what()));
  }
}

json DatasetToJson(const PreparedDataset& dataset) {
  json users = json::array();
  for (const PreparedUser& user : dataset.users) {
    users.push_back(json{{"id", user.id},
                         {"test", TracesToJson(user.test)},
                         {"train_scarce", TracesToJson(user.train_scarce)},
                         {"train_rich", TracesToJson(user.train_rich)},
                         {"train_other", TracesToJson(user.train_other)}});
  }
  return json{{"kind", dataset.kind},
              {"region", RegionToJson(dataset.region)},
              {"users", std::move(users)}};
}

absl::StatusOr<PreparedDataset> DatasetFromJson(const json& j) {
  try {
    PreparedDataset out;
    out.kind = j.at("kind").get<std::string>();
    absl::StatusOr<Region> region = RegionFromJson(j.at("region"));
    if (!region.ok()) return region.status();
    out.region = *region;
    const int n = region->rows * region->cols;
    for (const json& u : j.at("users")) {
      PreparedUser user;
      user.id = u.at("id").get<std::string>();
      for (auto [key, field] :
           {std::pair{"test", &user.test},
            std::pair{"train_scarce", &user.train_scarce},
            std::pair{"train_rich", &user.train_rich},
            std::pair{"train_other", &user.train_other}}) {
        absl::StatusOr<std::vector<Trace>> traces = TracesFromJson(u, key, n);
        if (!traces.ok()) return traces.status();
        *field = *std::move(traces);
      }
      out.users.push_back(std::move(user));
    }
    return out;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad trace store: ", e.what()));
  }
}

absl::StatusOr<json> ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(path.string(), ": ", e.what()));
  }
}

absl::Status WriteTextFile(const std::filesystem::path& path,
                           const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write ", path.string()));
  }
  out << text;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path.string()));
  return absl::OkStatus();
}

}  // namespace locpriv::harness
