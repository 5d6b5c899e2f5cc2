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

// Experiment runner: sweeps a mechanism parameter over every evaluated user,
// repeats each run with seeded randomness, attacks the releases and reports
// windowed quality loss and adversary error.

#ifndef LOCPRIV_HARNESS_EXPERIMENT_H_
#define LOCPRIV_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "locpriv/geo.h"
#include "locpriv/harness/dataset.h"

namespace locpriv::harness {

// Every field maps to a key of the JSON config document and to a CLI flag of
// the same name.
struct ExperimentConfig {
  std::string dataset_path;
  // "store" (prepared JSON), "snap" or "crawdad".
  std::string dataset_format = "store";
  // Grid for raw datasets; a store carries its own region.
  Region region = Region::SanFrancisco();
  double day_utc_offset_hours = 0.0;
  // "lh" or "expo".
  std::string mechanism = "lh";
  // Empty selects the default sweep of the family.
  std::vector<double> params;
  bool lh_exclusive = false;
  // "sporadic-hw", "markov-hw" or "peb".
  std::string model = "sporadic-hw";
  // "sporadic" or "markov".
  std::string attack = "sporadic";
  // Models the adversary uses: fitted on the "test" traces themselves (the
  // worst case) or on the same "train" traces as the mechanism.
  std::string attack_training = "test";
  // "scarce", "rich" or "other-users".
  std::string training = "scarce";
  // Unset selects 40 for location hiding and 20 for the exponential family.
  std::optional<int> repetitions;
  std::uint64_t seed = 1;
  bool shuffle = false;
  // Any of "all", "first_half", "last_half".
  std::vector<std::string> windows = {"all"};
  double pseudocount = 0.0;
  double gamma = 0.5;
  double em_tolerance = 1e-8;
  int em_max_iters = 500;
  bool em_warm_start = false;
  int em_stride = 1;
  // PEB initial guess: the "training" profile or "uniform".
  std::string pi_ini = "training";
  // 0 uses LOCPRIV_THREADS, else the hardware concurrency.
  int threads = 0;

  absl::Status Validate() const;
  int EffectiveRepetitions() const;
  std::vector<double> EffectiveParams() const;
};

inline constexpr char kThreadsEnvVar[] = "LOCPRIV_THREADS";

nlohmann::json ConfigToJson(const ExperimentConfig& config);
// Unknown keys are errors; missing keys keep their defaults.
absl::StatusOr<ExperimentConfig> ConfigFromJson(const nlohmann::json& j);

// Default sweeps: alpha in 0, 0.1, ..., 1 and epsilon in 0, 0.02, ..., 0.18.
std::vector<double> DefaultParams(const std::string& mechanism);

struct ResultRow {
  std::string user;
  std::string mechanism;
  double param = 0.0;
  int repetition = 0;
  std::string window;
  double qavg_km = 0.0;
  double pae_km = 0.0;
  int degenerate_steps = 0;
};

inline constexpr char kRowsCsvHeader[] =
    "user,mechanism,param,repetition,window,qavg_km,pae_km,degenerate_steps";

// Loads (and for raw formats prepares) the configured dataset.
absl::StatusOr<PreparedDataset> LoadDataset(const ExperimentConfig& config);

absl::StatusOr<std::vector<ResultRow>> RunExperiment(
    const ExperimentConfig& config);
// Runs on an already prepared dataset; the config's dataset fields are
// ignored.
absl::StatusOr<std::vector<ResultRow>> RunExperiment(
    const ExperimentConfig& config, const PreparedDataset& dataset);

// Shortest round-trip decimal form.
std::string FormatDouble(double value);

std::string RowsToCsv(const std::vector<ResultRow>& rows);
absl::StatusOr<std::vector<ResultRow>> RowsFromCsv(const std::string& text);

}  // namespace locpriv::harness

#endif  // LOCPRIV_HARNESS_EXPERIMENT_H_
