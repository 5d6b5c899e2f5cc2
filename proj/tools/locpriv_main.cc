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

// Command-line front end: ingest, run, curves, synth and oracle.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "locpriv/geo.h"
#include "locpriv/harness/curves.h"
#include "locpriv/harness/dataset.h"
#include "locpriv/harness/experiment.h"
#include "locpriv/harness/model_io.h"
#include "locpriv/harness/oracle_suites.h"
#include "locpriv/mobility.h"

namespace {

using nlohmann::json;
using locpriv::harness::ExperimentConfig;

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return 1;
}

// Writes to `path`, or stdout when it is empty or "-".
absl::Status Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return absl::OkStatus();
  }
  return locpriv::harness::WriteTextFile(path, text);
}

absl::StatusOr<std::string> ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// A flag value becomes JSON when it parses as JSON; list-valued keys also
// accept comma-separated items, and anything else is taken as a string.
json FlagToJson(const std::string& key, const std::string& value) {
  const bool list = key == "params" || key == "windows";
  if (list && (value.empty() || value.front() != '[')) {
    json items = json::array();
    for (absl::string_view item : absl::StrSplit(value, ',', absl::SkipEmpty())) {
      json parsed = json::parse(item.begin(), item.end(), nullptr, false);
      items.push_back(parsed.is_discarded() ? json(std::string(item)) : parsed);
    }
    return items;
  }
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) return json(value);
  return parsed;
}

struct RegionFlags {
  locpriv::Region region = locpriv::Region::SanFrancisco();

  void Add(CLI::App* app) {
    app->add_option("--lat_min", region.lat_min, "Southern edge (degrees)");
    app->add_option("--lat_max", region.lat_max, "Northern edge (degrees)");
    app->add_option("--lon_min", region.lon_min, "Western edge (degrees)");
    app->add_option("--lon_max", region.lon_max, "Eastern edge (degrees)");
    app->add_option("--rows", region.rows, "Grid rows (south to north)");
    app->add_option("--cols", region.cols, "Grid columns (west to east)");
  }
};

struct IngestFlags {
  std::string input;
  std::string format = "snap";
  std::string output;
  RegionFlags region;
  bool shuffle = false;
  std::uint64_t seed = 1;
  double day_utc_offset_hours = 0.0;
  locpriv::harness::CheckinOptions checkin;
};

int Ingest(const IngestFlags& flags) {
  absl::StatusOr<locpriv::harness::DatasetFormat> format =
      locpriv::harness::ParseDatasetFormat(flags.format);
  if (!format.ok()) return Fail(format.status());
  absl::StatusOr<locpriv::Grid> grid = locpriv::Grid::Create(flags.region.region);
  if (!grid.ok()) return Fail(grid.status());
  absl::StatusOr<locpriv::harness::LoadResult> loaded =
      locpriv::harness::LoadCheckins(flags.input, *format);
  if (!loaded.ok()) return Fail(loaded.status());
  for (const std::string& w : loaded->warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "read " << loaded->records.size() << " records from "
            << loaded->lines << " lines (" << loaded->skipped
            << " malformed lines skipped)\n";

  absl::StatusOr<locpriv::harness::PreparedDataset> dataset;
  if (*format == locpriv::harness::DatasetFormat::kSnap) {
    locpriv::harness::CheckinOptions options = flags.checkin;
    options.shuffle = flags.shuffle;
    locpriv::Rng rng(flags.seed);
    dataset = locpriv::harness::PrepareCheckinDataset(
        std::move(loaded->records), *grid, options, rng);
  } else {
    dataset = locpriv::harness::PrepareTaxicabDataset(
        std::move(loaded->records), *grid,
        {.day_utc_offset_hours = flags.day_utc_offset_hours});
  }
  if (!dataset.ok()) return Fail(dataset.status());
  std::cerr << "prepared " << dataset->users.size() << " evaluated users\n";
  if (absl::Status s =
          Emit(flags.output, locpriv::harness::DatasetToJson(*dataset).dump() + "\n");
      !s.ok()) {
    return Fail(s);
  }
  return 0;
}

int Run(const std::string& config_path,
        const std::map<std::string, std::string>& overrides,
        const std::string& output) {
  json j = json::object();
  if (!config_path.empty()) {
    absl::StatusOr<json> file = locpriv::harness::ReadJsonFile(config_path);
    if (!file.ok()) return Fail(file.status());
    j = *std::move(file);
    if (!j.is_object()) {
      return Fail(absl::InvalidArgumentError("config must be a JSON object"));
    }
  }
  for (const auto& [key, value] : overrides) j[key] = FlagToJson(key, value);
  absl::StatusOr<ExperimentConfig> config =
      locpriv::harness::ConfigFromJson(j);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<std::vector<locpriv::harness::ResultRow>> rows =
      locpriv::harness::RunExperiment(*config);
  if (!rows.ok()) return Fail(rows.status());
  if (absl::Status s = Emit(output, locpriv::harness::RowsToCsv(*rows));
      !s.ok()) {
    return Fail(s);
  }
  return 0;
}

int Curves(const std::string& input, const std::string& output,
           const locpriv::harness::CurveOptions& options) {
  absl::StatusOr<std::string> text = ReadText(input);
  if (!text.ok()) return Fail(text.status());
  absl::StatusOr<std::vector<locpriv::harness::ResultRow>> rows =
      locpriv::harness::RowsFromCsv(*text);
  if (!rows.ok()) return Fail(rows.status());
  absl::StatusOr<locpriv::harness::TradeoffCurve> curve =
      locpriv::harness::InterpolateCurves(*rows, options);
  if (!curve.ok()) return Fail(curve.status());
  if (absl::Status s = Emit(output, locpriv::harness::CurveToCsv(*curve));
      !s.ok()) {
    return Fail(s);
  }
  return 0;
}

struct SynthFlags {
  std::string model;
  std::string train_model;
  std::string output;
  int users = 5;
  int test_traces = 1;
  int length = 300;
  int train_traces = 1;
  int train_length = 300;
  std::uint64_t seed = 1;
};

absl::StatusOr<locpriv::harness::ModelFile> LoadModel(const std::string& path) {
  absl::StatusOr<json> j = locpriv::harness::ReadJsonFile(path);
  if (!j.ok()) return j.status();
  return locpriv::harness::ModelFromJson(*j);
}

locpriv::Trace Sample(const locpriv::MobilityModel& model, int length,
                      locpriv::Rng& rng) {
  if (const auto* pi = std::get_if<locpriv::Profile>(&model)) {
    return locpriv::SampleIid(*pi, length, rng);
  }
  return locpriv::SampleMarkov(std::get<locpriv::MarkovModel>(model), length,
                               rng);
}

int Synth(const SynthFlags& flags) {
  absl::StatusOr<locpriv::harness::ModelFile> test = LoadModel(flags.model);
  if (!test.ok()) return Fail(test.status());
  absl::StatusOr<locpriv::harness::ModelFile> train = test;
  if (!flags.train_model.empty()) train = LoadModel(flags.train_model);
  if (!train.ok()) return Fail(train.status());

  const locpriv::Region region =
      test->region.value_or(locpriv::Region::SanFrancisco());
  const int cells = region.rows * region.cols;
  auto size_of = [](const locpriv::MobilityModel& m) {
    return std::visit([](const auto& v) { return v.size(); }, m);
  };
  if (size_of(test->model) != cells || size_of(train->model) != cells) {
    return Fail(absl::InvalidArgumentError(absl::StrCat(
        "models must have one entry per grid cell (", cells, ")")));
  }
  if (flags.users < 1 || flags.test_traces < 1 || flags.length < 1 ||
      flags.train_traces < 0 || flags.train_length < 1) {
    return Fail(absl::InvalidArgumentError("invalid synthetic sizes"));
  }

  locpriv::Rng rng(flags.seed);
  locpriv::harness::PreparedDataset dataset{
      .kind = "synthetic", .region = region, .users = {}};
  for (int u = 0; u < flags.users; ++u) {
    locpriv::harness::PreparedUser user;
    user.id = std::to_string(u + 1);
    for (int t = 0; t < flags.test_traces; ++t) {
      user.test.push_back(Sample(test->model, flags.length, rng));
    }
    for (int t = 0; t < flags.train_traces; ++t) {
      user.train_rich.push_back(Sample(train->model, flags.train_length, rng));
    }
    user.train_scarce = user.train_rich;
    dataset.users.push_back(std::move(user));
  }
  if (absl::Status s = Emit(
          flags.output, locpriv::harness::DatasetToJson(dataset).dump() + "\n");
      !s.ok()) {
    return Fail(s);
  }
  return 0;
}

int Oracle(std::uint64_t seed) {
  bool ok = true;
  for (const locpriv::harness::SuiteResult& r :
       locpriv::harness::RunAllSuites(seed)) {
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << " instances="
              << r.instances << " failures=" << r.failures
              << " worst_excess=" << r.worst;
    if (!r.detail.empty()) std::cout << " first_failure=\"" << r.detail << "\"";
    std::cout << "\n";
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location privacy mechanisms, attacks and experiments"};
  app.require_subcommand(1);

  IngestFlags ingest;
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "Quantize a raw dataset into a trace store");
  ingest_cmd->add_option("--input", ingest.input, "File or crawdad directory")
      ->required();
  ingest_cmd->add_option("--format", ingest.format, "snap or crawdad");
  ingest_cmd->add_option("--output", ingest.output, "Store path (default stdout)");
  ingest.region.Add(ingest_cmd);
  ingest_cmd->add_flag("--shuffle", ingest.shuffle, "Permute check-in traces");
  ingest_cmd->add_option("--seed", ingest.seed, "Seed for shuffling");
  ingest_cmd->add_option("--day_utc_offset_hours", ingest.day_utc_offset_hours,
                         "Day boundary offset for taxicab data");
  ingest_cmd->add_option("--min_checkins", ingest.checkin.min_checkins);
  ingest_cmd->add_option("--n_eval", ingest.checkin.num_eval);
  ingest_cmd->add_option("--n_scarce_users", ingest.checkin.num_scarce_users);

  std::string config_path;
  std::string run_output;
  std::map<std::string, std::string> overrides;
  CLI::App* run_cmd =
      app.add_subcommand("run", "Run an experiment and write result rows");
  run_cmd->add_option("--config", config_path, "JSON experiment config");
  run_cmd->add_option("--output", run_output, "Rows CSV (default stdout)");
  const json config_keys = locpriv::harness::ConfigToJson(ExperimentConfig{});
  for (const auto& item : config_keys.items()) {
    const std::string key = item.key();
    run_cmd->add_option_function<std::string>(
        "--" + key,
        [&overrides, key = key](const std::string& v) { overrides[key] = v; },
        "Overrides config key " + key);
  }

  std::string curves_input;
  std::string curves_output;
  locpriv::harness::CurveOptions curve_options;
  CLI::App* curves_cmd =
      app.add_subcommand("curves", "Interpolate tradeoff curves from rows");
  curves_cmd->add_option("--input", curves_input, "Rows CSV")->required();
  curves_cmd->add_option("--output", curves_output, "Curve CSV (default stdout)");
  curves_cmd->add_option("--q_min", curve_options.q_min);
  curves_cmd->add_option("--q_max", curve_options.q_max);
  curves_cmd->add_option("--n_points", curve_options.n_points);
  curves_cmd->add_option("--window", curve_options.window);
  curves_cmd->add_option("--mechanism", curve_options.mechanism);

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Sample a synthetic trace store from a model file");
  synth_cmd->add_option("--model", synth.model, "Model generating test traces")
      ->required();
  synth_cmd->add_option("--train_model", synth.train_model,
                        "Model generating training traces (default: --model)");
  synth_cmd->add_option("--output", synth.output, "Store path (default stdout)");
  synth_cmd->add_option("--users", synth.users);
  synth_cmd->add_option("--test_traces", synth.test_traces);
  synth_cmd->add_option("--length", synth.length);
  synth_cmd->add_option("--train_traces", synth.train_traces);
  synth_cmd->add_option("--train_length", synth.train_length);
  synth_cmd->add_option("--seed", synth.seed);

  std::uint64_t oracle_seed = 1;
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Run the tiny-instance property suites");
  oracle_cmd->add_option("--seed", oracle_seed);

  CLI11_PARSE(app, argc, argv);

  if (ingest_cmd->parsed()) return Ingest(ingest);
  if (run_cmd->parsed()) return Run(config_path, overrides, run_output);
  if (curves_cmd->parsed()) {
    return Curves(curves_input, curves_output, curve_options);
  }
  if (synth_cmd->parsed()) return Synth(synth);
  if (oracle_cmd->parsed()) return Oracle(oracle_seed);
  return 1;
}
