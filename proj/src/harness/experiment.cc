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

#include "locpriv/harness/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <set>
#include <thread>
#include <utility>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "locpriv/adversary.h"
#include "locpriv/harness/model_io.h"
#include "locpriv/mechanisms.h"
#include "locpriv/metrics.h"
#include "locpriv/mobility.h"
#include "locpriv/peb.h"

namespace locpriv::harness {
namespace {

using nlohmann::json;

bool OneOf(const std::string& value, std::initializer_list<const char*> set) {
  return std::any_of(set.begin(), set.end(),
                     [&](const char* s) { return value == s; });
}

absl::Status CheckChoice(const char* key, const std::string& value,
                         std::initializer_list<const char*> set) {
  if (OneOf(value, set)) return absl::OkStatus();
  std::vector<std::string> names(set.begin(), set.end());
  return absl::InvalidArgumentError(absl::StrCat(
      key, " must be one of {", absl::StrJoin(names, ", "), "}, got '", value,
      "'"));
}

// Reads `key` into `field` when present, converting nlohmann type errors into
// a status that names the key.
template <typename T>
absl::Status ReadKey(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return absl::OkStatus();
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "': ", e.what()));
  }
  return absl::OkStatus();
}

StepWindow MakeWindow(const std::string& name, int length) {
  if (name == "first_half") return StepWindow::FirstHalf(length);
  if (name == "last_half") return StepWindow::LastHalf(length);
  return StepWindow::All(length);
}

int DefaultThreads() {
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    int value = 0;
    if (absl::SimpleAtoi(env, &value) && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

const std::vector<Trace>& TrainingTraces(const PreparedUser& user,
                                         const std::string& mode) {
  if (mode == "rich") return user.train_rich;
  if (mode == "other-users") return user.train_other;
  return user.train_scarce;
}

bool HasCheckins(const std::vector<Trace>& traces) {
  return std::any_of(traces.begin(), traces.end(),
                     [](const Trace& t) { return !t.empty(); });
}

// Models derived from one user's data, built once before any run.
struct UserModels {
  std::optional<Profile> train_profile;
  std::optional<MarkovModel> train_markov;
  std::optional<Profile> attack_profile;
  std::optional<MarkovModel> attack_markov;
};

absl::StatusOr<UserModels> BuildUserModels(const ExperimentConfig& config,
                                           const PreparedUser& user,
                                           int num_cells) {
  const std::vector<Trace>& train = TrainingTraces(user, config.training);
  const bool needs_train =
      config.model == "sporadic-hw" || config.model == "markov-hw" ||
      (config.model == "peb" && config.pi_ini == "training") ||
      config.attack_training == "train";
  if (needs_train && !HasCheckins(train)) {
    return absl::FailedPreconditionError(
        absl::StrCat("user ", user.id, " has no '", config.training,
                     "' training data"));
  }
  UserModels models;
  if (needs_train) {
    absl::StatusOr<Profile> p = TrainProfile(train, num_cells,
                                             config.pseudocount);
    if (!p.ok()) return p.status();
    models.train_profile = *std::move(p);
  }
  if (config.model == "markov-hw" ||
      (config.attack == "markov" && config.attack_training == "train")) {
    absl::StatusOr<MarkovTraining> m =
        TrainMarkov(train, num_cells, config.pseudocount);
    if (!m.ok()) return m.status();
    models.train_markov = std::move(m->model);
  }
  const std::vector<Trace>& attack_data =
      config.attack_training == "test" ? user.test : train;
  if (config.attack == "sporadic") {
    absl::StatusOr<Profile> p =
        TrainProfile(attack_data, num_cells, config.pseudocount);
    if (!p.ok()) return p.status();
    models.attack_profile = *std::move(p);
  } else {
    absl::StatusOr<MarkovTraining> m =
        TrainMarkov(attack_data, num_cells, config.pseudocount);
    if (!m.ok()) return m.status();
    models.attack_markov = std::move(m->model);
  }
  return models;
}

struct Task {
  int user = 0;
  int param = 0;
  int repetition = 0;
};

struct TaskOutput {
  absl::Status status;
  // One (qavg, pae, degenerate) triple per configured window.
  std::vector<ResultRow> rows;
};

class Runner {
 public:
  Runner(const ExperimentConfig& config, const PreparedDataset& dataset,
         DistMatrix d, std::vector<UserModels> models,
         std::vector<std::shared_ptr<const Remapper>> remappers)
      : config_(config),
        dataset_(dataset),
        d_(std::move(d)),
        models_(std::move(models)),
        remappers_(std::move(remappers)),
        params_(config.EffectiveParams()) {}

  TaskOutput Run(const Task& task) const {
    TaskOutput out;
    out.status = RunImpl(task, out.rows);
    return out;
  }

 private:
  absl::StatusOr<std::unique_ptr<Mechanism>> MakeMechanism(
      const Task& task) const {
    const UserModels& m = models_[task.user];
    const std::shared_ptr<const Remapper>& remapper = remappers_[task.param];
    if (config_.model == "sporadic-hw") {
      absl::StatusOr<SporadicMechanism> mech =
          SporadicMechanism::Create(remapper->base(), *m.train_profile, d_);
      if (!mech.ok()) return mech.status();
      return std::make_unique<SporadicMechanism>(*std::move(mech));
    }
    if (config_.model == "markov-hw") {
      absl::StatusOr<MarkovMechanism> mech =
          MarkovMechanism::Create(remapper, *m.train_markov);
      if (!mech.ok()) return mech.status();
      return std::make_unique<MarkovMechanism>(*std::move(mech));
    }
    PebConfig peb{
        .pi_ini = config_.pi_ini == "uniform" ? Profile::Uniform(d_.size())
                                              : *m.train_profile,
        .gamma = config_.gamma,
        .em = {.tolerance = config_.em_tolerance,
               .max_iters = config_.em_max_iters,
               .warm_start = config_.em_warm_start},
        .base = {},
        .em_stride = config_.em_stride};
    absl::StatusOr<PebMechanism> mech = PebMechanism::Create(peb, remapper);
    if (!mech.ok()) return mech.status();
    return std::make_unique<PebMechanism>(*std::move(mech));
  }

  absl::Status RunImpl(const Task& task, std::vector<ResultRow>& rows) const {
    const PreparedUser& user = dataset_.users[task.user];
    const UserModels& m = models_[task.user];
    Rng rng(config_.seed + static_cast<std::uint64_t>(task.repetition));

    std::vector<TraceRecord> records;
    std::vector<Estimate> estimates;
    for (const Trace& trace : user.test) {
      absl::StatusOr<std::unique_ptr<Mechanism>> mech = MakeMechanism(task);
      if (!mech.ok()) return mech.status();
      absl::StatusOr<TraceRecord> record = RunTrace(**mech, trace, rng);
      if (!record.ok()) return record.status();
      absl::StatusOr<Estimate> estimate =
          config_.attack == "sporadic"
              ? AttackSporadic(*record, *m.attack_profile, d_)
              : AttackMarkov(*record, *m.attack_markov, d_);
      if (!estimate.ok()) return estimate.status();
      records.push_back(*std::move(record));
      estimates.push_back(*std::move(estimate));
    }

    const int length = records.front().length();
    for (const std::string& name : config_.windows) {
      const StepWindow window = MakeWindow(name, length);
      absl::StatusOr<double> q = EmpiricalQavg(records, d_, window);
      if (!q.ok()) return q.status();
      absl::StatusOr<double> p = EmpiricalPae(records, estimates, d_, window);
      if (!p.ok()) return p.status();
      int degenerate = 0;
      for (std::size_t i = 0; i < records.size(); ++i) {
        std::set<int> steps(records[i].degenerate_steps.begin(),
                            records[i].degenerate_steps.end());
        steps.insert(estimates[i].degenerate_steps.begin(),
                     estimates[i].degenerate_steps.end());
        for (int s : steps) {
          if (s >= window.begin && s < window.end) ++degenerate;
        }
      }
      rows.push_back(ResultRow{.user = user.id,
                               .mechanism = config_.mechanism,
                               .param = params_[task.param],
                               .repetition = task.repetition,
                               .window = name,
                               .qavg_km = *q,
                               .pae_km = *p,
                               .degenerate_steps = degenerate});
    }
    return absl::OkStatus();
  }

  const ExperimentConfig& config_;
  const PreparedDataset& dataset_;
  DistMatrix d_;
  std::vector<UserModels> models_;
  std::vector<std::shared_ptr<const Remapper>> remappers_;
  std::vector<double> params_;
};

absl::Status CheckDataset(const ExperimentConfig& config,
                          const PreparedDataset& dataset, int num_cells) {
  if (dataset.users.empty()) {
    return absl::FailedPreconditionError("dataset has no evaluated users");
  }
  for (const PreparedUser& user : dataset.users) {
    if (user.id.find_first_of(",\"\n\r") != std::string::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("user id '", user.id, "' cannot be written to CSV"));
    }
    if (user.test.empty()) {
      return absl::FailedPreconditionError(
          absl::StrCat("user ", user.id, " has no test traces"));
    }
    const std::size_t length = user.test.front().size();
    for (const Trace& trace : user.test) {
      if (trace.size() != length) {
        return absl::FailedPreconditionError(absl::StrCat(
            "user ", user.id, " has test traces of different lengths"));
      }
      for (CellId c : trace) {
        if (c < 0 || c >= num_cells) {
          return absl::OutOfRangeError(
              absl::StrCat("user ", user.id, " visits cell ", c));
        }
      }
    }
    for (const std::string& name : config.windows) {
      if (MakeWindow(name, static_cast<int>(length)).size() <= 0) {
        return absl::FailedPreconditionError(
            absl::StrCat("window ", name, " is empty for traces of length ",
                         length));
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ExperimentConfig::Validate() const {
  if (absl::Status s = CheckChoice("dataset_format", dataset_format,
                                   {"store", "snap", "crawdad"});
      !s.ok()) {
    return s;
  }
  if (absl::Status s = region.Validate(); !s.ok()) return s;
  if (absl::Status s = CheckChoice("mechanism", mechanism, {"lh", "expo"});
      !s.ok()) {
    return s;
  }
  if (absl::Status s =
          CheckChoice("model", model, {"sporadic-hw", "markov-hw", "peb"});
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckChoice("attack", attack, {"sporadic", "markov"});
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckChoice("attack_training", attack_training,
                                   {"test", "train"});
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckChoice("training", training,
                                   {"scarce", "rich", "other-users"});
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckChoice("pi_ini", pi_ini, {"training", "uniform"});
      !s.ok()) {
    return s;
  }
  if (repetitions && *repetitions < 1) {
    return absl::InvalidArgumentError("repetitions must be >= 1");
  }
  for (double p : EffectiveParams()) {
    if (mechanism == "lh" && !(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("alpha ", p, " outside [0, 1]"));
    }
    if (mechanism == "expo" && !(p >= 0.0 && std::isfinite(p))) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon ", p, " must be >= 0"));
    }
  }
  if (windows.empty()) return absl::InvalidArgumentError("no windows");
  for (const std::string& w : windows) {
    if (absl::Status s =
            CheckChoice("windows", w, {"all", "first_half", "last_half"});
        !s.ok()) {
      return s;
    }
  }
  if (!(pseudocount >= 0.0) || !std::isfinite(pseudocount)) {
    return absl::InvalidArgumentError("pseudocount must be >= 0");
  }
  if (threads < 0) return absl::InvalidArgumentError("threads must be >= 0");
  PebConfig peb;
  peb.gamma = gamma;
  peb.em = {.tolerance = em_tolerance,
            .max_iters = em_max_iters,
            .warm_start = em_warm_start};
  peb.em_stride = em_stride;
  return peb.Validate();
}

int ExperimentConfig::EffectiveRepetitions() const {
  if (repetitions) return *repetitions;
  return mechanism == "expo" ? 20 : 40;
}

std::vector<double> ExperimentConfig::EffectiveParams() const {
  return params.empty() ? DefaultParams(mechanism) : params;
}

std::vector<double> DefaultParams(const std::string& mechanism) {
  std::vector<double> out;
  if (mechanism == "expo") {
    for (int i = 0; i <= 9; ++i) out.push_back(0.02 * i);
  } else {
    for (int i = 0; i <= 10; ++i) out.push_back(0.1 * i);
  }
  return out;
}

json ConfigToJson(const ExperimentConfig& c) {
  json j{{"dataset_path", c.dataset_path},
         {"dataset_format", c.dataset_format},
         {"lat_min", c.region.lat_min},
         {"lat_max", c.region.lat_max},
         {"lon_min", c.region.lon_min},
         {"lon_max", c.region.lon_max},
         {"rows", c.region.rows},
         {"cols", c.region.cols},
         {"day_utc_offset_hours", c.day_utc_offset_hours},
         {"mechanism", c.mechanism},
         {"params", c.params},
         {"lh_exclusive", c.lh_exclusive},
         {"model", c.model},
         {"attack", c.attack},
         {"attack_training", c.attack_training},
         {"training", c.training},
         {"repetitions", nullptr},
         {"seed", c.seed},
         {"shuffle", c.shuffle},
         {"windows", c.windows},
         {"pseudocount", c.pseudocount},
         {"gamma", c.gamma},
         {"em_tolerance", c.em_tolerance},
         {"em_max_iters", c.em_max_iters},
         {"em_warm_start", c.em_warm_start},
         {"em_stride", c.em_stride},
         {"pi_ini", c.pi_ini},
         {"threads", c.threads}};
  if (c.repetitions) j["repetitions"] = *c.repetitions;
  return j;
}

absl::StatusOr<ExperimentConfig> ConfigFromJson(const json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  ExperimentConfig c;
  const json known = ConfigToJson(c);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
  }
  absl::Status s;
  auto read = [&](const char* key, auto& field) {
    if (s.ok()) s = ReadKey(j, key, field);
  };
  read("dataset_path", c.dataset_path);
  read("dataset_format", c.dataset_format);
  read("lat_min", c.region.lat_min);
  read("lat_max", c.region.lat_max);
  read("lon_min", c.region.lon_min);
  read("lon_max", c.region.lon_max);
  read("rows", c.region.rows);
  read("cols", c.region.cols);
  read("day_utc_offset_hours", c.day_utc_offset_hours);
  read("mechanism", c.mechanism);
  read("params", c.params);
  read("lh_exclusive", c.lh_exclusive);
  read("model", c.model);
  read("attack", c.attack);
  read("attack_training", c.attack_training);
  read("training", c.training);
  if (j.contains("repetitions") && !j.at("repetitions").is_null()) {
    int reps = 0;
    read("repetitions", reps);
    c.repetitions = reps;
  }
  read("seed", c.seed);
  read("shuffle", c.shuffle);
  read("windows", c.windows);
  read("pseudocount", c.pseudocount);
  read("gamma", c.gamma);
  read("em_tolerance", c.em_tolerance);
  read("em_max_iters", c.em_max_iters);
  read("em_warm_start", c.em_warm_start);
  read("em_stride", c.em_stride);
  read("pi_ini", c.pi_ini);
  read("threads", c.threads);
  if (!s.ok()) return s;
  if (absl::Status v = c.Validate(); !v.ok()) return v;
  return c;
}

absl::StatusOr<PreparedDataset> LoadDataset(const ExperimentConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (config.dataset_path.empty()) {
    return absl::InvalidArgumentError("dataset_path is not set");
  }
  Rng rng(config.seed);
  if (config.dataset_format == "store") {
    absl::StatusOr<json> j = ReadJsonFile(config.dataset_path);
    if (!j.ok()) return j.status();
    absl::StatusOr<PreparedDataset> dataset = DatasetFromJson(*j);
    if (!dataset.ok()) return dataset.status();
    if (config.shuffle) {
      for (PreparedUser& user : dataset->users) {
        for (Trace& t : user.test) ShuffleTrace(t, rng);
      }
    }
    return dataset;
  }
  absl::StatusOr<Grid> grid = Grid::Create(config.region);
  if (!grid.ok()) return grid.status();
  absl::StatusOr<DatasetFormat> format =
      ParseDatasetFormat(config.dataset_format);
  if (!format.ok()) return format.status();
  absl::StatusOr<LoadResult> loaded = LoadCheckins(config.dataset_path, *format);
  if (!loaded.ok()) return loaded.status();
  for (const std::string& w : loaded->warnings) std::clog << "warning: " << w << "\n";
  if (*format == DatasetFormat::kSnap) {
    return PrepareCheckinDataset(std::move(loaded->records), *grid,
                                 CheckinOptions{.shuffle = config.shuffle}, rng);
  }
  return PrepareTaxicabDataset(
      std::move(loaded->records), *grid,
      TaxicabOptions{.day_utc_offset_hours = config.day_utc_offset_hours});
}

absl::StatusOr<std::vector<ResultRow>> RunExperiment(
    const ExperimentConfig& config) {
  absl::StatusOr<PreparedDataset> dataset = LoadDataset(config);
  if (!dataset.ok()) return dataset.status();
  return RunExperiment(config, *dataset);
}

absl::StatusOr<std::vector<ResultRow>> RunExperiment(
    const ExperimentConfig& config, const PreparedDataset& dataset) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<Grid> grid = Grid::Create(dataset.region);
  if (!grid.ok()) return grid.status();
  DistMatrix d = DistanceMatrix(*grid);
  if (absl::Status s = CheckDataset(config, dataset, d.size()); !s.ok()) {
    return s;
  }

  std::vector<UserModels> models;
  for (const PreparedUser& user : dataset.users) {
    absl::StatusOr<UserModels> m = BuildUserModels(config, user, d.size());
    if (!m.ok()) return m.status();
    models.push_back(*std::move(m));
  }

  const std::vector<double> params = config.EffectiveParams();
  std::vector<std::shared_ptr<const Remapper>> remappers;
  for (double p : params) {
    BaseMechanismSpec spec{.family = config.mechanism == "expo"
                                         ? BaseFamily::kExponential
                                         : BaseFamily::kLocationHiding,
                           .parameter = p,
                           .exclusive_hiding = config.lh_exclusive};
    absl::StatusOr<Channel> base = spec.Build(d);
    if (!base.ok()) return base.status();
    absl::StatusOr<Remapper> remapper = Remapper::Create(*std::move(base), d);
    if (!remapper.ok()) return remapper.status();
    remappers.push_back(std::make_shared<const Remapper>(*std::move(remapper)));
  }

  std::vector<Task> tasks;
  for (int u = 0; u < static_cast<int>(dataset.users.size()); ++u) {
    for (int p = 0; p < static_cast<int>(params.size()); ++p) {
      for (int rep = 0; rep < config.EffectiveRepetitions(); ++rep) {
        tasks.push_back(Task{.user = u, .param = p, .repetition = rep});
      }
    }
  }

  const Runner runner(config, dataset, std::move(d), std::move(models),
                      std::move(remappers));
  std::vector<TaskOutput> outputs(tasks.size());
  const int threads =
      std::min<int>(config.threads > 0 ? config.threads : DefaultThreads(),
                    static_cast<int>(tasks.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      outputs[i] = runner.Run(tasks[i]);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  // Tasks are enumerated in (user, param, repetition) order and each emits
  // its windows in config order, so concatenation is already sorted.
  std::vector<ResultRow> rows;
  for (TaskOutput& out : outputs) {
    if (!out.status.ok()) return out.status;
    std::move(out.rows.begin(), out.rows.end(), std::back_inserter(rows));
  }
  return rows;
}

std::string FormatDouble(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

std::string RowsToCsv(const std::vector<ResultRow>& rows) {
  std::string out = absl::StrCat(kRowsCsvHeader, "\n");
  for (const ResultRow& r : rows) {
    absl::StrAppend(&out, r.user, ",", r.mechanism, ",", FormatDouble(r.param),
                    ",", r.repetition, ",", r.window, ",",
                    FormatDouble(r.qavg_km), ",", FormatDouble(r.pae_km), ",",
                    r.degenerate_steps, "\n");
  }
  return out;
}

absl::StatusOr<std::vector<ResultRow>> RowsFromCsv(const std::string& text) {
  std::vector<ResultRow> rows;
  bool header = true;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kRowsCsvHeader) {
        return absl::InvalidArgumentError("unexpected result CSV header");
      }
      header = false;
      continue;
    }
    const std::vector<std::string> f = absl::StrSplit(line, ',');
    ResultRow row;
    if (f.size() != 8 || !absl::SimpleAtod(f[2], &row.param) ||
        !absl::SimpleAtoi(f[3], &row.repetition) ||
        !absl::SimpleAtod(f[5], &row.qavg_km) ||
        !absl::SimpleAtod(f[6], &row.pae_km) ||
        !absl::SimpleAtoi(f[7], &row.degenerate_steps)) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed result row at line ", line_number));
    }
    row.user = f[0];
    row.mechanism = f[1];
    row.window = f[4];
    rows.push_back(std::move(row));
  }
  if (header) return absl::InvalidArgumentError("empty result CSV");
  return rows;
}

}  // namespace locpriv::harness
