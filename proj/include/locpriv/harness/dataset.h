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

// Raw dataset ingestion and preparation of per-user test and training traces.
//
// Two raw formats are understood:
//   snap:    one check-in per line, tab separated:
//            user, ISO-8601 UTC time, latitude, longitude, location id
//   crawdad: one file per cab named new_<cab>.txt, space separated lines:
//            latitude, longitude, occupancy flag, unix time

#ifndef LOCPRIV_HARNESS_DATASET_H_
#define LOCPRIV_HARNESS_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "locpriv/common.h"
#include "locpriv/geo.h"

namespace locpriv::harness {

enum class DatasetFormat { kSnap, kCrawdad };

absl::StatusOr<DatasetFormat> ParseDatasetFormat(absl::string_view name);

struct CheckinRecord {
  std::string user;
  // Seconds since the Unix epoch, UTC.
  std::int64_t time = 0;
  double lat = 0.0;
  double lon = 0.0;
};

struct LoadResult {
  std::vector<CheckinRecord> records;
  std::int64_t lines = 0;
  std::int64_t skipped = 0;
  std::vector<std::string> warnings;
};

// Lines that fail to parse are counted and skipped; more than 10% of them is
// an error. Blank lines are ignored.
inline constexpr double kMaxMalformedFraction = 0.10;

// `path` may name a single file or, for crawdad, a directory of cab files.
absl::StatusOr<LoadResult> LoadCheckins(const std::filesystem::path& path,
                                        DatasetFormat format);

// Parsers over streams; `source` names the input in messages and, for
// crawdad, provides the cab id.
absl::StatusOr<LoadResult> ParseSnap(std::istream& in, absl::string_view source);
absl::StatusOr<LoadResult> ParseCrawdad(std::istream& in,
                                        absl::string_view source);

// "2010-10-19T23:55:27Z" -> seconds since the epoch.
absl::StatusOr<std::int64_t> ParseIsoTime(absl::string_view text);

// Cab id from a crawdad file name: "new_abboip.txt" -> "abboip".
std::string CabIdFromFilename(absl::string_view filename);

// Orders user ids numerically when both are integers, lexicographically
// otherwise (integers first).
bool UserIdLess(const std::string& a, const std::string& b);

// One user's traces after quantization. Test traces are what the mechanism
// protects; the training sets feed hardwired models and PEB's initial guess.
struct PreparedUser {
  std::string id;
  std::vector<Trace> test;
  std::vector<Trace> train_scarce;
  std::vector<Trace> train_rich;
  // Empty when the dataset has no other-users training protocol.
  std::vector<Trace> train_other;
};

struct PreparedDataset {
  // "checkin", "taxicab" or "synthetic".
  std::string kind;
  Region region;
  std::vector<PreparedUser> users;
};

struct CheckinOptions {
  int min_checkins = 300;
  int num_eval = 5;
  int num_scarce_users = 15;
  bool shuffle = false;
};

// Keeps region check-ins, quantizes them, and selects the first
// num_scarce_users + num_eval users (by UserIdLess) with at least
// min_checkins region check-ins. The first num_scarce_users form the scarce
// pool (their first min_checkins check-ins each); the rest are evaluated on
// their first min_checkins check-ins. Rich training for an evaluated user is
// every region check-in of every other user. With `shuffle`, each test and
// pool trace is permuted.
absl::StatusOr<PreparedDataset> PrepareCheckinDataset(
    std::vector<CheckinRecord> records, const Grid& grid,
    const CheckinOptions& options, Rng& rng);

struct TaxicabOptions {
  int resample_minutes = 5;
  double max_silence_hours = 2.0;
  int days_required = 10;
  int test_days = 3;
  int rich_days = 7;
  int scarce_days = 1;
  // Shift applied to UTC timestamps before splitting into calendar days.
  double day_utc_offset_hours = 0.0;
};

// Splits each cab's stream into calendar days, drops days with a silence
// longer than max_silence_hours (the gaps from midnight to the first report
// and from the last report to midnight included), and resamples survivors
// to one cell per slot by carrying the last report forward. Cabs with at least
// days_required days keep their first days_required; the last test_days are
// test traces, the first rich_days are rich training, the first scarce_days
// are scarce training, and other-users training is the first rich_days of the
// next cab in order.
absl::StatusOr<PreparedDataset> PrepareTaxicabDataset(
    std::vector<CheckinRecord> records, const Grid& grid,
    const TaxicabOptions& options);

// Resamples one day of time-ordered reports to slots. Reports outside the grid
// are ignored. Returns NotFound when the day violates the silence rule.
absl::StatusOr<Trace> ResampleDay(std::span<const CheckinRecord> day,
                                  std::int64_t day_start, const Grid& grid,
                                  const TaxicabOptions& options);

// In-place Fisher-Yates permutation driven only by `rng`, so results do not
// depend on the standard library's shuffle algorithm.
void ShuffleTrace(Trace& trace, Rng& rng);

}  // namespace locpriv::harness

#endif  // LOCPRIV_HARNESS_DATASET_H_
