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

#include "locpriv/harness/dataset.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace locpriv::harness {
namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

bool ValidCoordinates(double lat, double lon) {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 &&
         lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

std::vector<absl::string_view> Fields(absl::string_view line, bool tabs) {
  if (tabs) return absl::StrSplit(line, '\t');
  return absl::StrSplit(line, absl::ByAnyChar(" \t"), absl::SkipEmpty());
}

absl::Status CheckMalformed(const LoadResult& result, absl::string_view source) {
  if (result.lines > 0 && static_cast<double>(result.skipped) >
                              kMaxMalformedFraction * result.lines) {
    return absl::DataLossError(absl::StrCat(
        source, ": ", result.skipped, " of ", result.lines,
        " lines are malformed (more than 10%)"));
  }
  return absl::OkStatus();
}

template <typename LineParser>
absl::StatusOr<LoadResult> ParseLines(std::istream& in,
                                      absl::string_view source,
                                      LineParser parse_line) {
  LoadResult result;
  std::string line;
  while (std::getline(in, line)) {
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty()) continue;
    ++result.lines;
    std::optional<CheckinRecord> record = parse_line(view);
    if (record) {
      result.records.push_back(*std::move(record));
    } else {
      ++result.skipped;
    }
  }
  if (in.bad()) return absl::DataLossError(absl::StrCat(source, ": read error"));
  if (result.lines == 0) {
    result.warnings.push_back(absl::StrCat(source, ": no records"));
  }
  if (absl::Status s = CheckMalformed(result, source); !s.ok()) return s;
  return result;
}

std::int64_t FloorDiv(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void SortByUserThenTime(std::vector<CheckinRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const CheckinRecord& a, const CheckinRecord& b) {
                     if (a.user != b.user) return UserIdLess(a.user, b.user);
                     return a.time < b.time;
                   });
}

// Groups consecutive records of the same user; input must be sorted.
std::vector<std::span<const CheckinRecord>> GroupByUser(
    const std::vector<CheckinRecord>& records) {
  std::vector<std::span<const CheckinRecord>> groups;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= records.size(); ++i) {
    if (i == records.size() || records[i].user != records[begin].user) {
      groups.emplace_back(records.data() + begin, i - begin);
      begin = i;
    }
  }
  return groups;
}

}  // namespace

absl::StatusOr<DatasetFormat> ParseDatasetFormat(absl::string_view name) {
  if (name == "snap") return DatasetFormat::kSnap;
  if (name == "crawdad") return DatasetFormat::kCrawdad;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown dataset format '", name, "'"));
}

absl::StatusOr<std::int64_t> ParseIsoTime(absl::string_view text) {
  int year, month, day, hour, minute, second;
  char tail = '\0';
  const std::string buffer(text);
  const int fields = std::sscanf(buffer.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c",
                                 &year, &month, &day, &hour, &minute, &second,
                                 &tail);
  if (fields < 6 || (fields == 7 && tail != 'Z')) {
    return absl::InvalidArgumentError(absl::StrCat("bad timestamp '", text, "'"));
  }
  const std::chrono::year_month_day ymd{std::chrono::year(year),
                                        std::chrono::month(month),
                                        std::chrono::day(day)};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60 || hour < 0 ||
      minute < 0 || second < 0) {
    return absl::InvalidArgumentError(absl::StrCat("bad timestamp '", text, "'"));
  }
  const std::int64_t days =
      std::chrono::sys_days(ymd).time_since_epoch().count();
  return days * kSecondsPerDay + hour * 3600 + minute * 60 + second;
}

std::string CabIdFromFilename(absl::string_view filename) {
  absl::string_view id = filename;
  absl::ConsumePrefix(&id, "new_");
  absl::ConsumeSuffix(&id, ".txt");
  return std::string(id);
}

bool UserIdLess(const std::string& a, const std::string& b) {
  auto numeric = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), absl::ascii_isdigit);
  };
  const bool na = numeric(a);
  const bool nb = numeric(b);
  if (na && nb) {
    absl::string_view sa = a;
    absl::string_view sb = b;
    while (sa.size() > 1 && sa.front() == '0') sa.remove_prefix(1);
    while (sb.size() > 1 && sb.front() == '0') sb.remove_prefix(1);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
    return a < b;
  }
  if (na != nb) return na;
  return a < b;
}

absl::StatusOr<LoadResult> ParseSnap(std::istream& in,
                                     absl::string_view source) {
  return ParseLines(
      in, source,
      [](absl::string_view line) -> std::optional<CheckinRecord> {
        const std::vector<absl::string_view> f = Fields(line, /*tabs=*/true);
        if (f.size() < 4 || f.size() > 5 || f[0].empty()) return std::nullopt;
        CheckinRecord record;
        record.user = std::string(f[0]);
        absl::StatusOr<std::int64_t> time = ParseIsoTime(f[1]);
        if (!time.ok()) return std::nullopt;
        record.time = *time;
        if (!absl::SimpleAtod(f[2], &record.lat) ||
            !absl::SimpleAtod(f[3], &record.lon) ||
            !ValidCoordinates(record.lat, record.lon)) {
          return std::nullopt;
        }
        return record;
      });
}

absl::StatusOr<LoadResult> ParseCrawdad(std::istream& in,
                                        absl::string_view source) {
  const std::string cab = CabIdFromFilename(
      std::filesystem::path(std::string(source)).filename().string());
  return ParseLines(
      in, source,
      [&cab](absl::string_view line) -> std::optional<CheckinRecord> {
        const std::vector<absl::string_view> f = Fields(line, /*tabs=*/false);
        if (f.size() != 4) return std::nullopt;
        CheckinRecord record;
        record.user = cab;
        int occupancy = 0;
        if (!absl::SimpleAtod(f[0], &record.lat) ||
            !absl::SimpleAtod(f[1], &record.lon) ||
            !absl::SimpleAtoi(f[2], &occupancy) ||
            !absl::SimpleAtoi(f[3], &record.time) ||
            !ValidCoordinates(record.lat, record.lon)) {
          return std::nullopt;
        }
        return record;
      });
}

absl::StatusOr<LoadResult> LoadCheckins(const std::filesystem::path& path,
                                        DatasetFormat format) {
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path, ec)) {
    if (format != DatasetFormat::kCrawdad) {
      return absl::InvalidArgumentError(
          absl::StrCat(path.string(), " is a directory; only crawdad input "
                                      "may be a directory of cab files"));
    }
    for (const auto& entry : std::filesystem::directory_iterator(path, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    if (ec) return absl::NotFoundError(absl::StrCat(path.string(), ": ", ec.message()));
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }

  LoadResult total;
  for (const std::filesystem::path& file : files) {
    std::ifstream in(file);
    if (!in) {
      return absl::NotFoundError(
          absl::StrCat("cannot open ", file.string()));
    }
    absl::StatusOr<LoadResult> part = format == DatasetFormat::kSnap
                                          ? ParseSnap(in, file.string())
                                          : ParseCrawdad(in, file.string());
    if (!part.ok()) return part.status();
    total.lines += part->lines;
    total.skipped += part->skipped;
    std::move(part->records.begin(), part->records.end(),
              std::back_inserter(total.records));
    std::move(part->warnings.begin(), part->warnings.end(),
              std::back_inserter(total.warnings));
  }
  if (files.empty()) total.warnings.push_back(path.string() + ": no files");
  if (absl::Status s = CheckMalformed(total, path.string()); !s.ok()) return s;
  return total;
}

void ShuffleTrace(Trace& trace, Rng& rng) {
  for (std::size_t i = trace.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(UniformUnit(rng) * static_cast<double>(i));
    if (j >= i) j = i - 1;
    std::swap(trace[i - 1], trace[j]);
  }
}

absl::StatusOr<PreparedDataset> PrepareCheckinDataset(
    std::vector<CheckinRecord> records, const Grid& grid,
    const CheckinOptions& options, Rng& rng) {
  if (options.min_checkins < 1 || options.num_eval < 1 ||
      options.num_scarce_users < 0) {
    return absl::InvalidArgumentError("invalid check-in preparation options");
  }
  SortByUserThenTime(records);

  struct UserTrace {
    std::string id;
    Trace cells;
  };
  std::vector<UserTrace> users;
  for (std::span<const CheckinRecord> group : GroupByUser(records)) {
    UserTrace user{.id = group.front().user, .cells = {}};
    for (const CheckinRecord& r : group) {
      if (std::optional<CellId> c = grid.Quantize(r.lat, r.lon)) {
        user.cells.push_back(*c);
      }
    }
    if (!user.cells.empty()) users.push_back(std::move(user));
  }

  std::vector<int> qualifying;
  for (int i = 0; i < static_cast<int>(users.size()); ++i) {
    if (static_cast<int>(users[i].cells.size()) >= options.min_checkins) {
      qualifying.push_back(i);
    }
  }
  const int needed = options.num_scarce_users + options.num_eval;
  if (static_cast<int>(qualifying.size()) < needed) {
    return absl::FailedPreconditionError(absl::StrCat(
        "only ", qualifying.size(), " users have at least ",
        options.min_checkins, " check-ins inside the region; ", needed,
        " are required"));
  }

  auto head = [&](int user) {
    const Trace& cells = users[user].cells;
    return Trace(cells.begin(), cells.begin() + options.min_checkins);
  };

  std::vector<Trace> pool;
  for (int k = 0; k < options.num_scarce_users; ++k) {
    pool.push_back(head(qualifying[k]));
    if (options.shuffle) ShuffleTrace(pool.back(), rng);
  }

  PreparedDataset out{.kind = "checkin", .region = grid.region(), .users = {}};
  for (int k = options.num_scarce_users; k < needed; ++k) {
    const int u = qualifying[k];
    PreparedUser user{.id = users[u].id,
                      .test = {head(u)},
                      .train_scarce = pool,
                      .train_rich = {},
                      .train_other = {}};
    if (options.shuffle) ShuffleTrace(user.test.front(), rng);
    for (int v = 0; v < static_cast<int>(users.size()); ++v) {
      if (v != u) user.train_rich.push_back(users[v].cells);
    }
    out.users.push_back(std::move(user));
  }
  return out;
}

absl::StatusOr<Trace> ResampleDay(std::span<const CheckinRecord> day,
                                  std::int64_t day_start, const Grid& grid,
                                  const TaxicabOptions& options) {
  const std::int64_t step = std::int64_t{options.resample_minutes} * 60;
  const auto max_gap =
      static_cast<std::int64_t>(std::llround(options.max_silence_hours * 3600));
  std::vector<std::pair<std::int64_t, CellId>> reports;
  for (const CheckinRecord& r : day) {
    if (std::optional<CellId> c = grid.Quantize(r.lat, r.lon)) {
      reports.emplace_back(r.time, *c);
    }
  }
  if (reports.empty()) return absl::NotFoundError("no reports");
  std::int64_t previous = day_start;
  for (const auto& [time, cell] : reports) {
    if (time - previous > max_gap) return absl::NotFoundError("silent gap");
    previous = time;
  }
  if (day_start + kSecondsPerDay - previous > max_gap) {
    return absl::NotFoundError("silent until midnight");
  }

  const int slots = static_cast<int>(kSecondsPerDay / step);
  Trace trace(slots);
  std::size_t next = 0;
  CellId current = reports.front().second;
  for (int k = 0; k < slots; ++k) {
    const std::int64_t slot_start = day_start + k * step;
    while (next < reports.size() && reports[next].first <= slot_start) {
      current = reports[next].second;
      ++next;
    }
    trace[k] = current;
  }
  return trace;
}

absl::StatusOr<PreparedDataset> PrepareTaxicabDataset(
    std::vector<CheckinRecord> records, const Grid& grid,
    const TaxicabOptions& options) {
  if (options.resample_minutes < 1 ||
      (24 * 60) % options.resample_minutes != 0) {
    return absl::InvalidArgumentError(
        "resample_minutes must divide a day evenly");
  }
  if (options.days_required < 1 || options.test_days < 1 ||
      options.test_days > options.days_required ||
      options.rich_days > options.days_required ||
      options.scarce_days > options.days_required ||
      !(options.max_silence_hours > 0.0)) {
    return absl::InvalidArgumentError("invalid taxicab preparation options");
  }
  const auto offset = static_cast<std::int64_t>(
      std::llround(options.day_utc_offset_hours * 3600));
  SortByUserThenTime(records);

  struct CabDays {
    std::string id;
    std::vector<Trace> days;
  };
  std::vector<CabDays> cabs;
  for (std::span<const CheckinRecord> group : GroupByUser(records)) {
    CabDays cab{.id = group.front().user, .days = {}};
    std::size_t begin = 0;
    while (begin < group.size()) {
      const std::int64_t day = FloorDiv(group[begin].time + offset,
                                        kSecondsPerDay);
      std::size_t end = begin;
      while (end < group.size() &&
             FloorDiv(group[end].time + offset, kSecondsPerDay) == day) {
        ++end;
      }
      absl::StatusOr<Trace> trace =
          ResampleDay(group.subspan(begin, end - begin),
                      day * kSecondsPerDay - offset, grid, options);
      if (trace.ok()) cab.days.push_back(*std::move(trace));
      begin = end;
    }
    if (static_cast<int>(cab.days.size()) >= options.days_required) {
      cab.days.resize(options.days_required);
      cabs.push_back(std::move(cab));
    }
  }
  if (cabs.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no cab has ", options.days_required,
        " complete days inside the region"));
  }

  PreparedDataset out{.kind = "taxicab", .region = grid.region(), .users = {}};
  for (std::size_t i = 0; i < cabs.size(); ++i) {
    const std::vector<Trace>& days = cabs[i].days;
    PreparedUser user;
    user.id = cabs[i].id;
    user.test.assign(days.end() - options.test_days, days.end());
    user.train_rich.assign(days.begin(), days.begin() + options.rich_days);
    user.train_scarce.assign(days.begin(), days.begin() + options.scarce_days);
    if (cabs.size() > 1) {
      const std::vector<Trace>& other = cabs[(i + 1) % cabs.size()].days;
      user.train_other.assign(other.begin(), other.begin() + options.rich_days);
    }
    out.users.push_back(std::move(user));
  }
  return out;
}

}  // namespace locpriv::harness
