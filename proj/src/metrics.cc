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

#include "absl/strings/str_cat.h"

namespace locpriv {
namespace {

absl::Status CheckWindow(std::span<const TraceRecord> records,
                         StepWindow window) {
  if (records.empty()) return absl::InvalidArgumentError("no records");
  if (window.begin < 0 || window.size() <= 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "empty step window [", window.begin, ", ", window.end, ")"));
  }
  for (const TraceRecord& record : records) {
    if (window.end > record.length()) {
      return absl::OutOfRangeError(
          absl::StrCat("window end ", window.end, " beyond trace of length ",
                       record.length()));
    }
  }
  return absl::OkStatus();
}

absl::Status CheckShapes(const Channel& channel, const Profile& pi,
                         const DistMatrix& d) {
  if (channel.num_inputs() != pi.size() || channel.num_outputs() != d.size() ||
      pi.size() != d.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "inconsistent shapes: channel ", channel.num_inputs(), "x",
        channel.num_outputs(), ", profile ", pi.size(), ", distance ",
        d.size()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> EmpiricalQavg(std::span<const TraceRecord> records,
                                     const DistMatrix& d, StepWindow window) {
  if (absl::Status s = CheckWindow(records, window); !s.ok()) return s;
  double sum = 0.0;
  for (const TraceRecord& record : records) {
    if (absl::Status s = record.Validate(d.size()); !s.ok()) return s;
    for (int r = window.begin; r < window.end; ++r) {
      sum += d(record.x[r], record.z[r]);
    }
  }
  return sum / (static_cast<double>(records.size()) * window.size());
}

absl::StatusOr<double> EmpiricalPae(std::span<const TraceRecord> records,
                                    std::span<const Estimate> estimates,
                                    const DistMatrix& d, StepWindow window) {
  if (absl::Status s = CheckWindow(records, window); !s.ok()) return s;
  if (estimates.size() != records.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(records.size(), " records but ", estimates.size(),
                     " estimates"));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TraceRecord& record = records[i];
    const Estimate& estimate = estimates[i];
    if (static_cast<int>(estimate.x_hat.size()) != record.length()) {
      return absl::InvalidArgumentError(
          absl::StrCat("estimate ", i, " has ", estimate.x_hat.size(),
                       " steps, trace has ", record.length()));
    }
    for (int r = window.begin; r < window.end; ++r) {
      const CellId x = record.x[r];
      const CellId x_hat = estimate.x_hat[r];
      if (x < 0 || x >= d.size() || x_hat < 0 || x_hat >= d.size()) {
        return absl::OutOfRangeError(absl::StrCat("bad cell at step ", r));
      }
      sum += d(x, x_hat);
    }
  }
  return sum / (static_cast<double>(records.size()) * window.size());
}

absl::StatusOr<double> TheoreticalQavg(const Channel& channel,
                                       const Profile& pi, const DistMatrix& d) {
  if (absl::Status s = CheckShapes(channel, pi, d); !s.ok()) return s;
  return pi.probs().dot(
      channel.matrix().cwiseProduct(d.matrix()).rowwise().sum());
}

absl::StatusOr<double> TheoreticalPaeOpt(const Channel& channel,
                                         const Profile& pi,
                                         const DistMatrix& d) {
  if (absl::Status s = CheckShapes(channel, pi, d); !s.ok()) return s;
  // joint(z, x) = pi(x) f(z | x); cost(z, x_hat) = sum_x joint(z, x) d(x, x_hat).
  const Matrix joint = channel.matrix().transpose() * pi.probs().asDiagonal();
  const Matrix cost = joint * d.matrix();
  return cost.rowwise().minCoeff().sum();
}

}  // namespace locpriv
