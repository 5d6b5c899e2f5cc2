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

#include <cmath>

#include "absl/strings/str_cat.h"

namespace locpriv {
namespace {

constexpr double kCreateSumTolerance = 1e-9;

absl::Status CheckTraces(std::span<const Trace> traces, int num_cells) {
  if (num_cells < 1) {
    return absl::InvalidArgumentError("num_cells must be positive");
  }
  for (const Trace& trace : traces) {
    for (CellId c : trace) {
      if (c < 0 || c >= num_cells) {
        return absl::OutOfRangeError(
            absl::StrCat("cell ", c, " outside [0, ", num_cells, ")"));
      }
    }
  }
  return absl::OkStatus();
}

absl::Status CheckPseudocount(double pseudocount) {
  if (!std::isfinite(pseudocount) || pseudocount < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("pseudocount must be >= 0, got ", pseudocount));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Profile> Profile::Create(Vector p) {
  if (p.size() == 0) return absl::InvalidArgumentError("empty profile");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("profile entry ", i, " is ", p[i]));
    }
  }
  const double sum = p.sum();
  if (std::abs(sum - 1.0) > kCreateSumTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("profile sums to ", sum, ", expected 1"));
  }
  p /= sum;
  return Profile(std::move(p));
}

absl::StatusOr<Profile> Profile::Normalize(Vector weights) {
  if (weights.size() == 0) return absl::InvalidArgumentError("empty profile");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("weight ", i, " is ", weights[i]));
    }
  }
  const double sum = weights.sum();
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    return absl::FailedPreconditionError("weights have no positive mass");
  }
  weights /= sum;
  return Profile(std::move(weights));
}

Profile Profile::Uniform(int n) {
  return Profile(Vector::Constant(n, 1.0 / n));
}

Profile Profile::PointMass(int n, CellId cell) {
  Vector p = Vector::Zero(n);
  p[cell] = 1.0;
  return Profile(std::move(p));
}

absl::StatusOr<MarkovModel> MarkovModel::Create(Profile initial,
                                                Matrix transitions) {
  const Eigen::Index n = initial.size();
  if (transitions.rows() != n || transitions.cols() != n) {
    return absl::InvalidArgumentError(
        absl::StrCat("transition matrix is ", transitions.rows(), "x",
                     transitions.cols(), ", expected ", n, "x", n));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(transitions(j, i)) || transitions(j, i) < 0.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("invalid transition (", j, " -> ", i, ")"));
      }
    }
    const double sum = transitions.row(j).sum();
    if (std::abs(sum - 1.0) > kCreateSumTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("transition row ", j, " sums to ", sum));
    }
    transitions.row(j) /= sum;
  }
  return MarkovModel(std::move(initial), std::move(transitions));
}

absl::StatusOr<Profile> TrainProfile(std::span<const Trace> traces,
                                     int num_cells, double pseudocount) {
  if (absl::Status s = CheckTraces(traces, num_cells); !s.ok()) return s;
  if (absl::Status s = CheckPseudocount(pseudocount); !s.ok()) return s;
  Vector counts = Vector::Constant(num_cells, pseudocount);
  for (const Trace& trace : traces) {
    for (CellId c : trace) counts[c] += 1.0;
  }
  if (!(counts.sum() > 0.0)) {
    return absl::InvalidArgumentError(
        "cannot train a profile from zero check-ins without a pseudocount");
  }
  return Profile::Normalize(std::move(counts));
}

absl::StatusOr<MarkovTraining> TrainMarkov(std::span<const Trace> traces,
                                           int num_cells, double pseudocount) {
  if (traces.empty()) {
    return absl::InvalidArgumentError("Markov training needs traces");
  }
  absl::StatusOr<Profile> initial = TrainProfile(traces, num_cells, pseudocount);
  if (!initial.ok()) return initial.status();

  Matrix counts = Matrix::Constant(num_cells, num_cells, pseudocount);
  for (const Trace& trace : traces) {
    for (std::size_t r = 1; r < trace.size(); ++r) {
      counts(trace[r - 1], trace[r]) += 1.0;
    }
  }
  std::vector<CellId> uniform_rows;
  for (int j = 0; j < num_cells; ++j) {
    const double total = counts.row(j).sum();
    if (total > 0.0) {
      counts.row(j) /= total;
    } else {
      counts.row(j).setConstant(1.0 / num_cells);
      uniform_rows.push_back(j);
    }
  }
  absl::StatusOr<MarkovModel> model =
      MarkovModel::Create(*std::move(initial), std::move(counts));
  if (!model.ok()) return model.status();
  return MarkovTraining{.model = *std::move(model),
                        .uniform_rows = std::move(uniform_rows)};
}

Trace SampleIid(const Profile& profile, int length, Rng& rng) {
  const Vector& p = profile.probs();
  Trace out(length);
  for (CellId& c : out) c = SampleIndex({p.data(), std::size_t(p.size())}, rng);
  return out;
}

Trace SampleMarkov(const MarkovModel& model, int length, Rng& rng) {
  Trace out;
  out.reserve(length);
  if (length < 1) return out;
  const Vector& p0 = model.initial().probs();
  out.push_back(SampleIndex({p0.data(), std::size_t(p0.size())}, rng));
  const Matrix& m = model.transitions();
  for (int r = 1; r < length; ++r) {
    const double* row = m.row(out.back()).data();
    out.push_back(SampleIndex({row, std::size_t(m.cols())}, rng));
  }
  return out;
}

}  // namespace locpriv
