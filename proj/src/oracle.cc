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

#include "locpriv/oracle.h"

#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "locpriv/metrics.h"

namespace locpriv {
namespace {

int IntPow(int base, int exp) {
  int out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Writes the `len` base-`base` digits of `code`, most significant first.
void Digits(int code, int base, int len, std::vector<CellId>& out) {
  out.resize(len);
  for (int i = len - 1; i >= 0; --i) {
    out[i] = code % base;
    code /= base;
  }
}

int Encode(std::span<const CellId> digits, int base) {
  int code = 0;
  for (CellId d : digits) code = code * base + d;
  return code;
}

absl::Status CheckEnumerable(int n, int m, int r) {
  if (n > kOracleMaxAlphabet || m > kOracleMaxAlphabet) {
    return absl::ResourceExhaustedError(
        absl::StrCat("oracle limited to alphabets of size <= ",
                     kOracleMaxAlphabet, ", got n=", n, ", m=", m));
  }
  if (r < 1 || r > kOracleMaxHorizon) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "oracle horizon must lie in [1, ", kOracleMaxHorizon, "], got ", r));
  }
  return absl::OkStatus();
}

double SequenceProb(const MobilityModel& model, std::span<const CellId> x) {
  if (const Profile* pi = std::get_if<Profile>(&model)) {
    double p = 1.0;
    for (CellId c : x) p *= (*pi)[c];
    return p;
  }
  const MarkovModel& chain = std::get<MarkovModel>(model);
  double p = chain.initial()[x[0]];
  for (std::size_t t = 1; t < x.size(); ++t) {
    p *= chain.transitions()(x[t - 1], x[t]);
  }
  return p;
}

int ModelSize(const MobilityModel& model) {
  return std::visit([](const auto& m) { return m.size(); }, model);
}

// p(z_1..z_r | x_1..x_r) under the full mechanism.
double ReleaseProb(const FullLppm& lppm, std::span<const CellId> x,
                   std::span<const CellId> z) {
  double p = 1.0;
  for (std::size_t t = 0; t < x.size() && p > 0.0; ++t) {
    p *= lppm.Prob(x.first(t + 1), z.first(t), z[t]);
  }
  return p;
}

}  // namespace

absl::StatusOr<FullLppm> FullLppm::Create(
    int num_inputs, int num_outputs, std::vector<std::vector<double>> tables) {
  if (num_inputs < 1 || num_outputs < 1) {
    return absl::InvalidArgumentError("alphabets must be nonempty");
  }
  if (tables.empty()) return absl::InvalidArgumentError("no steps");
  for (std::size_t step = 0; step < tables.size(); ++step) {
    const int t = static_cast<int>(step) + 1;
    const long expected =
        static_cast<long>(IntPow(num_inputs, t)) * IntPow(num_outputs, t);
    if (static_cast<long>(tables[step].size()) != expected) {
      return absl::InvalidArgumentError(
          absl::StrCat("step ", t, " table has ", tables[step].size(),
                       " entries, expected ", expected));
    }
    for (std::size_t row = 0; row < tables[step].size();
         row += num_outputs) {
      double sum = 0.0;
      for (int z = 0; z < num_outputs; ++z) {
        const double p = tables[step][row + z];
        if (!std::isfinite(p) || p < 0.0) {
          return absl::InvalidArgumentError(
              absl::StrCat("invalid probability at step ", t));
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        return absl::InvalidArgumentError(
            absl::StrCat("step ", t, " row ", row / num_outputs, " sums to ",
                         sum));
      }
    }
  }
  return FullLppm(num_inputs, num_outputs, std::move(tables));
}

absl::StatusOr<FullLppm> FullLppm::Memoryless(const Channel& channel,
                                              int horizon) {
  const int n = channel.num_inputs();
  const int m = channel.num_outputs();
  if (horizon < 1) return absl::InvalidArgumentError("horizon must be >= 1");
  std::vector<std::vector<double>> tables;
  for (int t = 1; t <= horizon; ++t) {
    const int xcodes = IntPow(n, t);
    const int zcodes = IntPow(m, t - 1);
    std::vector<double> table;
    table.reserve(static_cast<std::size_t>(xcodes) * zcodes * m);
    for (int xcode = 0; xcode < xcodes; ++xcode) {
      const CellId current = xcode % n;
      for (int zcode = 0; zcode < zcodes; ++zcode) {
        for (int z = 0; z < m; ++z) table.push_back(channel(current, z));
      }
    }
    tables.push_back(std::move(table));
  }
  return Create(n, m, std::move(tables));
}

absl::StatusOr<FullLppm> FullLppm::Random(int num_inputs, int num_outputs,
                                          int horizon, Rng& rng) {
  if (absl::Status s = CheckEnumerable(num_inputs, num_outputs, horizon);
      !s.ok()) {
    return s;
  }
  std::vector<std::vector<double>> tables;
  for (int t = 1; t <= horizon; ++t) {
    const int rows = IntPow(num_inputs, t) * IntPow(num_outputs, t - 1);
    std::vector<double> table(static_cast<std::size_t>(rows) * num_outputs);
    for (int row = 0; row < rows; ++row) {
      double sum = 0.0;
      for (int z = 0; z < num_outputs; ++z) {
        double& p = table[static_cast<std::size_t>(row) * num_outputs + z];
        p = -std::log1p(-UniformUnit(rng));
        sum += p;
      }
      for (int z = 0; z < num_outputs; ++z) {
        table[static_cast<std::size_t>(row) * num_outputs + z] /= sum;
      }
    }
    tables.push_back(std::move(table));
  }
  return Create(num_inputs, num_outputs, std::move(tables));
}

double FullLppm::Prob(std::span<const CellId> x_prefix,
                      std::span<const CellId> z_prefix, CellId z) const {
  const int t = static_cast<int>(x_prefix.size());
  const std::size_t index =
      (static_cast<std::size_t>(Encode(x_prefix, n_)) * IntPow(m_, t - 1) +
       Encode(z_prefix, m_)) *
          m_ +
      z;
  return tables_[t - 1][index];
}

absl::StatusOr<double> ExactMinPae(const MobilityModel& model,
                                   const FullLppm& lppm, const DistMatrix& d,
                                   int r, int s) {
  const int n = lppm.num_inputs();
  const int m = lppm.num_outputs();
  if (absl::Status st = CheckEnumerable(n, m, r); !st.ok()) return st;
  if (r > lppm.horizon()) {
    return absl::InvalidArgumentError(
        absl::StrCat("horizon ", r, " exceeds mechanism horizon ",
                     lppm.horizon()));
  }
  if (s < 1 || s > r) {
    return absl::InvalidArgumentError(
        absl::StrCat("target step ", s, " outside [1, ", r, "]"));
  }
  if (ModelSize(model) != n || d.size() != n) {
    return absl::InvalidArgumentError("model, mechanism and distance disagree");
  }

  const int xcodes = IntPow(n, r);
  const int zcodes = IntPow(m, r);
  // cost[zcode * n + x_hat]
  std::vector<double> cost(static_cast<std::size_t>(zcodes) * n, 0.0);
  std::vector<CellId> x;
  std::vector<CellId> z;
  for (int xcode = 0; xcode < xcodes; ++xcode) {
    Digits(xcode, n, r, x);
    const double px = SequenceProb(model, x);
    if (px == 0.0) continue;
    for (int zcode = 0; zcode < zcodes; ++zcode) {
      Digits(zcode, m, r, z);
      const double joint = px * ReleaseProb(lppm, x, z);
      if (joint == 0.0) continue;
      for (int x_hat = 0; x_hat < n; ++x_hat) {
        cost[static_cast<std::size_t>(zcode) * n + x_hat] +=
            joint * d(x[s - 1], x_hat);
      }
    }
  }
  double total = 0.0;
  for (int zcode = 0; zcode < zcodes; ++zcode) {
    double best = std::numeric_limits<double>::infinity();
    for (int x_hat = 0; x_hat < n; ++x_hat) {
      best = std::min(best, cost[static_cast<std::size_t>(zcode) * n + x_hat]);
    }
    total += best;
  }
  return total;
}

absl::StatusOr<Channel> MarginalizeToMemoryless(const Profile& model,
                                                const FullLppm& lppm, int r) {
  const int n = lppm.num_inputs();
  const int m = lppm.num_outputs();
  if (absl::Status st = CheckEnumerable(n, m, r); !st.ok()) return st;
  if (r > lppm.horizon()) {
    return absl::InvalidArgumentError(
        absl::StrCat("step ", r, " exceeds mechanism horizon ",
                     lppm.horizon()));
  }
  if (model.size() != n) {
    return absl::InvalidArgumentError("model and mechanism disagree");
  }

  Matrix f = Matrix::Zero(n, m);
  std::vector<CellId> x;
  std::vector<CellId> z;
  for (int xcode = 0; xcode < IntPow(n, r); ++xcode) {
    Digits(xcode, n, r, x);
    // Probability of the history given the current location.
    double history = 1.0;
    for (int t = 0; t + 1 < r; ++t) history *= model[x[t]];
    if (history == 0.0) continue;
    for (int zcode = 0; zcode < IntPow(m, r); ++zcode) {
      Digits(zcode, m, r, z);
      f(x[r - 1], z[r - 1]) += history * ReleaseProb(lppm, x, z);
    }
  }
  return Channel::Create(std::move(f));
}

absl::StatusOr<RemapSearchResult> ExhaustiveBestRemap(const Channel& base,
                                                      const Profile& pi,
                                                      const DistMatrix& d) {
  const int m = base.num_outputs();
  if (m > kOracleMaxRemapOutputs) {
    return absl::ResourceExhaustedError(
        absl::StrCat("exhaustive remap limited to ", kOracleMaxRemapOutputs,
                     " outputs, got ", m));
  }
  if (base.num_inputs() != m || d.size() != m || pi.size() != m) {
    return absl::InvalidArgumentError(
        "exhaustive remap needs a square channel over the distance alphabet");
  }

  std::vector<CellId> targets(m, 0);
  std::vector<CellId> best_targets;
  double best = std::numeric_limits<double>::infinity();
  const int maps = IntPow(m, m);
  for (int code = 0; code < maps; ++code) {
    Digits(code, m, m, targets);
    absl::StatusOr<RemapTable> table = RemapTable::Create(targets, m);
    if (!table.ok()) return table.status();
    absl::StatusOr<Channel> composed = Compose(base, *table);
    if (!composed.ok()) return composed.status();
    absl::StatusOr<double> q = TheoreticalQavg(*composed, pi, d);
    if (!q.ok()) return q.status();
    if (*q < best) {
      best = *q;
      best_targets = targets;
    }
  }
  absl::StatusOr<RemapTable> table =
      RemapTable::Create(std::move(best_targets), m);
  if (!table.ok()) return table.status();
  return RemapSearchResult{.table = *std::move(table), .qavg = best};
}

}  // namespace locpriv
