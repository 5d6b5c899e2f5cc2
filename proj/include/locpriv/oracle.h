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

// Brute-force reference computations for tiny instances. These enumerate
// every trace and every deterministic map, so they are guarded by hard size
// limits and never used on experiment paths.

#ifndef LOCPRIV_ORACLE_H_
#define LOCPRIV_ORACLE_H_

#include <span>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "locpriv/common.h"
#include "locpriv/geo.h"
#include "locpriv/mechanisms.h"
#include "locpriv/mobility.h"

namespace locpriv {

inline constexpr int kOracleMaxAlphabet = 4;
inline constexpr int kOracleMaxHorizon = 3;
inline constexpr int kOracleMaxRemapOutputs = 6;

// Mechanism with full memory: step t releases z_t with probability
// f(z_t | z_1..z_{t-1}, x_1..x_t), stored as explicit tables.
class FullLppm {
 public:
  // tables[t - 1] holds step t, indexed by
  //   (xcode * m^(t-1) + zcode) * m + z_t
  // where xcode is x_1..x_t and zcode is z_1..z_{t-1}, both read as base-n
  // (resp. base-m) numbers with the earliest symbol most significant.
  static absl::StatusOr<FullLppm> Create(int num_inputs, int num_outputs,
                                         std::vector<std::vector<double>> tables);
  // The same channel applied independently at every step.
  static absl::StatusOr<FullLppm> Memoryless(const Channel& channel,
                                             int horizon);
  // Every conditional row drawn from a flat Dirichlet distribution.
  static absl::StatusOr<FullLppm> Random(int num_inputs, int num_outputs,
                                         int horizon, Rng& rng);

  int num_inputs() const { return n_; }
  int num_outputs() const { return m_; }
  int horizon() const { return static_cast<int>(tables_.size()); }

  // f(z | z_prefix, x_prefix) at step x_prefix.size(), with
  // z_prefix.size() == x_prefix.size() - 1.
  double Prob(std::span<const CellId> x_prefix,
              std::span<const CellId> z_prefix, CellId z) const;

 private:
  FullLppm(int n, int m, std::vector<std::vector<double>> tables)
      : n_(n), m_(m), tables_(std::move(tables)) {}

  int n_;
  int m_;
  std::vector<std::vector<double>> tables_;
};

using MobilityModel = std::variant<Profile, MarkovModel>;

// sum over z_1..z_r of min over x_hat of
//   sum over x_1..x_r of p(x) p(z | x) d(x_s, x_hat),
// the error of the optimal adversary estimating x_s after seeing r releases.
// Steps are 1-based. Requires n, m <= 4 and r <= 3.
absl::StatusOr<double> ExactMinPae(const MobilityModel& model,
                                   const FullLppm& lppm, const DistMatrix& d,
                                   int r, int s);

// f*(z_r | x_r) for i.i.d. locations from `model`: the full mechanism's
// step-r release probability averaged over the unseen history.
absl::StatusOr<Channel> MarginalizeToMemoryless(const Profile& model,
                                                const FullLppm& lppm, int r);

struct RemapSearchResult {
  RemapTable table;
  double qavg;
};

// Tries every map g over the m outputs (m <= 6) and returns the one with the
// smallest quality loss of the composed channel. Maps are visited in
// lexicographic order and only a strictly smaller loss replaces the incumbent.
absl::StatusOr<RemapSearchResult> ExhaustiveBestRemap(const Channel& base,
                                                      const Profile& pi,
                                                      const DistMatrix& d);

}  // namespace locpriv

#endif  // LOCPRIV_ORACLE_H_
