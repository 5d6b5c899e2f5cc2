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

// Profile-estimation-based mechanism. Before every query the mechanism
// estimates the user's profile by maximum likelihood from its own past
// releases, blends the estimate with an initial guess, and rebuilds the
// optimal sporadic mechanism around the blend.

#ifndef LOCPRIV_PEB_H_
#define LOCPRIV_PEB_H_

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "locpriv/common.h"
#include "locpriv/geo.h"
#include "locpriv/mechanisms.h"
#include "locpriv/mobility.h"

namespace locpriv {

struct EmConfig {
  // Stop when the L-infinity change of the profile drops below this.
  double tolerance = 1e-8;
  int max_iters = 500;
  // Start each estimate from the previous one instead of uniform.
  bool warm_start = false;

  absl::Status Validate() const;
};

struct EmResult {
  Profile profile;
  int iterations = 0;
  bool converged = false;
  // Observed-data log-likelihood of the starting point and of every iterate.
  std::vector<double> log_likelihood;
  // 0-based steps whose likelihood vector was all zero and got ignored.
  std::vector<int> skipped_steps;
};

// Multiset of per-step likelihood vectors. Identical vectors are stored once
// with a count, which makes each EM iteration cost proportional to the number
// of distinct vectors.
class LikelihoodSet {
 public:
  explicit LikelihoodSet(int num_cells);

  absl::Status Add(const Vector& likelihood);

  int num_cells() const { return num_cells_; }
  // Steps added so far, skipped ones included.
  int num_steps() const { return num_steps_; }
  int num_distinct() const { return static_cast<int>(weights_.size()); }
  const std::vector<int>& skipped_steps() const { return skipped_steps_; }

  // Distinct nonzero vectors as rows, and their multiplicities.
  Matrix DistinctRows() const;
  const std::vector<double>& weights() const { return weights_; }

 private:
  int num_cells_;
  int num_steps_ = 0;
  std::vector<Vector> distinct_;
  std::vector<double> weights_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> skipped_steps_;
};

// Maximum-likelihood profile given per-step likelihood vectors L^s(x), by the
// fixed-point iteration
//   pi_i <- (1/r) sum_s pi_i L^s_i / sum_k pi_k L^s_k.
// `init` must be strictly positive. If every step is skipped, returns `init`.
absl::StatusOr<EmResult> EmMle(std::span<const Vector> likelihoods,
                               const Profile& init, const EmConfig& config);
absl::StatusOr<EmResult> EmMle(const LikelihoodSet& likelihoods,
                               const Profile& init, const EmConfig& config);

// r^-gamma * pi_ini + (1 - r^-gamma) * pi_ml.
absl::StatusOr<Profile> Blend(const Profile& pi_ini, const Profile& pi_ml,
                              int r, double gamma);

struct PebConfig {
  Profile pi_ini = Profile::Uniform(1);
  double gamma = 0.5;
  EmConfig em;
  BaseMechanismSpec base;
  // Re-estimate every `em_stride` queries and reuse the estimate in between.
  int em_stride = 1;

  absl::Status Validate() const;
};

class PebMechanism final : public Mechanism {
 public:
  static absl::StatusOr<PebMechanism> Create(const PebConfig& config,
                                             const DistMatrix& d_q);
  // Shares a prebuilt remapper, whose base channel must match config.base.
  static absl::StatusOr<PebMechanism> Create(
      const PebConfig& config, std::shared_ptr<const Remapper> remapper);

  int num_cells() const override { return remapper_->num_cells(); }
  absl::StatusOr<Release> Step(CellId x, Rng& rng) override;

  // Queries answered so far.
  int steps() const { return store_.num_steps(); }
  // Most recent maximum-likelihood estimate (pi_ini before any estimate).
  const Profile& ml_estimate() const { return pi_ml_; }
  // Blended profile the last release was designed for.
  const Profile& design_profile() const { return design_; }
  const LikelihoodSet& store() const { return store_; }
  // EM runs that hit max_iters without meeting the tolerance.
  int unconverged_estimates() const { return unconverged_; }

 private:
  PebMechanism(PebConfig config, std::shared_ptr<const Remapper> remapper);

  PebConfig config_;
  std::shared_ptr<const Remapper> remapper_;
  LikelihoodSet store_;
  Profile pi_ml_;
  Profile design_;
  int unconverged_ = 0;
};

}  // namespace locpriv

#endif  // LOCPRIV_PEB_H_
