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

// Bayesian localization attacks. Both attacks read only the released cells and
// the per-step likelihood vectors of a TraceRecord, never the real trace.

#ifndef LOCPRIV_ADVERSARY_H_
#define LOCPRIV_ADVERSARY_H_

#include <vector>

#include "absl/status/statusor.h"
#include "locpriv/common.h"
#include "locpriv/geo.h"
#include "locpriv/mechanisms.h"
#include "locpriv/mobility.h"

namespace locpriv {

// argmin over x_hat of sum_x belief(x) d(x, x_hat); lowest id on ties. The
// belief need not be normalized.
CellId BayesEstimate(const Vector& belief, const DistMatrix& d);

struct Estimate {
  std::vector<CellId> x_hat;
  // 0-based steps whose posterior was degenerate and fell back to the prior.
  std::vector<int> degenerate_steps;
};

// Per-step posterior pi_test(x) * likelihood_r(x), then BayesEstimate.
absl::StatusOr<Estimate> AttackSporadic(const TraceRecord& record,
                                        const Profile& pi_test,
                                        const DistMatrix& d);

// Forward filter over the Markov model, estimating from each filtered
// posterior.
absl::StatusOr<Estimate> AttackMarkov(const TraceRecord& record,
                                      const MarkovModel& model_test,
                                      const DistMatrix& d);

}  // namespace locpriv

#endif  // LOCPRIV_ADVERSARY_H_
