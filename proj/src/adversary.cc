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

#include "locpriv/adversary.h"

#include "absl/strings/str_cat.h"

namespace locpriv {
namespace {

absl::Status CheckRecord(const TraceRecord& record, int model_cells,
                         const DistMatrix& d) {
  if (model_cells != d.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("model has ", model_cells, " cells, distance has ",
                     d.size()));
  }
  return record.Validate(model_cells);
}

}  // namespace

CellId BayesEstimate(const Vector& belief, const DistMatrix& d) {
  const Vector cost = d.ExpectedDistances(belief);
  return ArgminLowestIndex({cost.data(), static_cast<std::size_t>(cost.size())});
}

absl::StatusOr<Estimate> AttackSporadic(const TraceRecord& record,
                                        const Profile& pi_test,
                                        const DistMatrix& d) {
  if (absl::Status s = CheckRecord(record, pi_test.size(), d); !s.ok()) {
    return s;
  }
  Estimate out;
  out.x_hat.reserve(record.length());
  for (int r = 0; r < record.length(); ++r) {
    const Vector joint = pi_test.probs().cwiseProduct(record.likelihoods[r]);
    if (joint.sum() > 0.0) {
      out.x_hat.push_back(BayesEstimate(joint, d));
    } else {
      out.degenerate_steps.push_back(r);
      out.x_hat.push_back(BayesEstimate(pi_test.probs(), d));
    }
  }
  return out;
}

absl::StatusOr<Estimate> AttackMarkov(const TraceRecord& record,
                                      const MarkovModel& model_test,
                                      const DistMatrix& d) {
  if (absl::Status s = CheckRecord(record, model_test.size(), d); !s.ok()) {
    return s;
  }
  Estimate out;
  out.x_hat.reserve(record.length());
  Profile prior = model_test.initial();
  for (int r = 0; r < record.length(); ++r) {
    absl::StatusOr<Profile> posterior =
        MarkovPosterior(prior, record.likelihoods[r]);
    if (!posterior.ok()) {
      out.degenerate_steps.push_back(r);
      posterior = prior;
    }
    out.x_hat.push_back(BayesEstimate(posterior->probs(), d));
    prior = MarkovPriorUpdate(*posterior, model_test);
  }
  return out;
}

}  // namespace locpriv
