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

// Quality loss and adversary error, measured on runs or computed in closed
// form for memoryless channels. All values are in the distance's unit (km).

#ifndef LOCPRIV_METRICS_H_
#define LOCPRIV_METRICS_H_

#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "locpriv/adversary.h"
#include "locpriv/geo.h"
#include "locpriv/mechanisms.h"
#include "locpriv/mobility.h"

namespace locpriv {

// Half-open range [begin, end) of 0-based query indices.
struct StepWindow {
  int begin = 0;
  int end = 0;

  static StepWindow All(int length) { return {0, length}; }
  // Queries 1..floor(length / 2) in 1-based terms.
  static StepWindow FirstHalf(int length) { return {0, length / 2}; }
  static StepWindow LastHalf(int length) { return {length / 2, length}; }

  int size() const { return end - begin; }
};

// Mean of d(x^r, z^r) over the window and all records.
absl::StatusOr<double> EmpiricalQavg(std::span<const TraceRecord> records,
                                     const DistMatrix& d, StepWindow window);

// Mean of d(x^r, x_hat^r) over the window and all records.
absl::StatusOr<double> EmpiricalPae(std::span<const TraceRecord> records,
                                    std::span<const Estimate> estimates,
                                    const DistMatrix& d, StepWindow window);

// sum_x sum_z pi(x) f(z | x) d(x, z).
absl::StatusOr<double> TheoreticalQavg(const Channel& channel,
                                       const Profile& pi, const DistMatrix& d);

// sum_z min_x_hat sum_x pi(x) f(z | x) d(x, x_hat): the error of the optimal
// deterministic adversary against a memoryless channel.
absl::StatusOr<double> TheoreticalPaeOpt(const Channel& channel,
                                         const Profile& pi,
                                         const DistMatrix& d);

}  // namespace locpriv

#endif  // LOCPRIV_METRICS_H_
