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

// Privacy/quality tradeoff curves: each user's (Q_avg, P_AE) points, averaged
// over repetitions, are linearly interpolated onto a common quality grid and
// summarized across users.

#ifndef LOCPRIV_HARNESS_CURVES_H_
#define LOCPRIV_HARNESS_CURVES_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "locpriv/harness/experiment.h"

namespace locpriv::harness {

struct CurvePoint {
  double q = 0.0;
  double p = 0.0;
};

struct CurveOptions {
  double q_min = 0.0;
  double q_max = 4.0;
  int n_points = 41;
  // Rows of other windows or mechanisms are ignored. Empty means the rows
  // must all share one value.
  std::string window;
  std::string mechanism;
};

struct TradeoffCurve {
  std::vector<double> q_grid;
  // NaN where no user covers the grid point.
  std::vector<double> mean;
  std::vector<double> min;
  std::vector<double> max;
  std::vector<int> n_users;
  // Per user, the repetition-averaged points sorted by quality loss.
  std::map<std::string, std::vector<CurvePoint>> user_points;

  bool defined(int k) const { return n_users[k] > 0; }
};

// Linear interpolation through points sorted by q; nullopt outside
// [front.q, back.q].
std::optional<double> Interpolate(const std::vector<CurvePoint>& points,
                                  double q);

absl::StatusOr<TradeoffCurve> InterpolateCurves(
    const std::vector<ResultRow>& rows, const CurveOptions& options);

// CSV with header q_km,mean,min,max,n_users; undefined points leave the
// three statistics empty.
std::string CurveToCsv(const TradeoffCurve& curve);

}  // namespace locpriv::harness

#endif  // LOCPRIV_HARNESS_CURVES_H_
