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

#include "locpriv/harness/curves.h"

#include <algorithm>
#include <limits>
#include <set>

#include "absl/strings/str_cat.h"

namespace locpriv::harness {
namespace {

absl::StatusOr<std::string> ResolveFilter(const std::vector<ResultRow>& rows,
                                          const std::string& requested,
                                          std::string ResultRow::*field,
                                          const char* name) {
  if (!requested.empty()) return requested;
  std::set<std::string> values;
  for (const ResultRow& r : rows) values.insert(r.*field);
  if (values.size() != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "rows mix ", values.size(), " ", name, " values; select one"));
  }
  return *values.begin();
}

}  // namespace

std::optional<double> Interpolate(const std::vector<CurvePoint>& points,
                                  double q) {
  if (points.empty() || q < points.front().q || q > points.back().q) {
    return std::nullopt;
  }
  auto upper = std::lower_bound(
      points.begin(), points.end(), q,
      [](const CurvePoint& p, double value) { return p.q < value; });
  if (upper->q == q) return upper->p;
  const CurvePoint& hi = *upper;
  const CurvePoint& lo = *(upper - 1);
  const double t = (q - lo.q) / (hi.q - lo.q);
  return lo.p + t * (hi.p - lo.p);
}

absl::StatusOr<TradeoffCurve> InterpolateCurves(
    const std::vector<ResultRow>& rows, const CurveOptions& options) {
  if (options.n_points < 2 || !(options.q_min < options.q_max)) {
    return absl::InvalidArgumentError(
        "curve grid needs n_points >= 2 and q_min < q_max");
  }
  absl::StatusOr<std::string> window =
      ResolveFilter(rows, options.window, &ResultRow::window, "window");
  if (!window.ok()) return window.status();
  absl::StatusOr<std::string> mechanism = ResolveFilter(
      rows, options.mechanism, &ResultRow::mechanism, "mechanism");
  if (!mechanism.ok()) return mechanism.status();

  // (user, param) -> sums over repetitions.
  struct Sums {
    double q = 0.0;
    double p = 0.0;
    int count = 0;
  };
  std::map<std::pair<std::string, double>, Sums> cells;
  for (const ResultRow& r : rows) {
    if (r.window != *window || r.mechanism != *mechanism) continue;
    Sums& s = cells[{r.user, r.param}];
    s.q += r.qavg_km;
    s.p += r.pae_km;
    ++s.count;
  }

  TradeoffCurve curve;
  for (const auto& [key, s] : cells) {
    curve.user_points[key.first].push_back(
        CurvePoint{.q = s.q / s.count, .p = s.p / s.count});
  }
  for (auto& [user, points] : curve.user_points) {
    std::stable_sort(points.begin(), points.end(),
                     [](const CurvePoint& a, const CurvePoint& b) {
                       return a.q < b.q;
                     });
    // Points sharing a quality value are merged into their mean.
    std::vector<CurvePoint> merged;
    for (std::size_t i = 0; i < points.size();) {
      std::size_t j = i;
      double p_sum = 0.0;
      while (j < points.size() && points[j].q == points[i].q) {
        p_sum += points[j].p;
        ++j;
      }
      merged.push_back(CurvePoint{.q = points[i].q,
                                  .p = p_sum / static_cast<double>(j - i)});
      i = j;
    }
    points = std::move(merged);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double step = (options.q_max - options.q_min) / (options.n_points - 1);
  bool any = false;
  for (int k = 0; k < options.n_points; ++k) {
    const double q =
        k == options.n_points - 1 ? options.q_max : options.q_min + k * step;
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    int users = 0;
    for (const auto& [user, points] : curve.user_points) {
      if (std::optional<double> p = Interpolate(points, q)) {
        sum += *p;
        lo = std::min(lo, *p);
        hi = std::max(hi, *p);
        ++users;
      }
    }
    curve.q_grid.push_back(q);
    curve.n_users.push_back(users);
    // Rounding in the sum must not push the mean outside [min, max].
    curve.mean.push_back(users > 0 ? std::clamp(sum / users, lo, hi) : nan);
    curve.min.push_back(users > 0 ? lo : nan);
    curve.max.push_back(users > 0 ? hi : nan);
    any = any || users > 0;
  }
  if (!any) {
    return absl::FailedPreconditionError(
        "no user's quality range intersects the curve grid");
  }
  return curve;
}

std::string CurveToCsv(const TradeoffCurve& curve) {
  std::string out = "q_km,mean,min,max,n_users\n";
  for (std::size_t k = 0; k < curve.q_grid.size(); ++k) {
    absl::StrAppend(&out, FormatDouble(curve.q_grid[k]), ",");
    if (curve.n_users[k] > 0) {
      absl::StrAppend(&out, FormatDouble(curve.mean[k]), ",",
                      FormatDouble(curve.min[k]), ",",
                      FormatDouble(curve.max[k]), ",");
    } else {
      absl::StrAppend(&out, ",,,");
    }
    absl::StrAppend(&out, curve.n_users[k], "\n");
  }
  return out;
}

}  // namespace locpriv::harness
