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

#include "locpriv/common.h"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace locpriv {

int ArgminLowestIndex(std::span<const double> costs) {
  assert(!costs.empty());
  double lowest = costs[0];
  double scale = std::abs(costs[0]);
  for (double c : costs) {
    lowest = std::min(lowest, c);
    scale = std::max(scale, std::abs(c));
  }
  const double threshold = lowest + kTieRelativeTolerance * scale;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (costs[i] <= threshold) return static_cast<int>(i);
  }
  return 0;  // unreachable for finite input
}

double UniformUnit(Rng& rng) {
  // 53 random bits mapped onto [0, 1); independent of the standard library's
  // distribution implementations so streams match across toolchains.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int SampleIndex(std::span<const double> weights, Rng& rng) {
  assert(!weights.empty());
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = UniformUnit(rng) * total;
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = static_cast<int>(i);
    if (target < cumulative) return last_positive;
  }
  return last_positive;
}

double TotalVariation(const Vector& p, const Vector& q) {
  assert(p.size() == q.size());
  return 0.5 * (p - q).cwiseAbs().sum();
}

}  // namespace locpriv
