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

#ifndef LOCPRIV_COMMON_H_
#define LOCPRIV_COMMON_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace locpriv {

// Index of a cell in a discretized region. Real, released and estimated
// locations all share this alphabet.
using CellId = int;

// A sequence of cells ordered by query number.
using Trace = std::vector<CellId>;

using Vector = Eigen::VectorXd;
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Every random draw in the library goes through this engine so that a seed
// fully determines a run.
using Rng = std::mt19937_64;

// Costs within this relative distance of the minimum are treated as tied.
inline constexpr double kTieRelativeTolerance = 1e-12;

// Returns the index of the smallest cost. Entries within
// kTieRelativeTolerance (relative to the largest magnitude) of the minimum
// count as ties, and the lowest index among them wins.
int ArgminLowestIndex(std::span<const double> costs);

// Draws an index with probability proportional to `weights`. The weights must
// be nonnegative with a positive sum.
int SampleIndex(std::span<const double> weights, Rng& rng);

// Uniform draw in [0, 1).
double UniformUnit(Rng& rng);

// Half the L1 distance between two probability vectors.
double TotalVariation(const Vector& p, const Vector& q);

}  // namespace locpriv

#endif  // LOCPRIV_COMMON_H_
