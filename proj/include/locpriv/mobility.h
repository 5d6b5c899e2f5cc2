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

// Sporadic (i.i.d. profile) and first-order Markov mobility models: training
// from quantized traces and sampling synthetic traces.

#ifndef LOCPRIV_MOBILITY_H_
#define LOCPRIV_MOBILITY_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "locpriv/common.h"

namespace locpriv {

// Probability vector over cells. Entries are nonnegative and sum to one
// within 1e-12.
class Profile {
 public:
  // Accepts vectors whose sum is within 1e-9 of one and renormalizes them.
  static absl::StatusOr<Profile> Create(Vector p);
  // Scales nonnegative weights with a positive finite sum onto the simplex.
  static absl::StatusOr<Profile> Normalize(Vector weights);
  static Profile Uniform(int n);
  static Profile PointMass(int n, CellId cell);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](CellId cell) const { return p_[cell]; }
  const Vector& probs() const { return p_; }

  bool StrictlyPositive() const { return (p_.array() > 0.0).all(); }

 private:
  explicit Profile(Vector p) : p_(std::move(p)) {}

  Vector p_;
};

// Initial profile plus a row-stochastic transition matrix; row j holds
// M(. | j), the distribution of the next cell given the current cell j.
class MarkovModel {
 public:
  static absl::StatusOr<MarkovModel> Create(Profile initial,
                                            Matrix transitions);

  int size() const { return initial_.size(); }
  const Profile& initial() const { return initial_; }
  const Matrix& transitions() const { return transitions_; }

 private:
  MarkovModel(Profile initial, Matrix transitions)
      : initial_(std::move(initial)), transitions_(std::move(transitions)) {}

  Profile initial_;
  Matrix transitions_;
};

struct MarkovTraining {
  MarkovModel model;
  // Rows that had no outgoing transitions (and no pseudocount) and were set
  // to uniform.
  std::vector<CellId> uniform_rows;
};

// p_i = (count_i + pseudocount) / (total + n * pseudocount).
absl::StatusOr<Profile> TrainProfile(std::span<const Trace> traces,
                                     int num_cells, double pseudocount);

// Initial profile from all check-ins; transitions counted only between
// consecutive entries of the same trace.
absl::StatusOr<MarkovTraining> TrainMarkov(std::span<const Trace> traces,
                                           int num_cells, double pseudocount);

Trace SampleIid(const Profile& profile, int length, Rng& rng);
Trace SampleMarkov(const MarkovModel& model, int length, Rng& rng);

}  // namespace locpriv

#endif  // LOCPRIV_MOBILITY_H_
