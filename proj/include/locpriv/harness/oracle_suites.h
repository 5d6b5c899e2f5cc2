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

// Randomized property suites over brute-force references. Each suite draws
// its instances from a seeded generator and reports the worst violation.

#ifndef LOCPRIV_HARNESS_ORACLE_SUITES_H_
#define LOCPRIV_HARNESS_ORACLE_SUITES_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "locpriv/common.h"
#include "locpriv/geo.h"
#include "locpriv/mechanisms.h"
#include "locpriv/mobility.h"

namespace locpriv::harness {

struct SuiteResult {
  std::string name;
  int instances = 0;
  int failures = 0;
  // Largest amount by which a checked relation was violated (<= 0 when all
  // hold with room to spare).
  double worst = -std::numeric_limits<double>::infinity();
  std::string detail;

  bool passed() const { return instances > 0 && failures == 0; }
};

// Random generators shared by the suites and tests.
// Flat-Dirichlet profile; with `sparse`, about a third of the cells get zero
// mass (at least one cell keeps mass).
Profile RandomProfile(int n, Rng& rng, bool sparse = false);
// Rows drawn from a flat Dirichlet distribution.
Channel RandomChannel(int n, int m, Rng& rng);
// Manhattan distances between random points in the unit square, or with
// probability one half, between random integer points on a short line (which
// produces exact ties).
DistMatrix RandomDistance(int n, Rng& rng);

// On the 25x10 San Francisco grid: the optimal adversary's error against a
// remapped channel equals its quality loss within 1e-9.
SuiteResult RemapIdentitySuite(int instances, std::uint64_t seed);

// Same instances: remapping never increases quality loss and never decreases
// the optimal adversary's error (1e-12 slack).
SuiteResult RemapMonotonicitySuite(int instances, std::uint64_t seed);

// Up to `max_outputs` outputs: the posterior-argmin remap attains the best
// quality loss over all deterministic remaps within 1e-12.
SuiteResult ExhaustiveRemapSuite(int instances, std::uint64_t seed,
                                 int max_outputs = 5);

// n <= 3, horizon <= 3, i.i.d. locations, random full-memory mechanisms: the
// memoryless marginal leaves the optimal adversary an error at least as large
// as the full mechanism (1e-12 slack).
SuiteResult MemorylessMarginalSuite(int instances, std::uint64_t seed);

// EM's observed-data log-likelihood never decreases between iterations.
SuiteResult EmAscentSuite(int runs, std::uint64_t seed);

// Five random strictly positive initializations reach estimates within 1e-4
// of each other for full-support channels. EM runs to a 1e-10 tolerance with a
// large iteration budget.
SuiteResult EmUniquenessSuite(int runs, std::uint64_t seed);

// When every transition row equals the initial profile, the Markov attack
// reproduces the sporadic attack step for step.
SuiteResult AttackEquivalenceSuite(int traces, std::uint64_t seed);

std::vector<SuiteResult> RunAllSuites(std::uint64_t seed);

}  // namespace locpriv::harness

#endif  // LOCPRIV_HARNESS_ORACLE_SUITES_H_
