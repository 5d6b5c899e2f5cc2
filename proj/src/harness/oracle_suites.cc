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

#include "locpriv/harness/oracle_suites.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "locpriv/adversary.h"
#include "locpriv/metrics.h"
#include "locpriv/oracle.h"
#include "locpriv/peb.h"

namespace locpriv::harness {
namespace {

int UniformInt(int lo, int hi, Rng& rng) {
  const int span = hi - lo + 1;
  return lo + std::min(span - 1, static_cast<int>(UniformUnit(rng) * span));
}

Vector DirichletWeights(int n, Rng& rng) {
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = -std::log1p(-UniformUnit(rng));
  return w;
}

// Records a relation check. `excess` > 0 means the relation failed.
void Check(SuiteResult& result, double excess, const std::string& what) {
  result.worst = std::max(result.worst, excess);
  if (!(excess <= 0.0)) {
    if (result.failures == 0) result.detail = what;
    ++result.failures;
  }
}

void Error(SuiteResult& result, const absl::Status& status) {
  if (result.failures == 0) result.detail = status.ToString();
  ++result.failures;
}

struct GridInstance {
  Profile pi;
  Channel base;
};

const DistMatrix& SanFranciscoDistance() {
  static const DistMatrix* d =
      new DistMatrix(DistanceMatrix(*Grid::Create(Region::SanFrancisco())));
  return *d;
}

GridInstance MakeGridInstance(int index, Rng& rng) {
  const DistMatrix& d = SanFranciscoDistance();
  const int n = d.size();
  Profile pi = RandomProfile(n, rng, /*sparse=*/index % 2 == 1);
  switch (index % 3) {
    case 0:
      return {std::move(pi), *LocationHiding(UniformUnit(rng), n)};
    case 1:
      return {std::move(pi), *ExponentialMechanism(2.0 * UniformUnit(rng), d)};
    default:
      return {std::move(pi), RandomChannel(n, n, rng)};
  }
}

}  // namespace

Profile RandomProfile(int n, Rng& rng, bool sparse) {
  Vector w = DirichletWeights(n, rng);
  if (sparse) {
    const int keep = UniformInt(0, n - 1, rng);
    for (int i = 0; i < n; ++i) {
      if (i != keep && UniformUnit(rng) < 1.0 / 3.0) w[i] = 0.0;
    }
  }
  return *Profile::Normalize(std::move(w));
}

Channel RandomChannel(int n, int m, Rng& rng) {
  Matrix f(n, m);
  for (int x = 0; x < n; ++x) {
    const Vector w = DirichletWeights(m, rng);
    f.row(x) = (w / w.sum()).transpose();
  }
  return *Channel::Create(std::move(f));
}

DistMatrix RandomDistance(int n, Rng& rng) {
  std::vector<double> px(n), py(n);
  const bool line = UniformUnit(rng) < 0.5;
  for (int i = 0; i < n; ++i) {
    px[i] = line ? UniformInt(0, n, rng) : UniformUnit(rng);
    py[i] = line ? 0.0 : UniformUnit(rng);
  }
  Matrix d(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      d(a, b) = std::abs(px[a] - px[b]) + std::abs(py[a] - py[b]);
    }
  }
  return *DistMatrix::Create(std::move(d));
}

SuiteResult RemapIdentitySuite(int instances, std::uint64_t seed) {
  SuiteResult result;
  result.name = "remap_identity";
  const DistMatrix& d = SanFranciscoDistance();
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    const GridInstance inst = MakeGridInstance(i, rng);
    absl::StatusOr<RemappedChannel> remapped =
        RemapSporadic(inst.base, inst.pi, d);
    if (!remapped.ok()) {
      Error(result, remapped.status());
      continue;
    }
    const double q = *TheoreticalQavg(remapped->channel, inst.pi, d);
    const double p = *TheoreticalPaeOpt(remapped->channel, inst.pi, d);
    Check(result, std::abs(p - q) - 1e-9,
          absl::StrCat("instance ", i, ": P_AE ", p, " vs Q ", q));
    ++result.instances;
  }
  return result;
}

SuiteResult RemapMonotonicitySuite(int instances, std::uint64_t seed) {
  SuiteResult result;
  result.name = "remap_monotonicity";
  const DistMatrix& d = SanFranciscoDistance();
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    const GridInstance inst = MakeGridInstance(i, rng);
    absl::StatusOr<RemappedChannel> remapped =
        RemapSporadic(inst.base, inst.pi, d);
    if (!remapped.ok()) {
      Error(result, remapped.status());
      continue;
    }
    const double q_base = *TheoreticalQavg(inst.base, inst.pi, d);
    const double q_remap = *TheoreticalQavg(remapped->channel, inst.pi, d);
    const double p_base = *TheoreticalPaeOpt(inst.base, inst.pi, d);
    const double p_remap = *TheoreticalPaeOpt(remapped->channel, inst.pi, d);
    Check(result, q_remap - q_base - 1e-12,
          absl::StrCat("instance ", i, ": remapped Q ", q_remap, " > base ",
                       q_base));
    Check(result, p_base - p_remap - 1e-12,
          absl::StrCat("instance ", i, ": remapped P_AE ", p_remap,
                       " < base ", p_base));
    ++result.instances;
  }
  return result;
}

SuiteResult ExhaustiveRemapSuite(int instances, std::uint64_t seed,
                                 int max_outputs) {
  SuiteResult result;
  result.name = "exhaustive_remap";
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    const int m = UniformInt(2, max_outputs, rng);
    const DistMatrix d = RandomDistance(m, rng);
    const Profile pi = RandomProfile(m, rng, /*sparse=*/i % 2 == 1);
    Channel base = RandomChannel(m, m, rng);
    if (i % 3 == 1) base = *LocationHiding(UniformUnit(rng), m);
    if (i % 3 == 2) base = *ExponentialMechanism(3.0 * UniformUnit(rng), d);

    absl::StatusOr<RemappedChannel> remapped = RemapSporadic(base, pi, d);
    absl::StatusOr<RemapSearchResult> best = ExhaustiveBestRemap(base, pi, d);
    if (!remapped.ok() || !best.ok()) {
      Error(result, remapped.ok() ? best.status() : remapped.status());
      continue;
    }
    const double q = *TheoreticalQavg(remapped->channel, pi, d);
    Check(result, std::abs(q - best->qavg) - 1e-12,
          absl::StrCat("instance ", i, " (m=", m, "): remap Q ", q,
                       " vs exhaustive ", best->qavg));
    ++result.instances;
  }
  return result;
}

SuiteResult MemorylessMarginalSuite(int instances, std::uint64_t seed) {
  SuiteResult result;
  result.name = "memoryless_marginal";
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    const int n = UniformInt(2, 3, rng);
    const int m = UniformInt(2, 4, rng);
    const int r = UniformInt(1, 3, rng);
    const Profile pi = RandomProfile(n, rng);
    const DistMatrix d = RandomDistance(n, rng);
    absl::StatusOr<FullLppm> full = FullLppm::Random(n, m, r, rng);
    if (!full.ok()) {
      Error(result, full.status());
      continue;
    }
    absl::StatusOr<Channel> marginal = MarginalizeToMemoryless(pi, *full, r);
    if (!marginal.ok()) {
      Error(result, marginal.status());
      continue;
    }
    absl::StatusOr<FullLppm> memoryless = FullLppm::Memoryless(*marginal, r);
    absl::StatusOr<double> p_full = ExactMinPae(pi, *full, d, r, r);
    absl::StatusOr<double> p_marginal = ExactMinPae(pi, *memoryless, d, r, r);
    if (!p_full.ok() || !p_marginal.ok()) {
      Error(result, p_full.ok() ? p_marginal.status() : p_full.status());
      continue;
    }
    Check(result, *p_full - *p_marginal - 1e-12,
          absl::StrCat("instance ", i, " (n=", n, ", m=", m, ", r=", r,
                       "): full ", *p_full, " > memoryless ", *p_marginal));
    ++result.instances;
  }
  return result;
}

namespace {

// Likelihood vectors of `r` releases of i.i.d. locations through `channel`.
std::vector<Vector> SampleLikelihoods(const Channel& channel, const Profile& pi,
                                      int r, Rng& rng) {
  std::vector<Vector> out;
  const Matrix& f = channel.matrix();
  for (const CellId x : SampleIid(pi, r, rng)) {
    const CellId z =
        SampleIndex({f.row(x).data(), static_cast<std::size_t>(f.cols())}, rng);
    out.push_back(channel.Column(z));
  }
  return out;
}

}  // namespace

SuiteResult EmAscentSuite(int runs, std::uint64_t seed) {
  SuiteResult result;
  result.name = "em_ascent";
  Rng rng(seed);
  for (int i = 0; i < runs; ++i) {
    const int n = UniformInt(2, 8, rng);
    const int r = UniformInt(5, 60, rng);
    const Channel channel = RandomChannel(n, n, rng);
    const Profile truth = RandomProfile(n, rng, /*sparse=*/i % 2 == 1);
    const std::vector<Vector> l = SampleLikelihoods(channel, truth, r, rng);
    absl::StatusOr<EmResult> em = EmMle(l, Profile::Uniform(n), EmConfig{});
    if (!em.ok()) {
      Error(result, em.status());
      continue;
    }
    const std::vector<double>& ll = em->log_likelihood;
    for (std::size_t t = 1; t < ll.size(); ++t) {
      const double slack = 1e-12 * std::max(1.0, std::abs(ll[t - 1]));
      Check(result, ll[t - 1] - ll[t] - slack,
            absl::StrCat("run ", i, " iteration ", t, ": ", ll[t - 1], " -> ",
                         ll[t]));
    }
    ++result.instances;
  }
  return result;
}

SuiteResult EmUniquenessSuite(int runs, std::uint64_t seed) {
  // Weakly informative channels make EM crawl, so the default iteration cap
  // would compare unfinished runs rather than maximizers.
  static constexpr EmConfig kConvergedEm{.tolerance = 1e-10,
                                         .max_iters = 1'000'000};
  SuiteResult result;
  result.name = "em_uniqueness";
  Rng rng(seed);
  for (int i = 0; i < runs; ++i) {
    const int n = UniformInt(3, 6, rng);
    const int r = UniformInt(30, 100, rng);
    const Channel channel = RandomChannel(n, n, rng);
    const Profile truth = RandomProfile(n, rng);
    const std::vector<Vector> l = SampleLikelihoods(channel, truth, r, rng);
    std::vector<Vector> estimates;
    for (int k = 0; k < 5; ++k) {
      const Vector w = 0.9 * RandomProfile(n, rng).probs() +
                       Vector::Constant(n, 0.1 / n);
      absl::StatusOr<EmResult> em =
          EmMle(l, *Profile::Normalize(w), kConvergedEm);
      if (!em.ok()) {
        Error(result, em.status());
        break;
      }
      if (!em->converged) {
        Error(result, absl::DeadlineExceededError(
                          absl::StrCat("run ", i, ": EM did not converge")));
        break;
      }
      estimates.push_back(em->profile.probs());
    }
    if (estimates.size() != 5) continue;
    double spread = 0.0;
    for (std::size_t a = 0; a < estimates.size(); ++a) {
      for (std::size_t b = a + 1; b < estimates.size(); ++b) {
        spread = std::max(spread,
                          (estimates[a] - estimates[b]).lpNorm<Eigen::Infinity>());
      }
    }
    Check(result, spread - 1e-4,
          absl::StrCat("run ", i, " (n=", n, ", r=", r, "): spread ", spread));
    ++result.instances;
  }
  return result;
}

SuiteResult AttackEquivalenceSuite(int traces, std::uint64_t seed) {
  SuiteResult result;
  result.name = "attack_equivalence";
  const Region region{.lat_min = 37.70,
                      .lat_max = 37.75,
                      .lon_min = -122.45,
                      .lon_max = -122.40,
                      .rows = 5,
                      .cols = 5};
  const DistMatrix d = DistanceMatrix(*Grid::Create(region));
  const int n = d.size();
  Rng rng(seed);
  for (int i = 0; i < traces; ++i) {
    const Profile pi = RandomProfile(n, rng, /*sparse=*/i % 2 == 1);
    const Matrix rows = pi.probs().transpose().replicate(n, 1);
    const MarkovModel chain = *MarkovModel::Create(pi, rows);
    const Channel base = i % 2 == 0
                             ? *LocationHiding(UniformUnit(rng), n)
                             : *ExponentialMechanism(3.0 * UniformUnit(rng), d);
    absl::StatusOr<SporadicMechanism> mech =
        SporadicMechanism::Create(base, RandomProfile(n, rng), d);
    if (!mech.ok()) {
      Error(result, mech.status());
      continue;
    }
    const Trace x = SampleIid(pi, 60, rng);
    absl::StatusOr<TraceRecord> record = RunTrace(*mech, x, rng);
    if (!record.ok()) {
      Error(result, record.status());
      continue;
    }
    const Estimate sporadic = *AttackSporadic(*record, pi, d);
    const Estimate markov = *AttackMarkov(*record, chain, d);
    int mismatches = 0;
    for (int t = 0; t < record->length(); ++t) {
      if (sporadic.x_hat[t] != markov.x_hat[t]) ++mismatches;
    }
    Check(result, mismatches,
          absl::StrCat("trace ", i, ": ", mismatches, " differing estimates"));
    ++result.instances;
  }
  return result;
}

std::vector<SuiteResult> RunAllSuites(std::uint64_t seed) {
  return {RemapIdentitySuite(50, seed),     RemapMonotonicitySuite(50, seed),
          ExhaustiveRemapSuite(200, seed),  MemorylessMarginalSuite(100, seed),
          EmAscentSuite(100, seed),         EmUniquenessSuite(100, seed),
          AttackEquivalenceSuite(20, seed)};
}

}  // namespace locpriv::harness
