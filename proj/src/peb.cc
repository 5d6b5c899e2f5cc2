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

#include "locpriv/peb.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace locpriv {

absl::Status EmConfig::Validate() const {
  if (!(tolerance > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("EM tolerance must be positive, got ", tolerance));
  }
  if (max_iters < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("EM max_iters must be >= 1, got ", max_iters));
  }
  return absl::OkStatus();
}

LikelihoodSet::LikelihoodSet(int num_cells) : num_cells_(num_cells) {}

absl::Status LikelihoodSet::Add(const Vector& likelihood) {
  if (likelihood.size() != num_cells_) {
    return absl::InvalidArgumentError(
        absl::StrCat("likelihood has ", likelihood.size(), " entries, expected ",
                     num_cells_));
  }
  for (Eigen::Index i = 0; i < likelihood.size(); ++i) {
    if (!std::isfinite(likelihood[i]) || likelihood[i] < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("likelihood entry ", i, " is ", likelihood[i]));
    }
  }
  const int step = num_steps_++;
  if (!(likelihood.array() > 0.0).any()) {
    skipped_steps_.push_back(step);
    return absl::OkStatus();
  }
  std::string key(reinterpret_cast<const char*>(likelihood.data()),
                  sizeof(double) * likelihood.size());
  auto [it, inserted] = index_.try_emplace(std::move(key), num_distinct());
  if (inserted) {
    distinct_.push_back(likelihood);
    weights_.push_back(1.0);
  } else {
    weights_[it->second] += 1.0;
  }
  return absl::OkStatus();
}

Matrix LikelihoodSet::DistinctRows() const {
  Matrix rows(num_distinct(), num_cells_);
  for (int j = 0; j < num_distinct(); ++j) rows.row(j) = distinct_[j];
  return rows;
}

absl::StatusOr<EmResult> EmMle(std::span<const Vector> likelihoods,
                               const Profile& init, const EmConfig& config) {
  LikelihoodSet set(init.size());
  for (const Vector& l : likelihoods) {
    if (absl::Status s = set.Add(l); !s.ok()) return s;
  }
  return EmMle(set, init, config);
}

absl::StatusOr<EmResult> EmMle(const LikelihoodSet& likelihoods,
                               const Profile& init, const EmConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (init.size() != likelihoods.num_cells()) {
    return absl::InvalidArgumentError(
        absl::StrCat("initial profile has ", init.size(),
                     " cells, likelihoods have ", likelihoods.num_cells()));
  }
  if (!init.StrictlyPositive()) {
    return absl::InvalidArgumentError(
        "EM initialization must be strictly positive");
  }
  if (likelihoods.num_steps() == 0) {
    return absl::InvalidArgumentError("EM needs at least one observation");
  }

  EmResult result{.profile = init,
                  .iterations = 0,
                  .converged = false,
                  .log_likelihood = {},
                  .skipped_steps = likelihoods.skipped_steps()};
  if (likelihoods.num_distinct() == 0) {
    result.converged = true;
    return result;
  }

  const Matrix l = likelihoods.DistinctRows();
  const Vector w = Eigen::Map<const Vector>(likelihoods.weights().data(),
                                            likelihoods.num_distinct());
  const double total = w.sum();

  Vector pi = init.probs();
  for (int iter = 0;; ++iter) {
    const Vector mix = l * pi;
    result.log_likelihood.push_back(w.dot(mix.array().log().matrix()));
    if (iter == config.max_iters) break;

    Vector next =
        pi.cwiseProduct(l.transpose() * w.cwiseQuotient(mix)) / total;
    next /= next.sum();
    const double change = (next - pi).lpNorm<Eigen::Infinity>();
    pi = std::move(next);
    result.iterations = iter + 1;
    if (change < config.tolerance) {
      result.converged = true;
      result.log_likelihood.push_back(w.dot((l * pi).array().log().matrix()));
      break;
    }
  }
  absl::StatusOr<Profile> profile = Profile::Normalize(std::move(pi));
  if (!profile.ok()) return profile.status();
  result.profile = *std::move(profile);
  return result;
}

absl::StatusOr<Profile> Blend(const Profile& pi_ini, const Profile& pi_ml,
                              int r, double gamma) {
  if (pi_ini.size() != pi_ml.size()) {
    return absl::InvalidArgumentError("blend of profiles of different sizes");
  }
  if (r < 1) return absl::InvalidArgumentError("query index must be >= 1");
  if (!(gamma > 0.0)) return absl::InvalidArgumentError("gamma must be > 0");
  const double keep = std::pow(static_cast<double>(r), -gamma);
  return Profile::Normalize(keep * pi_ini.probs() +
                            (1.0 - keep) * pi_ml.probs());
}

absl::Status PebConfig::Validate() const {
  if (!(gamma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must be > 0, got ", gamma));
  }
  if (em_stride < 1) {
    return absl::InvalidArgumentError("em_stride must be >= 1");
  }
  return em.Validate();
}

PebMechanism::PebMechanism(PebConfig config,
                           std::shared_ptr<const Remapper> remapper)
    : config_(std::move(config)),
      remapper_(std::move(remapper)),
      store_(remapper_->num_cells()),
      pi_ml_(config_.pi_ini),
      design_(config_.pi_ini) {}

absl::StatusOr<PebMechanism> PebMechanism::Create(const PebConfig& config,
                                                  const DistMatrix& d_q) {
  absl::StatusOr<Channel> base = config.base.Build(d_q);
  if (!base.ok()) return base.status();
  absl::StatusOr<Remapper> remapper = Remapper::Create(*std::move(base), d_q);
  if (!remapper.ok()) return remapper.status();
  return Create(config,
                std::make_shared<const Remapper>(*std::move(remapper)));
}

absl::StatusOr<PebMechanism> PebMechanism::Create(
    const PebConfig& config, std::shared_ptr<const Remapper> remapper) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (remapper == nullptr) return absl::InvalidArgumentError("null remapper");
  if (config.pi_ini.size() != remapper->num_cells()) {
    return absl::InvalidArgumentError(
        absl::StrCat("pi_ini has ", config.pi_ini.size(),
                     " cells, channel has ", remapper->num_cells()));
  }
  return PebMechanism(config, std::move(remapper));
}

absl::StatusOr<Release> PebMechanism::Step(CellId x, Rng& rng) {
  if (x < 0 || x >= num_cells()) {
    return absl::OutOfRangeError(absl::StrCat("real cell ", x, " invalid"));
  }
  const int r = steps() + 1;
  if (r >= 2 && (r - 2) % config_.em_stride == 0) {
    const bool warm = config_.em.warm_start && pi_ml_.StrictlyPositive();
    const Profile init = warm ? pi_ml_ : Profile::Uniform(num_cells());
    absl::StatusOr<EmResult> em = EmMle(store_, init, config_.em);
    if (!em.ok()) return em.status();
    if (!em->converged) ++unconverged_;
    pi_ml_ = std::move(em->profile);
  }
  absl::StatusOr<Profile> design =
      Blend(config_.pi_ini, pi_ml_, r, config_.gamma);
  if (!design.ok()) return design.status();
  design_ = *std::move(design);

  const CellId tentative = remapper_->SampleTentative(x, rng);
  const RemapTable table = remapper_->Solve(design_.probs());
  const CellId z = table[tentative];
  Vector likelihood = remapper_->ComposedColumn(table, z);
  if (absl::Status s = store_.Add(likelihood); !s.ok()) return s;
  return Release{.z = z, .likelihood = std::move(likelihood)};
}

}  // namespace locpriv
