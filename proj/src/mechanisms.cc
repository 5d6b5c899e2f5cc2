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

#include "locpriv/mechanisms.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace locpriv {
namespace {

constexpr double kRowSumTolerance = 1e-9;
constexpr double kRowSumExact = 1e-12;

}  // namespace

absl::StatusOr<Channel> Channel::Create(Matrix f) {
  if (f.rows() == 0 || f.cols() == 0) {
    return absl::InvalidArgumentError("empty channel");
  }
  for (Eigen::Index x = 0; x < f.rows(); ++x) {
    for (Eigen::Index z = 0; z < f.cols(); ++z) {
      if (!std::isfinite(f(x, z)) || f(x, z) < 0.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("channel entry (", x, ", ", z, ") is ", f(x, z)));
      }
    }
    const double sum = f.row(x).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("channel row ", x, " sums to ", sum));
    }
    if (std::abs(sum - 1.0) > kRowSumExact) f.row(x) /= sum;
  }
  return Channel(std::move(f));
}

absl::StatusOr<RemapTable> RemapTable::Create(std::vector<CellId> targets,
                                              int num_outputs) {
  for (CellId t : targets) {
    if (t < 0 || t >= num_outputs) {
      return absl::OutOfRangeError(
          absl::StrCat("remap target ", t, " outside [0, ", num_outputs, ")"));
    }
  }
  return RemapTable(std::move(targets));
}

RemapTable RemapTable::Identity(int num_outputs) {
  std::vector<CellId> targets(num_outputs);
  for (int i = 0; i < num_outputs; ++i) targets[i] = i;
  return RemapTable(std::move(targets));
}

absl::StatusOr<Channel> Compose(const Channel& base, const RemapTable& remap) {
  if (remap.size() != base.num_outputs()) {
    return absl::InvalidArgumentError(
        absl::StrCat("remap covers ", remap.size(), " outputs, channel has ",
                     base.num_outputs()));
  }
  Matrix f = Matrix::Zero(base.num_inputs(), base.num_outputs());
  for (CellId tentative = 0; tentative < remap.size(); ++tentative) {
    f.col(remap[tentative]) += base.matrix().col(tentative);
  }
  return Channel::Create(std::move(f));
}

absl::StatusOr<Channel> LocationHiding(double alpha, int num_cells,
                                       bool exclusive) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in [0, 1], got ", alpha));
  }
  if (num_cells < 1) {
    return absl::InvalidArgumentError("location hiding needs cells");
  }
  const int n = num_cells;
  if (exclusive && n > 1) {
    const double off = (1.0 - alpha) / (n - 1);
    Matrix f = Matrix::Constant(n, n, off);
    f.diagonal().setConstant(alpha);
    return Channel::Create(std::move(f));
  }
  if (exclusive) return Channel::Create(Matrix::Identity(1, 1));
  Matrix f = Matrix::Constant(n, n, (1.0 - alpha) / n);
  f.diagonal().array() += alpha;
  return Channel::Create(std::move(f));
}

absl::StatusOr<Channel> ExponentialMechanism(double epsilon,
                                             const DistMatrix& d) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be >= 0, got ", epsilon));
  }
  const int n = d.size();
  Matrix f(n, n);
  for (int x = 0; x < n; ++x) {
    // d(x, x) = 0, so the largest exponent is zero and nothing overflows.
    f.row(x) = (-epsilon * d.matrix().row(x).array()).exp();
    f.row(x) /= f.row(x).sum();
  }
  return Channel::Create(std::move(f));
}

absl::StatusOr<Channel> BaseMechanismSpec::Build(const DistMatrix& d) const {
  switch (family) {
    case BaseFamily::kLocationHiding:
      return LocationHiding(parameter, d.size(), exclusive_hiding);
    case BaseFamily::kExponential:
      return ExponentialMechanism(parameter, d);
  }
  return absl::InvalidArgumentError("unknown base family");
}

Remapper::Remapper(Channel base, DistMatrix d_q)
    : base_(std::move(base)),
      base_t_(base_.matrix().transpose()),
      d_q_(std::move(d_q)) {}

absl::StatusOr<Remapper> Remapper::Create(Channel base, DistMatrix d_q) {
  if (base.num_inputs() != base.num_outputs() ||
      base.num_inputs() != d_q.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "remap needs a square channel over the distance alphabet; channel is ",
        base.num_inputs(), "x", base.num_outputs(), ", distance has ",
        d_q.size(), " cells"));
  }
  return Remapper(std::move(base), std::move(d_q));
}

RemapTable Remapper::Solve(const Vector& prior) const {
  const int m = base_.num_outputs();
  // weights(z~, x) = prior(x) * base(x, z~): the unnormalized posterior of x
  // given z~.
  const Matrix weights = base_t_ * prior.asDiagonal();
  const Vector marginal = weights.rowwise().sum();
  const Matrix cost = d_q_.ExpectedDistances(weights);

  std::vector<CellId> targets(m);
  for (int tentative = 0; tentative < m; ++tentative) {
    if (marginal[tentative] > 0.0) {
      targets[tentative] = ArgminLowestIndex(
          {cost.row(tentative).data(), static_cast<std::size_t>(cost.cols())});
    } else {
      targets[tentative] = tentative;
    }
  }
  return *RemapTable::Create(std::move(targets), m);
}

Vector Remapper::ComposedColumn(const RemapTable& table, CellId z) const {
  Vector column = Vector::Zero(base_.num_inputs());
  for (CellId tentative = 0; tentative < table.size(); ++tentative) {
    if (table[tentative] == z) column += base_t_.row(tentative).transpose();
  }
  return column;
}

CellId Remapper::SampleTentative(CellId x, Rng& rng) const {
  const Matrix& f = base_.matrix();
  return SampleIndex({f.row(x).data(), static_cast<std::size_t>(f.cols())},
                     rng);
}

absl::StatusOr<RemappedChannel> RemapSporadic(const Channel& base,
                                              const Profile& prior,
                                              const DistMatrix& d_q) {
  if (prior.size() != base.num_inputs()) {
    return absl::InvalidArgumentError(
        absl::StrCat("prior has ", prior.size(), " cells, channel has ",
                     base.num_inputs(), " inputs"));
  }
  absl::StatusOr<Remapper> remapper = Remapper::Create(base, d_q);
  if (!remapper.ok()) return remapper.status();
  RemapTable table = remapper->Solve(prior.probs());
  absl::StatusOr<Channel> composed = Compose(base, table);
  if (!composed.ok()) return composed.status();
  return RemappedChannel{.table = std::move(table),
                         .channel = *std::move(composed)};
}

SporadicMechanism::SporadicMechanism(Channel base, RemappedChannel remapped)
    : base_(std::move(base)),
      remapped_(std::move(remapped)),
      composed_t_(remapped_.channel.matrix().transpose()) {}

absl::StatusOr<SporadicMechanism> SporadicMechanism::Create(
    const Channel& base, const Profile& prior, const DistMatrix& d_q) {
  absl::StatusOr<RemappedChannel> remapped = RemapSporadic(base, prior, d_q);
  if (!remapped.ok()) return remapped.status();
  return SporadicMechanism(base, *std::move(remapped));
}

absl::StatusOr<Release> SporadicMechanism::Step(CellId x, Rng& rng) {
  if (x < 0 || x >= num_cells()) {
    return absl::OutOfRangeError(absl::StrCat("real cell ", x, " invalid"));
  }
  const Matrix& f = base_.matrix();
  const CellId tentative =
      SampleIndex({f.row(x).data(), static_cast<std::size_t>(f.cols())}, rng);
  const CellId z = remapped_.table[tentative];
  return Release{.z = z, .likelihood = composed_t_.row(z).transpose()};
}

Profile MarkovPriorUpdate(const Profile& belief, const MarkovModel& model) {
  Vector next = model.transitions().transpose() * belief.probs();
  // Stochastic rows keep the mass at one up to rounding.
  return *Profile::Normalize(std::move(next));
}

absl::StatusOr<Profile> MarkovPosterior(const Profile& prior,
                                        const Vector& likelihood) {
  if (likelihood.size() != prior.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("likelihood has ", likelihood.size(), " cells, prior has ",
                     prior.size()));
  }
  Vector joint = prior.probs().cwiseProduct(likelihood);
  if (!(joint.sum() > 0.0)) {
    return absl::FailedPreconditionError(
        "degenerate observation: zero probability under the prior");
  }
  return Profile::Normalize(std::move(joint));
}

MarkovMechanism::MarkovMechanism(std::shared_ptr<const Remapper> remapper,
                                 MarkovModel model)
    : remapper_(std::move(remapper)),
      model_(std::move(model)),
      belief_(model_.initial()),
      last_table_(RemapTable::Identity(remapper_->num_cells())) {}

absl::StatusOr<MarkovMechanism> MarkovMechanism::Create(
    std::shared_ptr<const Remapper> remapper, MarkovModel model) {
  if (remapper == nullptr) return absl::InvalidArgumentError("null remapper");
  if (model.size() != remapper->num_cells()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Markov model has ", model.size(), " cells, channel has ",
                     remapper->num_cells()));
  }
  return MarkovMechanism(std::move(remapper), std::move(model));
}

absl::StatusOr<Release> MarkovMechanism::Step(CellId x, Rng& rng) {
  if (x < 0 || x >= num_cells()) {
    return absl::OutOfRangeError(absl::StrCat("real cell ", x, " invalid"));
  }
  const CellId tentative = remapper_->SampleTentative(x, rng);
  last_table_ = remapper_->Solve(belief_.probs());
  const CellId z = last_table_[tentative];
  Vector likelihood = remapper_->ComposedColumn(last_table_, z);

  bool degenerate = false;
  absl::StatusOr<Profile> posterior = MarkovPosterior(belief_, likelihood);
  if (posterior.ok()) {
    belief_ = MarkovPriorUpdate(*posterior, model_);
  } else {
    degenerate = true;
    ++degenerate_steps_;
    belief_ = MarkovPriorUpdate(belief_, model_);
  }
  return Release{
      .z = z, .likelihood = std::move(likelihood), .degenerate = degenerate};
}

absl::Status TraceRecord::Validate(int num_cells) const {
  if (z.size() != x.size() || likelihoods.size() != x.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("trace record lengths differ: x=", x.size(),
                     " z=", z.size(), " likelihoods=", likelihoods.size()));
  }
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (x[r] < 0 || x[r] >= num_cells || z[r] < 0 || z[r] >= num_cells) {
      return absl::OutOfRangeError(absl::StrCat("bad cell at step ", r));
    }
    if (likelihoods[r].size() != num_cells) {
      return absl::InvalidArgumentError(
          absl::StrCat("likelihood at step ", r, " has ",
                       likelihoods[r].size(), " entries"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<TraceRecord> RunTrace(Mechanism& mechanism,
                                     std::span<const CellId> x, Rng& rng) {
  if (x.empty()) return absl::InvalidArgumentError("empty trace");
  TraceRecord record;
  record.x.assign(x.begin(), x.end());
  record.z.reserve(x.size());
  record.likelihoods.reserve(x.size());
  for (std::size_t r = 0; r < x.size(); ++r) {
    absl::StatusOr<Release> release = mechanism.Step(x[r], rng);
    if (!release.ok()) return release.status();
    record.z.push_back(release->z);
    record.likelihoods.push_back(std::move(release->likelihood));
    if (release->degenerate) record.degenerate_steps.push_back(int(r));
  }
  return record;
}

}  // namespace locpriv
