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

// Obfuscation channels and mechanisms.
//
// A Channel is a memoryless conditional distribution f(z | x). Base channels
// (location hiding, exponential) are post-processed by an optimal remap: a
// tentative output z~ is replaced by the cell minimizing the posterior
// expected loss under a design prior. The sporadic mechanism uses a fixed
// prior; the Markov mechanism tracks the prior p(x^r | z^1..z^{r-1}) with a
// forward filter and re-solves the remap at every query.
//
// Every Mechanism reports, with each release z^r, the vector over x of
// f(z^r | z^1..z^{r-1}, x). That vector depends only on public information,
// so an adversary can recompute it.

#ifndef LOCPRIV_MECHANISMS_H_
#define LOCPRIV_MECHANISMS_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "locpriv/common.h"
#include "locpriv/geo.h"
#include "locpriv/mobility.h"

namespace locpriv {

// Row-stochastic matrix, f(x, z) = probability of releasing z from x.
class Channel {
 public:
  static absl::StatusOr<Channel> Create(Matrix f);

  int num_inputs() const { return static_cast<int>(f_.rows()); }
  int num_outputs() const { return static_cast<int>(f_.cols()); }
  double operator()(CellId x, CellId z) const { return f_(x, z); }
  const Matrix& matrix() const { return f_; }
  Vector Column(CellId z) const { return f_.col(z); }

 private:
  explicit Channel(Matrix f) : f_(std::move(f)) {}

  Matrix f_;
};

// Deterministic relabeling g of tentative outputs.
class RemapTable {
 public:
  static absl::StatusOr<RemapTable> Create(std::vector<CellId> targets,
                                           int num_outputs);
  static RemapTable Identity(int num_outputs);

  int size() const { return static_cast<int>(targets_.size()); }
  CellId operator[](CellId tentative) const { return targets_[tentative]; }
  const std::vector<CellId>& targets() const { return targets_; }

  friend bool operator==(const RemapTable&, const RemapTable&) = default;

 private:
  explicit RemapTable(std::vector<CellId> targets)
      : targets_(std::move(targets)) {}

  std::vector<CellId> targets_;
};

// f'(x, z) = sum over z~ with g(z~) = z of base(x, z~).
absl::StatusOr<Channel> Compose(const Channel& base, const RemapTable& remap);

// alpha * I + (1 - alpha) * uniform. With `exclusive`, the hidden branch picks
// uniformly among the other n - 1 cells instead.
absl::StatusOr<Channel> LocationHiding(double alpha, int num_cells,
                                       bool exclusive = false);

// f(x, z) proportional to exp(-epsilon * d(x, z)); epsilon in 1/km.
absl::StatusOr<Channel> ExponentialMechanism(double epsilon,
                                             const DistMatrix& d);

enum class BaseFamily { kLocationHiding, kExponential };

// A base channel family plus its tuning parameter (alpha or epsilon).
struct BaseMechanismSpec {
  BaseFamily family = BaseFamily::kLocationHiding;
  double parameter = 0.0;
  bool exclusive_hiding = false;

  absl::StatusOr<Channel> Build(const DistMatrix& d) const;
};

// Solves the posterior-argmin remap for a fixed base channel and loss
// distance, under priors that may change from query to query.
class Remapper {
 public:
  static absl::StatusOr<Remapper> Create(Channel base, DistMatrix d_q);

  int num_cells() const { return base_.num_inputs(); }
  const Channel& base() const { return base_; }
  const DistMatrix& distance() const { return d_q_; }

  // For each z~ with positive marginal under `prior`, the cell z minimizing
  // sum_x p(x | z~) d_q(x, z) (lowest id on ties). Zero-marginal z~ map to
  // themselves.
  RemapTable Solve(const Vector& prior) const;

  // Column z of the base channel composed with `table`.
  Vector ComposedColumn(const RemapTable& table, CellId z) const;

  // Samples a tentative output z~ from row x of the base channel.
  CellId SampleTentative(CellId x, Rng& rng) const;

 private:
  Remapper(Channel base, DistMatrix d_q);

  Channel base_;
  Matrix base_t_;  // base transposed: row z~ is column z~ of the base.
  DistMatrix d_q_;
};

struct RemappedChannel {
  RemapTable table;
  Channel channel;
};

absl::StatusOr<RemappedChannel> RemapSporadic(const Channel& base,
                                              const Profile& prior,
                                              const DistMatrix& d_q);

// Output of one query.
struct Release {
  CellId z = 0;
  // f(z | z-history, x) for every x.
  Vector likelihood;
  // True when the observation was impossible under the mechanism's own model
  // and its belief fell back to the prior.
  bool degenerate = false;
};

class Mechanism {
 public:
  virtual ~Mechanism() = default;

  virtual int num_cells() const = 0;
  virtual absl::StatusOr<Release> Step(CellId x, Rng& rng) = 0;
};

// Memoryless mechanism: base channel followed by a fixed remap table.
class SporadicMechanism final : public Mechanism {
 public:
  static absl::StatusOr<SporadicMechanism> Create(const Channel& base,
                                                  const Profile& prior,
                                                  const DistMatrix& d_q);

  int num_cells() const override { return remapped_.channel.num_inputs(); }
  absl::StatusOr<Release> Step(CellId x, Rng& rng) override;

  const RemappedChannel& remapped() const { return remapped_; }

 private:
  SporadicMechanism(Channel base, RemappedChannel remapped);

  Channel base_;
  RemappedChannel remapped_;
  Matrix composed_t_;
};

// p(x^{r+1} | z^r) = sum_{x^r} M(x^{r+1} | x^r) p(x^r | z^r).
Profile MarkovPriorUpdate(const Profile& belief, const MarkovModel& model);

// Bayes update prior(x) * likelihood(x) / normalizer. Returns
// FailedPrecondition when the normalizer is zero.
absl::StatusOr<Profile> MarkovPosterior(const Profile& prior,
                                        const Vector& likelihood);

// Output-based mechanism optimal under a hardwired Markov model. Before each
// query it holds p(x^r | z^1..z^{r-1}) (pi_0 at r = 1); the remap is solved
// against that prior, and the belief is advanced with the per-step channel
// column of the released cell.
class MarkovMechanism final : public Mechanism {
 public:
  static absl::StatusOr<MarkovMechanism> Create(
      std::shared_ptr<const Remapper> remapper, MarkovModel model);

  int num_cells() const override { return remapper_->num_cells(); }
  absl::StatusOr<Release> Step(CellId x, Rng& rng) override;

  // Prior for the next query.
  const Profile& belief() const { return belief_; }
  // Remap table used at the most recent query.
  const RemapTable& last_table() const { return last_table_; }
  int degenerate_steps() const { return degenerate_steps_; }

 private:
  MarkovMechanism(std::shared_ptr<const Remapper> remapper, MarkovModel model);

  std::shared_ptr<const Remapper> remapper_;
  MarkovModel model_;
  Profile belief_;
  RemapTable last_table_;
  int degenerate_steps_ = 0;
};

// What a run leaves behind for adversaries and metrics.
struct TraceRecord {
  Trace x;
  Trace z;
  std::vector<Vector> likelihoods;
  // 0-based query indices where the mechanism's belief fell back to its prior.
  std::vector<int> degenerate_steps;

  int length() const { return static_cast<int>(x.size()); }
  absl::Status Validate(int num_cells) const;
};

absl::StatusOr<TraceRecord> RunTrace(Mechanism& mechanism,
                                     std::span<const CellId> x, Rng& rng);

}  // namespace locpriv

#endif  // LOCPRIV_MECHANISMS_H_
