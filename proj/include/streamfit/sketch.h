// Copyright 2026 The Streamfit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STREAMFIT_SKETCH_H_
#define STREAMFIT_SKETCH_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "streamfit/fixed.h"
#include "streamfit/matrix.h"
#include "streamfit/memory_meter.h"

namespace streamfit {

struct SketchConfig {
  double zeta = 0.001;
  // Target relative accuracy of degree estimates.
  double lambda = 0.01;
  // Compressed-set slack.
  double delta = 0.1;
  int64_t close_capacity = 1;
  // Expected sample count of a sketch (sigma).
  double sample_factor = 1;
  // Smallest ladder size.
  double min_size = 1;
  int instance_count = 1;
  uint64_t seed = 0;
  // Exact mode keeps every neighbor in the close queues and builds no
  // sketches.
  bool exact = false;

  // Asymptotic parameters with log base 2: close 2 L^4, min size L^4,
  // sigma L^2, zeta = lambda / 10, 4 ceil(L) instances.
  static SketchConfig Asymptotic(PointId n, uint64_t seed);
  static SketchConfig Exact(PointId n, uint64_t seed);
  // Desk-scale sketch mode: close 32, min size 16, sigma 32, zeta 0.2,
  // lambda 0.2, max(12, 4 ceil(L)) instances.
  static SketchConfig Scaled(PointId n, uint64_t seed);

  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
};

// Ladder sizes n, n/(1+zeta), ... down to min_size (inclusive).
std::vector<double> Ladder(PointId n, const SketchConfig& config);

struct WeightedSample {
  Fixed weight;
  PointId point = 0;

  auto operator<=>(const WeightedSample&) const = default;
};

// Seeded hash predicate deciding whether a point belongs to the random set
// of one (instance, ladder size) pair.
class SampleMembership {
 public:
  SampleMembership(uint64_t seed, std::span<const double> ladder,
                   double sample_factor);

  bool Contains(int instance, int ladder_index, PointId p) const;
  double probability(int ladder_index) const { return prob_[ladder_index]; }

 private:
  uint64_t seed_;
  std::vector<double> prob_;
};

// Pruned weighted sample for one owner, instance and companion size. Items
// are kept sorted; when the count exceeds the budget the largest-weight
// collection is dropped and its weight becomes the cutoff.
class PrunedSample {
 public:
  // Returns the change in stored items.
  int64_t Offer(Fixed weight, PointId point, double budget);

  const std::vector<WeightedSample>& items() const { return items_; }
  // 0 when nothing was ever pruned.
  Fixed cutoff() const { return cutoff_; }
  bool allocated() const { return allocated_; }

  // Length of the content a sketch with the smaller budget would hold: the
  // longest whole-collection prefix whose size stays within budget.
  size_t PrefixFor(double budget) const;

 private:
  friend class SketchPool;
  std::vector<WeightedSample> items_;
  Fixed cutoff_;
  bool allocated_ = false;
};

// Bounded queue of the nearest neighbors by (distance, id).
class CloseNeighbors {
 public:
  explicit CloseNeighbors(int64_t capacity = 1) : capacity_(capacity) {}

  // Returns the change in stored entries.
  int64_t Offer(Fixed d, PointId other);
  void Finalize();

  // Sorted ascending after Finalize.
  const std::vector<WeightedSample>& entries() const { return heap_; }
  bool full() const { return static_cast<int64_t>(heap_.size()) >= capacity_; }
  // True iff every neighbor within w is stored.
  bool Knows(Fixed w) const;
  // |N_w| including the owner, counted from the stored entries.
  int64_t CountWithin(Fixed w) const;

 private:
  friend class SketchPool;
  int64_t capacity_;
  std::vector<WeightedSample> heap_;
  bool sorted_ = false;
};

// Sorted weights with successor and predecessor queries.
class CompressedSet {
 public:
  CompressedSet() = default;
  explicit CompressedSet(std::vector<Fixed> weights);

  // Smallest stored weight > w.
  std::optional<Fixed> Successor(Fixed w) const;
  // Largest stored weight < w, or 0 when none exists.
  Fixed Predecessor(Fixed w) const;
  bool Contains(Fixed w) const;
  const std::vector<Fixed>& values() const { return values_; }
  size_t size() const { return values_.size(); }

 private:
  std::vector<Fixed> values_;
};

// A reported sketch: the (s, s) sample whose governing weight best matches
// the queried w.
struct ReportedSketch {
  int ladder_index = 0;
  double size = 0;
  Fixed governing;
  // Sample members with edge weights, sorted; the owner appears with
  // weight 0 when it belongs to the random set.
  std::vector<WeightedSample> samples;
};

// All per-vertex streaming state of one run: close queues plus, outside
// exact mode, instance_count independent sketch families per vertex.
class SketchPool {
 public:
  SketchPool(PointId n, SketchConfig config, MemoryMeter* meter = nullptr);

  // Throws PhaseError after Finalize. Entries need not form a complete
  // matrix; completeness is the caller's concern.
  void Ingest(const DistanceEntry& e);
  void Finalize();
  bool finalized() const { return finalized_; }

  PointId n() const { return n_; }
  const SketchConfig& config() const { return config_; }
  const std::vector<double>& ladder() const { return ladder_; }
  const SampleMembership& membership() const { return membership_; }
  const CloseNeighbors& close(PointId v) const { return close_[v]; }
  Fixed max_weight() const { return max_weight_; }

  bool Knows(PointId v, Fixed w) const;
  // Sorted N_w(v) including v; requires Knows(v, w).
  std::vector<PointId> ExactNeighborhood(PointId v, Fixed w) const;
  int64_t ExactDegree(PointId v, Fixed w) const;

  // Sketch (s_j, s_k) for j <= k: the stored sample of companion size s_k
  // truncated to the budget of size s_j. governing receives its largest
  // weight (unset when empty).
  std::vector<WeightedSample> Derived(PointId v, int instance, int j, int k,
                                      std::optional<Fixed>* governing) const;

  // Governing-weight selection between the candidates just above and just
  // below w. Empty when v has no non-empty (s, s) sketch.
  std::optional<ReportedSketch> Report(PointId v, Fixed w, int instance) const;

  // Exact from the close queue when it knows v at w, else the scaled
  // sample count of the reported sketch. Falls back to the close-queue
  // lower bound when no sketch exists.
  double EstimateDegree(PointId v, Fixed w, int instance) const;

  CompressedSet BuildCompressedSet() const;

  // Words retained: 2 per stored sample, 2 per close entry, 2 per
  // allocated sketch.
  int64_t words() const { return words_; }

  void Save(std::ostream& out) const;
  static SketchPool Load(std::istream& in);

 private:
  size_t Slot(PointId v, int instance, int k) const {
    return (static_cast<size_t>(v) * config_.instance_count + instance) *
               ladder_.size() +
           k;
  }
  double Budget(int j, int k) const;
  void Account(int64_t words);

  PointId n_;
  SketchConfig config_;
  std::vector<double> ladder_;
  // Largest s_j that may pair with companion size s_k.
  std::vector<int> widest_;
  SampleMembership membership_;
  std::vector<CloseNeighbors> close_;
  std::vector<PrunedSample> samples_;
  MemoryMeter* meter_;
  int64_t words_ = 0;
  Fixed max_weight_;
  bool finalized_ = false;
};

}  // namespace streamfit

#endif  // STREAMFIT_SKETCH_H_
