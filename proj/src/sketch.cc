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

#include "streamfit/sketch.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "streamfit/errors.h"
#include "streamfit/seeds.h"

namespace streamfit {
namespace {

constexpr char kSnapshotMagic[8] = {'S', 'F', 'S', 'K', 'v', '1', 0, 0};
constexpr size_t kMaxLadder = 100000;

template <typename T>
void Put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T Get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw Error("truncated sketch snapshot");
  }
  return value;
}

}  // namespace

SketchConfig SketchConfig::Asymptotic(PointId n, uint64_t seed) {
  const double l = n >= 2 ? std::log2(static_cast<double>(n)) : 1.0;
  SketchConfig c;
  c.lambda = 0.01;
  c.zeta = c.lambda / 10;
  c.min_size = std::pow(l, 4);
  c.close_capacity = static_cast<int64_t>(std::ceil(2 * c.min_size));
  c.sample_factor = l * l;
  c.instance_count = 4 * static_cast<int>(std::ceil(l));
  c.seed = seed;
  return c;
}

SketchConfig SketchConfig::Exact(PointId n, uint64_t seed) {
  SketchConfig c;
  c.exact = true;
  c.close_capacity = std::max<int64_t>(1, n - 1);
  c.min_size = static_cast<double>(n) + 1;
  c.seed = seed;
  return c;
}

SketchConfig SketchConfig::Scaled(PointId n, uint64_t seed) {
  const double l = n >= 2 ? std::log2(static_cast<double>(n)) : 1.0;
  SketchConfig c;
  c.zeta = 0.2;
  c.lambda = 0.2;
  c.close_capacity = 32;
  c.min_size = 16;
  c.sample_factor = 32;
  c.instance_count = std::max(12, 4 * static_cast<int>(std::ceil(l)));
  c.seed = seed;
  return c;
}

void SketchConfig::Validate() const {
  if (!(zeta > 0 && zeta < 1)) throw ConfigError("zeta must lie in (0, 1)");
  if (!(lambda > 0 && lambda < 1)) throw ConfigError("lambda must lie in (0, 1)");
  if (!(delta > 0)) throw ConfigError("delta must be positive");
  if (close_capacity < 1) throw ConfigError("close_capacity must be >= 1");
  if (instance_count < 1) throw ConfigError("instance_count must be >= 1");
  if (!(sample_factor > 0)) throw ConfigError("sample_factor must be positive");
  if (!(min_size >= 1)) throw ConfigError("min_size must be >= 1");
  if (!exact && static_cast<double>(close_capacity) < 2 * min_size) {
    throw ConfigError("close_capacity must be at least 2 * min_size");
  }
}

nlohmann::json SketchConfig::ToJson() const {
  return {{"zeta", zeta},
          {"lambda", lambda},
          {"delta", delta},
          {"close_capacity", close_capacity},
          {"sample_factor", sample_factor},
          {"min_size", min_size},
          {"instance_count", instance_count},
          {"seed", seed},
          {"exact", exact}};
}

std::vector<double> Ladder(PointId n, const SketchConfig& config) {
  std::vector<double> out;
  if (config.exact) return out;
  for (double s = n; s >= config.min_size; s /= 1 + config.zeta) {
    out.push_back(s);
    if (out.size() > kMaxLadder) throw ConfigError("ladder too long; raise zeta");
  }
  return out;
}

SampleMembership::SampleMembership(uint64_t seed,
                                   std::span<const double> ladder,
                                   double sample_factor)
    : seed_(SubSeed(seed, "membership")) {
  for (double s : ladder) prob_.push_back(std::min(1.0, sample_factor / s));
}

bool SampleMembership::Contains(int instance, int ladder_index,
                                PointId p) const {
  uint64_t h = HashCombine(seed_, static_cast<uint64_t>(instance));
  h = HashCombine(h, static_cast<uint64_t>(ladder_index));
  h = HashCombine(h, static_cast<uint64_t>(p));
  return UnitInterval(h) < prob_[ladder_index];
}

int64_t PrunedSample::Offer(Fixed weight, PointId point, double budget) {
  if (cutoff_ != Fixed() && weight >= cutoff_) return 0;
  allocated_ = true;
  WeightedSample item{weight, point};
  items_.insert(std::lower_bound(items_.begin(), items_.end(), item), item);
  int64_t delta = 1;
  while (static_cast<double>(items_.size()) > budget) {
    Fixed top = items_.back().weight;
    while (!items_.empty() && items_.back().weight == top) {
      items_.pop_back();
      --delta;
    }
    cutoff_ = top;
  }
  return delta;
}

size_t PrunedSample::PrefixFor(double budget) const {
  size_t kept = 0;
  size_t i = 0;
  while (i < items_.size()) {
    size_t j = i;
    while (j < items_.size() && items_[j].weight == items_[i].weight) ++j;
    if (static_cast<double>(j) > budget) break;
    kept = j;
    i = j;
  }
  return kept;
}

int64_t CloseNeighbors::Offer(Fixed d, PointId other) {
  WeightedSample item{d, other};
  if (static_cast<int64_t>(heap_.size()) < capacity_) {
    heap_.push_back(item);
    std::push_heap(heap_.begin(), heap_.end());
    return 1;
  }
  if (item < heap_.front()) {
    std::pop_heap(heap_.begin(), heap_.end());
    heap_.back() = item;
    std::push_heap(heap_.begin(), heap_.end());
  }
  return 0;
}

void CloseNeighbors::Finalize() {
  if (!sorted_) std::sort(heap_.begin(), heap_.end());
  sorted_ = true;
}

bool CloseNeighbors::Knows(Fixed w) const {
  return !full() || w < heap_.back().weight;
}

int64_t CloseNeighbors::CountWithin(Fixed w) const {
  auto it = std::partition_point(
      heap_.begin(), heap_.end(),
      [w](const WeightedSample& s) { return s.weight <= w; });
  return 1 + (it - heap_.begin());
}

CompressedSet::CompressedSet(std::vector<Fixed> weights)
    : values_(std::move(weights)) {
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
}

std::optional<Fixed> CompressedSet::Successor(Fixed w) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), w);
  if (it == values_.end()) return std::nullopt;
  return *it;
}

Fixed CompressedSet::Predecessor(Fixed w) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), w);
  if (it == values_.begin()) return Fixed();
  return *std::prev(it);
}

bool CompressedSet::Contains(Fixed w) const {
  return std::binary_search(values_.begin(), values_.end(), w);
}

SketchPool::SketchPool(PointId n, SketchConfig config, MemoryMeter* meter)
    : n_(n),
      config_(config),
      ladder_((config_.Validate(), Ladder(n, config_))),
      membership_(config_.seed, ladder_, config_.sample_factor),
      close_(n, CloseNeighbors(config_.exact ? std::max<int64_t>(1, n - 1)
                                             : config_.close_capacity)),
      meter_(meter) {
  widest_.resize(ladder_.size());
  for (size_t k = 0; k < ladder_.size(); ++k) {
    size_t j = 0;
    while (ladder_[j] > 2 * ladder_[k]) ++j;
    widest_[k] = static_cast<int>(j);
  }
  samples_.resize(static_cast<size_t>(n) * config_.instance_count *
                  ladder_.size());
}

double SketchPool::Budget(int j, int k) const {
  return (1 + config_.zeta / 2) * (ladder_[j] / ladder_[k]) *
         config_.sample_factor;
}

void SketchPool::Account(int64_t words) {
  words_ += words;
  if (meter_ == nullptr) return;
  if (words > 0) meter_->Add(words);
  if (words < 0) meter_->Remove(-words);
}

void SketchPool::Ingest(const DistanceEntry& e) {
  if (finalized_) throw PhaseError("ingest after finalize");
  max_weight_ = std::max(max_weight_, e.d);
  const int kinds = static_cast<int>(ladder_.size());
  for (auto [x, y] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
    Account(2 * close_[x].Offer(e.d, y));
    for (int inst = 0; inst < config_.instance_count; ++inst) {
      for (int k = 0; k < kinds; ++k) {
        PrunedSample& ps = samples_[Slot(x, inst, k)];
        if (ps.cutoff_ != Fixed() && e.d >= ps.cutoff_) continue;
        if (!membership_.Contains(inst, k, y)) continue;
        const bool fresh = !ps.allocated_;
        int64_t delta = ps.Offer(e.d, y, Budget(widest_[k], k));
        Account(2 * delta + (fresh ? 2 : 0));
      }
    }
  }
}

void SketchPool::Finalize() {
  for (auto& c : close_) c.Finalize();
  finalized_ = true;
}

bool SketchPool::Knows(PointId v, Fixed w) const {
  if (!finalized_) throw PhaseError("query before finalize");
  return config_.exact || close_[v].Knows(w) ||
         static_cast<int64_t>(close_[v].entries().size()) >= n_ - 1;
}

std::vector<PointId> SketchPool::ExactNeighborhood(PointId v, Fixed w) const {
  if (!Knows(v, w)) throw ContractError("neighborhood not known exactly");
  std::vector<PointId> out{v};
  for (const auto& s : close_[v].entries()) {
    if (s.weight > w) break;
    out.push_back(s.point);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int64_t SketchPool::ExactDegree(PointId v, Fixed w) const {
  if (!Knows(v, w)) throw ContractError("neighborhood not known exactly");
  return close_[v].CountWithin(w);
}

std::vector<WeightedSample> SketchPool::Derived(
    PointId v, int instance, int j, int k,
    std::optional<Fixed>* governing) const {
  if (governing != nullptr) governing->reset();
  if (j > k || j < widest_[k]) return {};
  const PrunedSample& ps = samples_[Slot(v, instance, k)];
  size_t p = ps.PrefixFor(Budget(j, k));
  std::vector<WeightedSample> out(ps.items_.begin(), ps.items_.begin() + p);
  if (p > 0 && governing != nullptr) *governing = out.back().weight;
  if (membership_.Contains(instance, k, v)) {
    out.insert(out.begin(), WeightedSample{Fixed(), v});
  }
  return out;
}

std::optional<ReportedSketch> SketchPool::Report(PointId v, Fixed w,
                                                 int instance) const {
  if (!finalized_) throw PhaseError("query before finalize");
  if (config_.exact || ladder_.empty()) return std::nullopt;
  const int kinds = static_cast<int>(ladder_.size());
  int upper = -1, lower = -1;
  Fixed g_upper, g_lower;
  // Only sizes relevant for v compete: the sample must be about as large as
  // a neighborhood of size in (s / (1 + zeta), s] would give, up to three
  // standard deviations. Without any relevant size, all compete.
  for (bool relevant_only : {true, false}) {
    for (int j = 0; j < kinds; ++j) {
      const PrunedSample& ps = samples_[Slot(v, instance, j)];
      size_t p = ps.PrefixFor(Budget(j, j));
      if (p == 0) continue;
      if (relevant_only) {
        const double mean =
            membership_.probability(j) * ladder_[j] / (1 + config_.zeta);
        const double floor = mean - 3 * std::sqrt(mean);
        if (static_cast<double>(p) < floor) continue;
      }
      Fixed g = ps.items_[p - 1].weight;
      // Ties go to the larger index, i.e. the smaller size.
      if (g >= w && (upper < 0 || g <= g_upper)) {
        upper = j;
        g_upper = g;
      }
      if (g < w && (lower < 0 || g >= g_lower)) {
        lower = j;
        g_lower = g;
      }
    }
    if (upper >= 0 || lower >= 0) break;
  }
  int chosen = -1;
  if (upper >= 0) {
    const PrunedSample& ps = samples_[Slot(v, instance, upper)];
    size_t p = ps.PrefixFor(Budget(upper, upper));
    size_t heavier = 0;
    for (size_t i = 0; i < p; ++i) heavier += ps.items_[i].weight > w;
    bool accept = static_cast<double>(heavier) <
                  4 * config_.zeta * config_.sample_factor;
    chosen = accept || lower < 0 ? upper : lower;
  } else {
    chosen = lower;
  }
  if (chosen < 0) return std::nullopt;
  ReportedSketch out;
  out.ladder_index = chosen;
  out.size = ladder_[chosen];
  std::optional<Fixed> g;
  out.samples = Derived(v, instance, chosen, chosen, &g);
  out.governing = *g;
  return out;
}

double SketchPool::EstimateDegree(PointId v, Fixed w, int instance) const {
  if (Knows(v, w)) return static_cast<double>(ExactDegree(v, w));
  auto sketch = Report(v, w, instance);
  if (!sketch) return static_cast<double>(close_[v].CountWithin(w));
  int64_t count = 0;
  for (const auto& s : sketch->samples) count += s.weight <= w;
  return static_cast<double>(count) /
         membership_.probability(sketch->ladder_index);
}

CompressedSet SketchPool::BuildCompressedSet() const {
  std::vector<Fixed> weights;
  for (const auto& c : close_) {
    for (const auto& s : c.entries()) weights.push_back(s.weight);
  }
  for (const auto& ps : samples_) {
    for (const auto& s : ps.items_) weights.push_back(s.weight);
  }
  if (max_weight_ > Fixed()) weights.push_back(max_weight_);
  return CompressedSet(std::move(weights));
}

void SketchPool::Save(std::ostream& out) const {
  out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  Put<int32_t>(out, n_);
  Put<double>(out, config_.zeta);
  Put<double>(out, config_.lambda);
  Put<double>(out, config_.delta);
  Put<int64_t>(out, config_.close_capacity);
  Put<double>(out, config_.sample_factor);
  Put<double>(out, config_.min_size);
  Put<int32_t>(out, config_.instance_count);
  Put<uint64_t>(out, config_.seed);
  Put<uint8_t>(out, config_.exact);
  Put<uint8_t>(out, finalized_);
  Put<int64_t>(out, max_weight_.raw());
  auto put_items = [&](const std::vector<WeightedSample>& items) {
    Put<uint64_t>(out, items.size());
    for (const auto& s : items) {
      Put<int64_t>(out, s.weight.raw());
      Put<int32_t>(out, s.point);
    }
  };
  for (const auto& c : close_) put_items(c.entries());
  for (const auto& ps : samples_) {
    Put<uint8_t>(out, ps.allocated_);
    Put<int64_t>(out, ps.cutoff_.raw());
    put_items(ps.items_);
  }
  if (!out) throw Error("failed to write sketch snapshot");
}

SketchPool SketchPool::Load(std::istream& in) {
  char magic[sizeof(kSnapshotMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0) {
    throw Error("not a version 1 sketch snapshot");
  }
  const PointId n = Get<int32_t>(in);
  SketchConfig c;
  c.zeta = Get<double>(in);
  c.lambda = Get<double>(in);
  c.delta = Get<double>(in);
  c.close_capacity = Get<int64_t>(in);
  c.sample_factor = Get<double>(in);
  c.min_size = Get<double>(in);
  c.instance_count = Get<int32_t>(in);
  c.seed = Get<uint64_t>(in);
  c.exact = Get<uint8_t>(in) != 0;
  const bool finalized = Get<uint8_t>(in) != 0;
  SketchPool pool(n, c);
  pool.max_weight_ = Fixed::FromRaw(Get<int64_t>(in));
  auto get_items = [&](std::vector<WeightedSample>& items) {
    items.resize(Get<uint64_t>(in));
    for (auto& s : items) {
      s.weight = Fixed::FromRaw(Get<int64_t>(in));
      s.point = Get<int32_t>(in);
    }
  };
  for (auto& cn : pool.close_) {
    get_items(cn.heap_);
    std::make_heap(cn.heap_.begin(), cn.heap_.end());
    pool.words_ += 2 * static_cast<int64_t>(cn.heap_.size());
  }
  for (auto& ps : pool.samples_) {
    ps.allocated_ = Get<uint8_t>(in) != 0;
    ps.cutoff_ = Fixed::FromRaw(Get<int64_t>(in));
    get_items(ps.items_);
    pool.words_ += 2 * static_cast<int64_t>(ps.items_.size()) +
                   (ps.allocated_ ? 2 : 0);
  }
  if (finalized) pool.Finalize();
  return pool;
}

}  // namespace streamfit
