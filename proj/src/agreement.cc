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

#include "streamfit/agreement.h"

#include <algorithm>
#include <bit>
#include <string>
#include <utility>
#include <vector>

#include "streamfit/errors.h"

namespace streamfit {
namespace {

int64_t PopCount(const std::vector<uint64_t>& a) {
  int64_t c = 0;
  for (uint64_t x : a) c += std::popcount(x);
  return c;
}

int64_t PopCountAnd3(const std::vector<uint64_t>& a,
                     const std::vector<uint64_t>& b,
                     const std::vector<uint64_t>& c) {
  int64_t out = 0;
  for (size_t i = 0; i < a.size(); ++i) out += std::popcount(a[i] & b[i] & c[i]);
  return out;
}

}  // namespace

void AgreementParams::Validate() const {
  if (!(epsilon > 0 && epsilon <= 0.2)) {
    throw ConfigError("epsilon must lie in (0, 0.2]");
  }
}

nlohmann::json AgreementParams::ToJson() const {
  return {{"epsilon", epsilon}, {"beta", beta()}};
}

void ClusterStats::Merge(const ClusterStats& o) {
  agreement_queries += o.agreement_queries;
  heaviness_queries += o.heaviness_queries;
  sketch_queries += o.sketch_queries;
  missing_sketches += o.missing_sketches;
}

nlohmann::json ClusterStats::ToJson() const {
  return {{"agreement_queries", agreement_queries},
          {"heaviness_queries", heaviness_queries},
          {"sketch_queries", sketch_queries},
          {"missing_sketches", missing_sketches}};
}

NeighborhoodView::NeighborhoodView(const SketchPool& pool,
                                   std::span<const PointId> subset, Fixed w,
                                   int instance, const AgreementParams& params,
                                   ClusterStats* stats)
    : pool_(pool),
      w_(w),
      instance_(instance),
      params_(params),
      stats_(stats != nullptr ? stats : &local_stats_),
      in_subset_(pool.n(), false),
      subset_bits_((pool.n() + 63) / 64, 0) {
  for (PointId p : subset) {
    in_subset_[p] = true;
    subset_bits_[p / 64] |= uint64_t{1} << (p % 64);
  }
}

const std::vector<uint64_t>& NeighborhoodView::Bits(PointId v) {
  auto it = bits_.find(v);
  if (it != bits_.end()) return it->second;
  std::vector<uint64_t> bits((pool_.n() + 63) / 64, 0);
  for (PointId x : pool_.ExactNeighborhood(v, w_)) {
    bits[x / 64] |= uint64_t{1} << (x % 64);
  }
  return bits_.emplace(v, std::move(bits)).first->second;
}

const std::optional<ReportedSketch>& NeighborhoodView::Sketch(PointId v) {
  auto it = sketches_.find(v);
  if (it != sketches_.end()) return it->second;
  return sketches_.emplace(v, pool_.Report(v, w_, instance_)).first->second;
}

bool NeighborhoodView::Agreement(PointId u, PointId v, double gamma) {
  ++stats_->agreement_queries;
  if (u == v) return true;
  const bool ku = pool_.Knows(u, w_);
  const bool kv = pool_.Knows(v, w_);
  if (ku && kv) {
    const auto& bu = Bits(u);
    const auto& bv = Bits(v);
    const int64_t du = PopCount(bu), dv = PopCount(bv);
    const int64_t shared_in_s = PopCountAnd3(bu, bv, subset_bits_);
    const int64_t value = du + dv - 2 * shared_in_s;
    return static_cast<double>(value) <
           gamma * static_cast<double>(std::max(du, dv));
  }
  if (ku || kv) {
    // A small known neighborhood cannot agree with one beyond the queue.
    const int64_t d_known = pool_.ExactDegree(ku ? u : v, w_);
    if (static_cast<double>(d_known) <= pool_.config().min_size) return false;
  }
  ++stats_->sketch_queries;
  return SketchAgreement(u, v, gamma);
}

bool NeighborhoodView::SketchAgreement(PointId u, PointId v, double gamma) {
  const auto& ru = Sketch(u);
  const auto& rv = Sketch(v);
  if (!ru || !rv) {
    ++stats_->missing_sketches;
    return false;
  }
  const bool u_small = ru->ladder_index >= rv->ladder_index;
  const ReportedSketch& small = u_small ? *ru : *rv;
  const ReportedSketch& big = u_small ? *rv : *ru;
  const PointId big_owner = u_small ? v : u;
  const double zeta = pool_.config().zeta;
  if (1 - (1 + 5 * zeta) * small.size / ((1 - zeta) * big.size) >
      0.8 * gamma) {
    return false;
  }
  if (big.size > 2 * small.size) return false;
  std::optional<Fixed> unused;
  std::vector<WeightedSample> companion = pool_.Derived(
      big_owner, instance_, big.ladder_index, small.ladder_index, &unused);
  const Fixed big_cut = std::min(w_, big.governing);
  std::vector<PointId> a, b;
  for (const auto& s : small.samples) {
    if (s.weight <= w_) a.push_back(s.point);
  }
  for (const auto& s : companion) {
    if (s.weight <= big_cut) b.push_back(s.point);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  int64_t shared_in_s = 0;
  for (size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      shared_in_s += in_subset_[a[i]];
      ++i;
      ++j;
    }
  }
  const int64_t ca = static_cast<int64_t>(a.size());
  const int64_t cb = static_cast<int64_t>(b.size());
  if (std::max(ca, cb) == 0) return false;
  return static_cast<double>(ca + cb - 2 * shared_in_s) <=
         0.9 * gamma * static_cast<double>(std::max(ca, cb));
}

bool NeighborhoodView::Heavy(PointId u) {
  auto it = heavy_.find(u);
  if (it != heavy_.end()) return it->second;
  ++stats_->heaviness_queries;
  const double beta = params_.beta();
  bool heavy;
  if (pool_.Knows(u, w_)) {
    std::vector<PointId> nbrs = pool_.ExactNeighborhood(u, w_);
    int64_t outside = 0;
    for (PointId x : nbrs) {
      if (!(in_subset_[x] && Agreement(u, x, beta))) ++outside;
    }
    heavy = static_cast<double>(outside) <
            params_.epsilon * static_cast<double>(nbrs.size());
  } else {
    ++stats_->sketch_queries;
    const auto& r = Sketch(u);
    if (!r) {
      ++stats_->missing_sketches;
      heavy = false;
    } else {
      int64_t c = 0, agreeing = 0;
      for (const auto& s : r->samples) {
        if (s.weight > w_) continue;
        ++c;
        if (in_subset_[s.point] && Agreement(u, s.point, beta)) ++agreeing;
      }
      heavy = c > 0 && static_cast<double>(c - agreeing) <=
                           1.1 * params_.epsilon * static_cast<double>(c);
    }
  }
  heavy_.emplace(u, heavy);
  return heavy;
}

nlohmann::json Clustering::ToJson() const { return clusters; }

InstanceCursor::InstanceCursor(PointId n, int instance_count, bool unlimited)
    : cursor_(n, 0), instance_count_(instance_count), unlimited_(unlimited) {}

void InstanceCursor::Claim(std::span<const PointId> subset, int instance) {
  for (PointId p : subset) {
    if (cursor_[p] != instance) {
      throw ContractError("sketch instance " + std::to_string(instance) +
                          " of vertex " + std::to_string(p) +
                          " is not fresh");
    }
    if (!unlimited_ && instance >= instance_count_) {
      throw ResourceError("vertex " + std::to_string(p) +
                          " ran out of sketch instances (" +
                          std::to_string(instance_count_) + ")");
    }
  }
  for (PointId p : subset) cursor_[p] = instance + 1;
}

int InstanceCursor::max_cursor() const {
  return cursor_.empty() ? 0 : *std::max_element(cursor_.begin(), cursor_.end());
}

Clustering SStructuralClustering(const SketchPool& pool,
                                 std::span<const PointId> subset, Fixed w,
                                 int instance, const AgreementParams& params,
                                 InstanceCursor* cursor, ClusterStats* stats) {
  if (subset.empty()) throw ContractError("clustering needs a non-empty set");
  if (cursor != nullptr) cursor->Claim(subset, instance);
  std::vector<PointId> order(subset.begin(), subset.end());
  std::sort(order.begin(), order.end());
  NeighborhoodView view(pool, order, w, instance, params, stats);
  const double gamma3 = 3 * params.beta();
  std::vector<bool> clustered(pool.n(), false);
  Clustering out;
  for (PointId v : order) {
    if (clustered[v] || !view.Heavy(v)) continue;
    std::vector<PointId> cluster;
    for (PointId u : order) {
      if (clustered[u]) continue;
      if (u == v || view.Agreement(v, u, gamma3)) cluster.push_back(u);
    }
    for (PointId u : cluster) clustered[u] = true;
    out.clusters.push_back(std::move(cluster));
  }
  for (PointId v : order) {
    if (!clustered[v]) out.clusters.push_back({v});
  }
  std::sort(out.clusters.begin(), out.clusters.end());
  if (!IsPartition(out, subset)) {
    throw ContractError("structural clustering is not a partition");
  }
  return out;
}

bool IsPartition(const Clustering& c, std::span<const PointId> subset) {
  std::vector<PointId> all;
  for (const auto& cl : c.clusters) {
    if (cl.empty()) return false;
    all.insert(all.end(), cl.begin(), cl.end());
  }
  std::vector<PointId> want(subset.begin(), subset.end());
  std::sort(all.begin(), all.end());
  std::sort(want.begin(), want.end());
  return all == want;
}

bool EverywhereDense(const Clustering& c, const DenseMatrix& d, Fixed w) {
  for (const auto& cl : c.clusters) {
    if (cl.size() < 2) continue;
    for (PointId u : cl) {
      int64_t adjacent = 0;
      for (PointId x : cl) adjacent += (x == u || d.at(u, x) <= w);
      if (3 * adjacent < 2 * static_cast<int64_t>(cl.size())) return false;
    }
  }
  return true;
}

bool IsImportantGroup(std::span<const PointId> group, const DenseMatrix& d,
                      Fixed w, double epsilon) {
  std::vector<bool> in_group(d.n(), false);
  for (PointId p : group) in_group[p] = true;
  const double size = static_cast<double>(group.size());
  for (PointId u : group) {
    int64_t inside = 0, outside = 0, degree = 0;
    for (PointId x = 0; x < d.n(); ++x) {
      if (x != u && d.at(u, x) > w) continue;
      ++degree;
      (in_group[x] ? inside : outside) += 1;
    }
    if (static_cast<double>(inside) < (1 - epsilon) * size) return false;
    if (static_cast<double>(outside) > epsilon * static_cast<double>(degree)) {
      return false;
    }
  }
  return true;
}

std::optional<size_t> ContainingCluster(const Clustering& c,
                                        std::span<const PointId> group) {
  if (group.empty()) return std::nullopt;
  for (size_t i = 0; i < c.clusters.size(); ++i) {
    const auto& cl = c.clusters[i];
    if (!std::binary_search(cl.begin(), cl.end(), group[0])) continue;
    for (PointId p : group) {
      if (!std::binary_search(cl.begin(), cl.end(), p)) return std::nullopt;
    }
    return i;
  }
  return std::nullopt;
}

}  // namespace streamfit
