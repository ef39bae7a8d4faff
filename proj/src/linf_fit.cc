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

#include "streamfit/linf_fit.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "streamfit/errors.h"

namespace streamfit {

MstState::MstState(PointId n)
    : n_(n),
      uf_parent_(n),
      adjacency_(n),
      via_slot_(n, -1),
      stamp_(n, 0) {
  std::iota(uf_parent_.begin(), uf_parent_.end(), 0);
}

int MstState::Find(int x) {
  while (uf_parent_[x] != x) {
    uf_parent_[x] = uf_parent_[uf_parent_[x]];
    x = uf_parent_[x];
  }
  return x;
}

void MstState::Link(int slot) {
  const DistanceEntry& e = slots_[slot];
  adjacency_[e.u].push_back(slot);
  adjacency_[e.v].push_back(slot);
  slot_live_[slot] = true;
  ++live_;
}

void MstState::Unlink(int slot) {
  const DistanceEntry& e = slots_[slot];
  for (PointId end : {e.u, e.v}) {
    auto& adj = adjacency_[end];
    adj.erase(std::find(adj.begin(), adj.end(), slot));
  }
  slot_live_[slot] = false;
  free_slots_.push_back(slot);
  --live_;
}

std::vector<int> MstState::PathEdges(PointId a, PointId b) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  std::vector<PointId> queue{a};
  stamp_[a] = epoch_;
  via_slot_[a] = -1;
  for (size_t head = 0; head < queue.size(); ++head) {
    PointId x = queue[head];
    if (x == b) break;
    for (int slot : adjacency_[x]) {
      const DistanceEntry& e = slots_[slot];
      PointId y = e.u == x ? e.v : e.u;
      if (stamp_[y] == epoch_) continue;
      stamp_[y] = epoch_;
      via_slot_[y] = slot;
      queue.push_back(y);
    }
  }
  std::vector<int> path;
  for (PointId x = b; x != a;) {
    int slot = via_slot_[x];
    path.push_back(slot);
    const DistanceEntry& e = slots_[slot];
    x = e.u == x ? e.v : e.u;
  }
  return path;
}

void MstState::Ingest(const DistanceEntry& raw) {
  DistanceEntry e = raw;
  if (e.u > e.v) std::swap(e.u, e.v);
  int slot;
  auto take_slot = [&] {
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
      free_slots_.pop_back();
      slots_[slot] = e;
    } else {
      slot = static_cast<int>(slots_.size());
      slots_.push_back(e);
      slot_live_.push_back(false);
    }
  };
  int ru = Find(e.u), rv = Find(e.v);
  if (ru != rv) {
    uf_parent_[ru] = rv;
    take_slot();
    Link(slot);
    return;
  }
  // Same component: the new edge closes a cycle with the forest path.
  std::vector<int> path = PathEdges(e.u, e.v);
  int worst = path.front();
  for (int s : path) {
    if (EdgeKeyLess(slots_[worst], slots_[s])) worst = s;
  }
  if (!EdgeKeyLess(e, slots_[worst])) return;
  Unlink(worst);
  take_slot();
  Link(slot);
}

std::vector<DistanceEntry> MstState::Edges() const {
  std::vector<DistanceEntry> out;
  out.reserve(live_);
  for (size_t i = 0; i < slots_.size(); ++i) {
    if (slot_live_[i]) out.push_back(slots_[i]);
  }
  std::sort(out.begin(), out.end(), EdgeKeyLess);
  return out;
}

UltrametricTree SingleLinkage(PointId n, std::vector<DistanceEntry> edges) {
  std::sort(edges.begin(), edges.end(), EdgeKeyLess);
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  TreeBuilder builder(n);
  std::vector<int> node_of(n);
  std::iota(node_of.begin(), node_of.end(), 0);
  int merges = 0;
  int root = 0;
  for (const DistanceEntry& e : edges) {
    int a = find(e.u), b = find(e.v);
    if (a == b) continue;
    root = builder.Internal(e.d, {node_of[a], node_of[b]});
    parent[a] = b;
    node_of[b] = root;
    ++merges;
  }
  if (merges != n - 1) throw DomainError("edges do not span the points");
  return builder.Build(n == 1 ? 0 : root);
}

UltrametricTree SubdominantUltrametric(const DenseMatrix& d) {
  d.RequireComplete();
  const PointId n = d.n();
  std::vector<DistanceEntry> edges;
  if (n > 1) {
    // Prim with lexicographic tie-breaking on the edge key.
    std::vector<bool> in_tree(n, false);
    std::vector<DistanceEntry> best(n);
    in_tree[0] = true;
    for (PointId v = 1; v < n; ++v) best[v] = DistanceEntry{0, v, d.at(0, v)};
    for (PointId step = 1; step < n; ++step) {
      PointId pick = -1;
      for (PointId v = 0; v < n; ++v) {
        if (!in_tree[v] && (pick < 0 || EdgeKeyLess(best[v], best[pick]))) {
          pick = v;
        }
      }
      in_tree[pick] = true;
      edges.push_back(best[pick]);
      for (PointId v = 0; v < n; ++v) {
        if (in_tree[v]) continue;
        DistanceEntry cand{std::min(pick, v), std::max(pick, v), d.at(pick, v)};
        if (EdgeKeyLess(cand, best[v])) best[v] = cand;
      }
    }
  }
  return SingleLinkage(n, std::move(edges));
}

UltrametricTree FitLinfMinDecrement(StreamSource& source) {
  const PointId n = source.n();
  MstState mst(n);
  PairTracker tracker(n);
  source.Replay([&](const DistanceEntry& e) {
    tracker.Mark(e.u, e.v);
    mst.Ingest(e);
  });
  tracker.RequireComplete();
  return SingleLinkage(n, mst.Edges());
}

LinfExactResult FitLinfExact(StreamSource& source) {
  UltrametricTree u = FitLinfMinDecrement(source);
  const PointId n = source.n();
  PairTracker tracker(n);
  Fixed c_bar;
  PointId cu = 0, cv = n > 1 ? 1 : 0;
  bool any = false;
  source.Replay([&](const DistanceEntry& e) {
    tracker.Mark(e.u, e.v);
    Fixed gap = e.d - u.Distance(e.u, e.v);
    PointId a = std::min(e.u, e.v), b = std::max(e.u, e.v);
    if (!any || gap > c_bar ||
        (gap == c_bar && std::pair(a, b) < std::pair(cu, cv))) {
      c_bar = gap;
      cu = a;
      cv = b;
      any = true;
    }
  });
  tracker.RequireComplete();
  if (c_bar < Fixed()) throw ContractError("min-decrement fit exceeds D");
  Fixed half = c_bar.Half();
  return LinfExactResult{ShiftLevels(u, half), u, c_bar, half, cu, cv};
}

}  // namespace streamfit
