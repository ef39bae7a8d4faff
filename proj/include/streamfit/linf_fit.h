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

#ifndef STREAMFIT_LINF_FIT_H_
#define STREAMFIT_LINF_FIT_H_

#include <cstdint>
#include <vector>

#include "streamfit/fixed.h"
#include "streamfit/matrix.h"
#include "streamfit/stream.h"
#include "streamfit/ultrametric_tree.h"

namespace streamfit {

// Edge order used everywhere: by weight, then by (u, v) with u < v. Of two
// equal-weight edges on a cycle the one with the larger pair is evicted.
inline bool EdgeKeyLess(const DistanceEntry& a, const DistanceEntry& b) {
  if (a.d != b.d) return a.d < b.d;
  if (a.u != b.u) return a.u < b.u;
  return a.v < b.v;
}

// Minimum spanning forest of the edges seen so far, kept under the cycle
// property: an edge closing a cycle evicts the largest edge on it. Holds at
// most n - 1 edges.
class MstState {
 public:
  explicit MstState(PointId n);

  void Ingest(const DistanceEntry& e);

  PointId n() const { return n_; }
  size_t edge_count() const { return live_; }
  // Live edges sorted by EdgeKeyLess.
  std::vector<DistanceEntry> Edges() const;

 private:
  int Find(int x);
  // Edge slots along the forest path from a to b.
  std::vector<int> PathEdges(PointId a, PointId b);
  void Link(int slot);
  void Unlink(int slot);

  PointId n_;
  std::vector<int> uf_parent_;
  std::vector<DistanceEntry> slots_;
  std::vector<bool> slot_live_;
  std::vector<int> free_slots_;
  std::vector<std::vector<int>> adjacency_;  // slots per vertex
  size_t live_ = 0;
  // BFS scratch.
  std::vector<int> via_slot_;
  std::vector<uint32_t> stamp_;
  uint32_t epoch_ = 0;
};

// Single-linkage dendrogram of a spanning tree: each merge creates a node at
// the merging edge's weight. Throws DomainError if edges do not span.
UltrametricTree SingleLinkage(PointId n, std::vector<DistanceEntry> edges);

// In-memory maximal ultrametric below d (Prim on the full matrix, then
// single linkage).
UltrametricTree SubdominantUltrametric(const DenseMatrix& d);

struct LinfExactResult {
  UltrametricTree tree;
  UltrametricTree min_decrement;
  // max over pairs of D - U for the min-decrement U.
  Fixed c_bar;
  Fixed optimal_cost;  // c_bar / 2
  // Lexicographically smallest pair attaining c_bar.
  PointId cert_u = 0;
  PointId cert_v = 0;
};

// One pass. Throws StreamIntegrityError on a missing or duplicated pair.
UltrametricTree FitLinfMinDecrement(StreamSource& source);

// Two passes: min-decrement fit, then the c_bar / 2 level shift.
LinfExactResult FitLinfExact(StreamSource& source);

}  // namespace streamfit

#endif  // STREAMFIT_LINF_FIT_H_
