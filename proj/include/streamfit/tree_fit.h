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

#ifndef STREAMFIT_TREE_FIT_H_
#define STREAMFIT_TREE_FIT_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "streamfit/agreement.h"
#include "streamfit/l0_fit.h"
#include "streamfit/sketch.h"
#include "streamfit/stream.h"
#include "streamfit/tree_metric.h"

namespace streamfit {

// Stores the rows of the given pivots during one pass. Throws
// StreamIntegrityError if a pivot row is incomplete.
std::vector<PivotData> CollectPivotRows(StreamSource& source,
                                        const std::vector<PointId>& pivots);

struct LinfTreeResult {
  TreeMetricRep tree;
};

// Two passes: the pivot row, then the min-decrement fit of D + C^a.
// pivot defaults to point 0.
LinfTreeResult FitLinfTree(StreamSource& source,
                           std::optional<PointId> pivot = std::nullopt);

// Pivots and the pairwise l0 distances between their trees.
struct CandidateSet {
  std::vector<PointId> pivots;
  std::vector<TreeMetricRep> trees;
  // t x t, row-major, symmetric with a zero diagonal.
  std::vector<int64_t> pairwise_l0;

  int64_t pairwise(size_t i, size_t j) const {
    return pairwise_l0[i * pivots.size() + j];
  }
};

struct CliqueSelection {
  size_t winner = 0;  // index into pivots
  int64_t threshold = 0;
  std::vector<size_t> clique;
};

inline constexpr int64_t kCliqueEdgeFactor = 24;

// Smallest threshold x over 0 and the distinct pairwise values such that
// the graph {pairwise <= 24 x} has a clique of size >= ceil(t / 2); the
// winner is the lowest pivot id over all maximum cliques at that threshold.
CliqueSelection SelectTreeByClique(const std::vector<PointId>& pivots,
                                   const std::vector<int64_t>& pairwise_l0);

// Caps every level at top and hangs a directly below a root at top, so the
// induced tree metric reproduces the pivot row exactly.
UltrametricTree RestrictToPivot(const UltrametricTree& u, PointId a,
                                Fixed top);

// Distinct pivots in ascending order, count clamped to [1, n].
std::vector<PointId> SamplePivots(PointId n, int count, uint64_t seed);

// ceil(ln n), at least 1.
int DefaultPivotCount(PointId n);

struct L0TreeOptions {
  // 0 selects DefaultPivotCount.
  int pivot_count = 0;
  L0FitOptions fit;
};

struct L0TreeResult {
  TreeMetricRep tree;
  CandidateSet candidates;
  CliqueSelection selection;
  std::vector<L0FitReport> reports;

  nlohmann::json ReportJson() const;
};

// Two passes. config.seed drives pivot sampling; each pivot's fitter gets
// its own derived seed.
L0TreeResult FitL0Tree(StreamSource& source, const SketchConfig& config,
                       const AgreementParams& params,
                       const L0TreeOptions& options = {});

}  // namespace streamfit

#endif  // STREAMFIT_TREE_FIT_H_
