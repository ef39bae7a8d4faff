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

#ifndef STREAMFIT_AGREEMENT_H_
#define STREAMFIT_AGREEMENT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "streamfit/fixed.h"
#include "streamfit/matrix.h"
#include "streamfit/sketch.h"

namespace streamfit {

struct AgreementParams {
  double epsilon = 0.01;

  double beta() const { return 5 * epsilon * (1 + epsilon); }
  // Throws ConfigError unless 0 < epsilon <= 0.2.
  void Validate() const;
  nlohmann::json ToJson() const;
};

struct ClusterStats {
  int64_t agreement_queries = 0;
  int64_t heaviness_queries = 0;
  // Queries answered from sketches rather than exact neighborhoods.
  int64_t sketch_queries = 0;
  // Sketch-path queries that found no sketch and answered no.
  int64_t missing_sketches = 0;

  void Merge(const ClusterStats& o);
  nlohmann::json ToJson() const;
};

// Agreement and heaviness inside a subset S on the threshold graph E_w,
// answered from one sketch instance. Exact whenever the close queues know
// both neighborhoods.
class NeighborhoodView {
 public:
  NeighborhoodView(const SketchPool& pool, std::span<const PointId> subset,
                   Fixed w, int instance, const AgreementParams& params,
                   ClusterStats* stats = nullptr);

  // Is |N(u) ^ N(v)| + 2 |N(u) & N(v) \ S| below gamma max{d(u), d(v)}.
  bool Agreement(PointId u, PointId v, double gamma);
  // Is |N(u) \ A_S(u)| below epsilon d(u), A_S taken at gamma = beta.
  bool Heavy(PointId u);

  bool InSubset(PointId p) const { return in_subset_[p]; }

 private:
  const std::vector<uint64_t>& Bits(PointId v);
  const std::optional<ReportedSketch>& Sketch(PointId v);
  bool SketchAgreement(PointId u, PointId v, double gamma);

  const SketchPool& pool_;
  Fixed w_;
  int instance_;
  AgreementParams params_;
  ClusterStats local_stats_;
  ClusterStats* stats_;
  std::vector<bool> in_subset_;
  std::vector<uint64_t> subset_bits_;
  std::unordered_map<PointId, std::vector<uint64_t>> bits_;
  std::unordered_map<PointId, std::optional<ReportedSketch>> sketches_;
  std::unordered_map<PointId, bool> heavy_;
};

struct Clustering {
  // Each cluster sorted; clusters ordered by smallest member.
  std::vector<std::vector<PointId>> clusters;

  nlohmann::json ToJson() const;
};

// Per-vertex count of consumed sketch instances. A clustering call on S
// with instance i requires every member's cursor to equal i and advances
// them to i + 1.
class InstanceCursor {
 public:
  InstanceCursor(PointId n, int instance_count, bool unlimited);

  // Throws ContractError on reuse, ResourceError on exhaustion.
  void Claim(std::span<const PointId> subset, int instance);
  int cursor(PointId v) const { return cursor_[v]; }
  int max_cursor() const;

 private:
  std::vector<int> cursor_;
  int instance_count_;
  bool unlimited_;
};

// Pivot-free clustering of S on E_w: ascending ids, a heavy unclustered v
// opens the cluster of unclustered members in 3 beta agreement with it;
// leftovers become singletons. Throws ContractError if the result is not a
// partition of S.
Clustering SStructuralClustering(const SketchPool& pool,
                                 std::span<const PointId> subset, Fixed w,
                                 int instance, const AgreementParams& params,
                                 InstanceCursor* cursor = nullptr,
                                 ClusterStats* stats = nullptr);

bool IsPartition(const Clustering& c, std::span<const PointId> subset);

// Every member of every non-singleton cluster is adjacent (distance <= w,
// itself included) to at least 2/3 of its cluster.
bool EverywhereDense(const Clustering& c, const DenseMatrix& d, Fixed w);

// Each member adjacent to >= (1 - eps)|C| of C with <= eps d(u) neighbors
// outside C.
bool IsImportantGroup(std::span<const PointId> group, const DenseMatrix& d,
                      Fixed w, double epsilon);

// Index of the cluster containing all of group, if any.
std::optional<size_t> ContainingCluster(const Clustering& c,
                                        std::span<const PointId> group);

}  // namespace streamfit

#endif  // STREAMFIT_AGREEMENT_H_
