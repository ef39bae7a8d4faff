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

#ifndef STREAMFIT_GENERATORS_H_
#define STREAMFIT_GENERATORS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "streamfit/fixed.h"
#include "streamfit/matrix.h"
#include "streamfit/tree_metric.h"
#include "streamfit/ultrametric_tree.h"

namespace streamfit {

enum class GeneratorKind {
  kPlantedUltrametric,
  kPlantedTreeMetric,
  kTwoValued,
  kUniformRandom,
};

std::string KindName(GeneratorKind kind);
std::optional<GeneratorKind> ParseKind(std::string_view name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kPlantedUltrametric;
  PointId n = 8;
  uint64_t seed = 0;
  int64_t noise_k = 0;
  // Distinct values, any order; empty selects the per-kind default:
  // planted ultrametric 1..depth, planted tree metric edge weights
  // {1, 1.5, 2}, two-valued {1, 2}, uniform random {1, 2, 3}.
  std::vector<Fixed> alphabet;
  // Number of levels of a planted ultrametric.
  int depth = 3;
  // Number of groups of a two-valued instance.
  int groups = 2;

  nlohmann::json ToJson() const;
  static GeneratorSpec FromJson(const nlohmann::json& j);
};

struct GeneratedInstance {
  std::shared_ptr<const DenseMatrix> matrix;
  // The matrix before noise.
  DenseMatrix clean;
  std::optional<UltrametricTree> ultrametric_truth;
  std::optional<TreeMetricRep> tree_truth;
  // Pairs whose value was replaced, u < v, ascending.
  std::vector<std::pair<PointId, PointId>> noisy_pairs;
};

// Throws ConfigError for an invalid spec (alphabet too small for the depth,
// noise_k above the pair count, noise without an alternative value).
GeneratedInstance Generate(const GeneratorSpec& spec);

}  // namespace streamfit

#endif  // STREAMFIT_GENERATORS_H_
