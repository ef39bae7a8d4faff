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

#ifndef STREAMFIT_RUNNER_H_
#define STREAMFIT_RUNNER_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "streamfit/agreement.h"
#include "streamfit/generators.h"
#include "streamfit/sketch.h"
#include "streamfit/stream.h"
#include "streamfit/tree_metric.h"
#include "streamfit/ultrametric_tree.h"

namespace streamfit {

inline constexpr int kReportSchemaVersion = 1;

enum class Structure { kUltrametric, kTree };
enum class Objective { kL0, kL1Report, kLinf };
enum class SketchMode { kExact, kSketch, kAsymptotic };

std::optional<Structure> ParseStructure(std::string_view s);
std::optional<Objective> ParseObjective(std::string_view s);
std::optional<SketchMode> ParseSketchMode(std::string_view s);
std::string Name(Structure s);
std::string Name(Objective o);
std::string Name(SketchMode m);

struct SketchOverrides {
  std::optional<int64_t> close_capacity;
  std::optional<double> sample_factor;
  std::optional<double> min_size;
  std::optional<double> zeta;
  std::optional<double> lambda;
  std::optional<int> instance_count;
};

struct FitConfig {
  Structure structure = Structure::kUltrametric;
  Objective objective = Objective::kL0;
  // 0 picks the default for the combination.
  int passes = 0;
  uint64_t seed = 0;
  SketchMode mode = SketchMode::kExact;
  SketchOverrides overrides;
  double epsilon = AgreementParams{}.epsilon;
  int depth_cap = 8;
  // Tree structure: l0 pivot count (0 = ceil(ln n)) and l-inf pivot.
  int pivot_count = 0;
  std::optional<PointId> pivot;
  // Spend one more pass measuring the cost of the output.
  bool evaluate = true;

  // Throws UsageError for an unsupported structure/objective/passes mix.
  int ResolvedPasses() const;
  SketchConfig Sketch(PointId n) const;
  nlohmann::json ToJson() const;
};

struct FitOutcome {
  nlohmann::json report;
  std::optional<UltrametricTree> ultrametric;
  std::optional<TreeMetricRep> tree;

  nlohmann::json TreeJson() const;
  std::string Newick() const;
};

FitOutcome RunFit(StreamSource& source, const FitConfig& config);

// Stable text form: sorted keys, two-space indent, trailing newline.
std::string RenderJson(const nlohmann::json& j);

struct BenchConfig {
  std::vector<GeneratorKind> kinds{GeneratorKind::kPlantedUltrametric};
  std::vector<PointId> sizes{16, 32};
  int seeds = 3;
  uint64_t base_seed = 1;
  int64_t noise_k = 0;
  std::vector<std::pair<Structure, Objective>> fits{
      {Structure::kUltrametric, Objective::kL0}};
  SketchMode mode = SketchMode::kExact;
  // Instances up to this size also get the brute-force optimum.
  PointId oracle_max_n = 7;
  bool timings = true;
};

// Writes the header and one row per (kind, size, seed, fit).
void RunBench(const BenchConfig& config, std::ostream& csv);

}  // namespace streamfit

#endif  // STREAMFIT_RUNNER_H_
