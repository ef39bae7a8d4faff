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

#include <gtest/gtest.h>

#include <sstream>

#include "streamfit/errors.h"
#include "streamfit/generators.h"
#include "streamfit/runner.h"
#include "test_util.h"

namespace streamfit {
namespace {

using testing::StreamOf;

TEST(FitConfig, PassResolution) {
  FitConfig c;
  EXPECT_EQ(c.ResolvedPasses(), 1);
  c.passes = 2;
  EXPECT_THROW(c.ResolvedPasses(), UsageError);
  c.objective = Objective::kLinf;
  EXPECT_EQ(c.ResolvedPasses(), 2);
  c.passes = 1;
  EXPECT_EQ(c.ResolvedPasses(), 1);
  c.passes = 3;
  EXPECT_THROW(c.ResolvedPasses(), UsageError);
  c.structure = Structure::kTree;
  c.passes = 0;
  EXPECT_EQ(c.ResolvedPasses(), 2);
  c.passes = 1;
  EXPECT_THROW(c.ResolvedPasses(), UsageError);
  c.passes = 0;
  c.objective = Objective::kL1Report;
  EXPECT_THROW(c.ResolvedPasses(), UsageError);
}

TEST(FitConfig, NamesRoundTrip) {
  for (auto s : {Structure::kUltrametric, Structure::kTree}) {
    EXPECT_EQ(ParseStructure(Name(s)), s);
  }
  for (auto o : {Objective::kL0, Objective::kL1Report, Objective::kLinf}) {
    EXPECT_EQ(ParseObjective(Name(o)), o);
  }
  for (auto m : {SketchMode::kExact, SketchMode::kSketch, SketchMode::kAsymptotic}) {
    EXPECT_EQ(ParseSketchMode(Name(m)), m);
  }
  EXPECT_FALSE(ParseObjective("l2").has_value());
}

TEST(FitConfig, OverridesApply) {
  FitConfig c;
  c.mode = SketchMode::kSketch;
  c.overrides.close_capacity = 40;
  c.overrides.instance_count = 3;
  SketchConfig s = c.Sketch(100);
  EXPECT_EQ(s.close_capacity, 40);
  EXPECT_EQ(s.instance_count, 3);
  EXPECT_FALSE(s.exact);
}

TEST(RunFit, TriangleLinfExact) {
  DenseMatrix d = testing::Upper(3, {"2", "1", "1.5"});
  auto s = StreamOf(d);
  FitConfig c;
  c.objective = Objective::kLinf;
  FitOutcome out = RunFit(s, c);
  EXPECT_EQ(out.report["result"]["optimal_cost"], "0.25");
  EXPECT_EQ(out.report["cost"]["linf"], "0.25");
  EXPECT_EQ(out.report["schema_version"], kReportSchemaVersion);
  ASSERT_TRUE(out.ultrametric.has_value());
}

TEST(RunFit, ReportsAreByteIdentical) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kPlantedTreeMetric;
  spec.n = 30;
  spec.seed = 5;
  spec.noise_k = 4;
  auto g = Generate(spec);
  for (auto [structure, objective] :
       {std::pair{Structure::kUltrametric, Objective::kL0},
        {Structure::kUltrametric, Objective::kL1Report},
        {Structure::kUltrametric, Objective::kLinf},
        {Structure::kTree, Objective::kL0},
        {Structure::kTree, Objective::kLinf}}) {
    FitConfig c;
    c.structure = structure;
    c.objective = objective;
    c.seed = 17;
    c.mode = SketchMode::kSketch;
    auto s1 = StreamOf(*g.matrix, StreamOrder::kPermutationPerPass, 3);
    auto s2 = StreamOf(*g.matrix, StreamOrder::kPermutationPerPass, 3);
    FitOutcome a = RunFit(s1, c);
    FitOutcome b = RunFit(s2, c);
    EXPECT_EQ(RenderJson(a.report), RenderJson(b.report));
    EXPECT_EQ(RenderJson(a.TreeJson()), RenderJson(b.TreeJson()));
    EXPECT_EQ(a.Newick(), b.Newick());
  }
}

TEST(RunFit, L1ReportCarriesBoundFactor) {
  DenseMatrix d = testing::RandomMatrix(6, {testing::F("1"), testing::F("3")}, 2);
  auto s = StreamOf(d);
  FitConfig c;
  c.objective = Objective::kL1Report;
  FitOutcome out = RunFit(s, c);
  EXPECT_TRUE(out.report.contains("l1_bound_factor"));
}

TEST(RunBench, HeaderAndDeterministicRows) {
  BenchConfig b;
  b.sizes = {6, 10};
  b.seeds = 2;
  b.timings = false;
  b.fits = {{Structure::kUltrametric, Objective::kL0},
            {Structure::kUltrametric, Objective::kLinf}};
  std::ostringstream first, second;
  RunBench(b, first);
  RunBench(b, second);
  EXPECT_EQ(first.str(), second.str());
  std::istringstream lines(first.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header,
            "kind,n,seed,noise_k,structure,objective,mode,passes,l0,l1,linf,"
            "oracle_l0,ratio_l0,memory_peak_words,memory_per_nlog4n,"
            "memory_over_n2,elapsed_ms");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 2 * 2 * 2);
}

}  // namespace
}  // namespace streamfit
