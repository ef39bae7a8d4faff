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

#include <cmath>

#include "streamfit/errors.h"
#include "streamfit/generators.h"
#include "streamfit/l0_fit.h"
#include "streamfit/metrics.h"
#include "streamfit/oracles.h"
#include "test_util.h"

namespace streamfit {
namespace {

using testing::F;
using testing::StreamOf;

L0FitResult FitExact(const DenseMatrix& d, uint64_t seed = 0) {
  auto s = StreamOf(d, StreamOrder::kFixedPermutation, seed);
  return FitL0(s, SketchConfig::Exact(d.n(), seed), AgreementParams{});
}

void ExpectValid(const L0FitResult& r, const DenseMatrix& d) {
  EXPECT_TRUE(IsUltrametric(r.tree.ToMatrix()));
  EXPECT_EQ(r.report.participation_violations, 0);
  EXPECT_LE(r.report.max_participation, r.report.participation_cap);
  std::vector<Fixed> values = d.DistinctValues();
  for (Fixed level : r.tree.InternalLevels()) {
    EXPECT_TRUE(std::binary_search(values.begin(), values.end(), level))
        << level.ToString();
  }
}

TEST(FitL0, SinglePointIsALeaf) {
  DenseMatrix d(1);
  L0FitResult r = FitExact(d);
  EXPECT_EQ(r.tree.num_points(), 1);
  EXPECT_EQ(r.tree.nodes().size(), 1u);
}

TEST(FitL0, TwoPoints) {
  L0FitResult r = FitExact(testing::Upper(2, {"3"}));
  EXPECT_EQ(r.tree.Distance(0, 1), F("3"));
}

TEST(FitL0, ConstantMatrixGivesOneLevel) {
  DenseMatrix d = testing::Blocks({7}, F("2"), F("2"));
  L0FitResult r = FitExact(d);
  EXPECT_EQ(r.tree.InternalLevels(), std::vector<Fixed>{F("2")});
  EXPECT_EQ(r.report.clustering_calls, 0);
}

TEST(FitL0, PlantedExactRecovery) {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    GeneratorSpec spec;
    spec.n = 16 << (seed % 4);
    spec.depth = 1 + static_cast<int>(seed % 5);
    spec.seed = seed;
    auto g = Generate(spec);
    L0FitResult r = FitExact(*g.matrix, seed);
    auto s = StreamOf(*g.matrix);
    EXPECT_EQ(Cost(r.tree, s).l0, 0) << "seed " << seed;
    ExpectValid(r, *g.matrix);
  }
}

TEST(FitL0, StragglersArePeeled) {
  // Core 0..397 at 1, stragglers 398 and 399 at 2 from everything in the
  // core and each other, point 400 at 3 from all.
  const PointId n = 401;
  DenseMatrix d(n);
  for (PointId u = 0; u < n; ++u) {
    for (PointId v = u + 1; v < n; ++v) {
      Fixed x = v == 400 ? F("3") : (v >= 398 ? F("2") : F("1"));
      d.set(u, v, x);
    }
  }
  L0FitResult r = FitExact(d);
  EXPECT_GE(r.report.peel_iterations, 1);
  EXPECT_EQ(r.tree.Distance(398, 399), F("2"));
  EXPECT_EQ(r.tree.Distance(0, 398), F("2"));
  EXPECT_EQ(r.tree.Distance(0, 1), F("1"));
  EXPECT_EQ(CostAgainst(r.tree.ToMatrix(), d).l0, 0);
  ExpectValid(r, d);
}

TEST(FitL0, FlippedCrossEdgeStaysCheap) {
  // One flipped entry; repairing it is optimal, so OPT = 1. Groups must be
  // large enough that one disagreement stays under beta d.
  DenseMatrix d = testing::Blocks({30, 30}, F("1"), F("2"));
  d.set(0, 30, F("1"));
  L0FitResult r = FitExact(d);
  EXPECT_LE(CostAgainst(r.tree.ToMatrix(), d).l0, 4);
  ExpectValid(r, d);
}

TEST(FitL0, TinyGroupsFallBackToOneLevel) {
  // At n = 6 no vertex is heavy once an entry is flipped: all pairs end up
  // at the top value.
  DenseMatrix d = testing::Blocks({3, 3}, F("1"), F("2"));
  d.set(0, 3, F("1"));
  L0FitResult r = FitExact(d);
  EXPECT_EQ(r.tree.InternalLevels(), std::vector<Fixed>{F("2")});
  ExpectValid(r, d);
}

TEST(FitL0, RandomInstancesAreValid) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    DenseMatrix d = testing::RandomMatrix(
        5 + static_cast<PointId>(seed % 30), {F("1"), F("2"), F("3")}, seed);
    ExpectValid(FitExact(d, seed), d);
  }
}

TEST(FitL0, StreamOrderDoesNotMatterInExactMode) {
  DenseMatrix d = testing::RandomMatrix(25, {F("1"), F("2"), F("3")}, 4);
  L0FitResult a = FitExact(d, 1);
  auto s = StreamOf(d, StreamOrder::kFixedPermutation, 99);
  L0FitResult b = FitL0(s, SketchConfig::Exact(25, 1), AgreementParams{});
  EXPECT_EQ(a.tree, b.tree);
}

TEST(FitL0, IncompleteStreamFails) {
  DenseMatrix d(3);
  d.set(0, 1, F("1"));
  auto s = StreamOf(d);
  EXPECT_THROW(FitL0(s, SketchConfig::Exact(3, 0), AgreementParams{}),
               StreamIntegrityError);
}

TEST(FitL0, SketchModeRecoversPlantedTrees) {
  int good = 0;
  const int seeds = 8;
  for (int seed = 0; seed < seeds; ++seed) {
    GeneratorSpec spec;
    spec.n = 128;
    spec.depth = 3;
    spec.seed = 100 + seed;
    auto g = Generate(spec);
    auto s = StreamOf(*g.matrix, StreamOrder::kFixedPermutation, seed);
    L0FitResult r = FitL0(s, SketchConfig::Scaled(128, seed), AgreementParams{});
    auto s2 = StreamOf(*g.matrix);
    good += Cost(r.tree, s2).l0 == 0;
    EXPECT_TRUE(IsUltrametric(r.tree.ToMatrix()));
    EXPECT_EQ(r.report.participation_violations, 0);
    EXPECT_GT(r.report.memory_peak_words, 0);
  }
  EXPECT_GE(good, seeds - 2);
}

TEST(FitL0, TooFewInstancesIsAResourceError) {
  GeneratorSpec spec;
  spec.n = 64;
  spec.depth = 4;
  spec.seed = 3;
  auto g = Generate(spec);
  SketchConfig c = SketchConfig::Scaled(64, 1);
  c.instance_count = 1;
  auto s = StreamOf(*g.matrix);
  EXPECT_THROW(FitL0(s, c, AgreementParams{}), ResourceError);
}

}  // namespace
}  // namespace streamfit
