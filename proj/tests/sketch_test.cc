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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "streamfit/errors.h"
#include "streamfit/generators.h"
#include "streamfit/memory_meter.h"
#include "streamfit/sketch.h"
#include "test_util.h"

namespace streamfit {
namespace {

using testing::F;
using testing::StreamOf;

SketchConfig SmallSketch(uint64_t seed) {
  SketchConfig c;
  c.zeta = 0.1;
  c.lambda = 0.2;
  c.close_capacity = 8;
  c.min_size = 4;
  c.sample_factor = 64;
  c.instance_count = 2;
  c.seed = seed;
  return c;
}

TEST(SketchConfig, Validation) {
  EXPECT_NO_THROW(SmallSketch(1).Validate());
  EXPECT_NO_THROW(SketchConfig::Scaled(100, 1).Validate());
  EXPECT_NO_THROW(SketchConfig::Asymptotic(1024, 1).Validate());
  EXPECT_NO_THROW(SketchConfig::Exact(10, 1).Validate());
  auto bad = SmallSketch(1);
  bad.zeta = 1.5;
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = SmallSketch(1);
  bad.instance_count = 0;
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = SmallSketch(1);
  bad.close_capacity = 3;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(SketchConfig, AsymptoticParameters) {
  SketchConfig c = SketchConfig::Asymptotic(1024, 0);
  EXPECT_DOUBLE_EQ(c.min_size, 10000);
  EXPECT_EQ(c.close_capacity, 20000);
  EXPECT_DOUBLE_EQ(c.sample_factor, 100);
  EXPECT_EQ(c.instance_count, 40);
  EXPECT_DOUBLE_EQ(c.zeta, c.lambda / 10);
}

TEST(Ladder, GeometricDownToMinSize) {
  auto c = SmallSketch(0);
  auto ladder = Ladder(100, c);
  ASSERT_FALSE(ladder.empty());
  EXPECT_DOUBLE_EQ(ladder.front(), 100);
  EXPECT_GE(ladder.back(), c.min_size);
  EXPECT_LT(ladder.back() / (1 + c.zeta), c.min_size);
  for (size_t i = 1; i < ladder.size(); ++i) {
    EXPECT_NEAR(ladder[i - 1] / ladder[i], 1 + c.zeta, 1e-12);
  }
  EXPECT_TRUE(Ladder(100, SketchConfig::Exact(100, 0)).empty());
}

TEST(SampleMembership, DeterministicWithExpectedRate) {
  std::vector<double> ladder{1000, 100};
  SampleMembership a(5, ladder, 50), b(5, ladder, 50), c(6, ladder, 50);
  int hits = 0, differ = 0;
  for (PointId p = 0; p < 20000; ++p) {
    EXPECT_EQ(a.Contains(0, 0, p), b.Contains(0, 0, p));
    hits += a.Contains(0, 0, p);
    differ += a.Contains(0, 0, p) != a.Contains(1, 0, p);
    differ += a.Contains(0, 0, p) != c.Contains(0, 0, p);
  }
  EXPECT_NEAR(hits / 20000.0, 0.05, 0.01);
  EXPECT_GT(differ, 0);
  EXPECT_DOUBLE_EQ(a.probability(1), 0.5);
}

TEST(PrunedSample, CutoffBlocksHeavierWeights) {
  PrunedSample s;
  EXPECT_EQ(s.Offer(F("1"), 3, 1), 1);
  EXPECT_EQ(s.items().size(), 1u);
  EXPECT_EQ(s.cutoff(), Fixed());
  EXPECT_EQ(s.Offer(F("2"), 4, 1), 0);  // inserted, then pruned
  EXPECT_EQ(s.cutoff(), F("2"));
  EXPECT_EQ(s.Offer(F("2"), 5, 1), 0);  // at the cutoff: unchanged
  EXPECT_EQ(s.Offer(F("3"), 6, 1), 0);
  EXPECT_EQ(s.items().size(), 1u);
}

TEST(PrunedSample, PrunesWholeCollections) {
  PrunedSample s;
  s.Offer(F("1"), 0, 3);
  s.Offer(F("2"), 1, 3);
  s.Offer(F("2"), 2, 3);
  EXPECT_EQ(s.Offer(F("2"), 3, 3), -2);  // the three weight-2 items go
  EXPECT_EQ(s.items().size(), 1u);
  EXPECT_EQ(s.cutoff(), F("2"));
}

TEST(PrunedSample, LongStreamKeepsTheBudgetSmallest) {
  const int budget = 16;
  std::vector<int> order(10 * budget);
  for (int i = 0; i < 10 * budget; ++i) order[i] = i + 1;
  Rng rng(3);
  rng.Shuffle(order);
  PrunedSample s;
  for (int w : order) s.Offer(Fixed::FromInt(w), w, budget);
  EXPECT_LE(static_cast<int>(s.items().size()), budget);
  EXPECT_EQ(s.cutoff(), Fixed::FromInt(budget + 1));
  EXPECT_EQ(s.items().back().weight, Fixed::FromInt(budget));
}

TEST(PrunedSample, PrefixForStopsAtCollectionBoundary) {
  PrunedSample s;
  for (auto [w, p] : {std::pair{"1", 0}, {"2", 1}, {"2", 2}, {"3", 3}}) {
    s.Offer(F(w), p, 10);
  }
  EXPECT_EQ(s.PrefixFor(2.5), 1u);
  EXPECT_EQ(s.PrefixFor(3), 3u);
  EXPECT_EQ(s.PrefixFor(0.5), 0u);
}

TEST(CloseNeighbors, KeepsNearestWithIdTies) {
  CloseNeighbors c(3);
  c.Offer(F("2"), 7);
  c.Offer(F("1"), 9);
  c.Offer(F("2"), 4);
  c.Offer(F("5"), 1);
  c.Offer(F("2"), 2);
  c.Finalize();
  ASSERT_EQ(c.entries().size(), 3u);
  EXPECT_EQ(c.entries()[0].point, 9);
  EXPECT_EQ(c.entries()[1].point, 2);
  EXPECT_EQ(c.entries()[2].point, 4);
  EXPECT_TRUE(c.Knows(F("1")));
  EXPECT_FALSE(c.Knows(F("2")));
  EXPECT_EQ(c.CountWithin(F("1")), 2);
  EXPECT_EQ(c.CountWithin(F("0.5")), 1);
}

TEST(CloseNeighbors, ContentIgnoresStreamOrder) {
  DenseMatrix d = testing::RandomMatrix(20, {F("1"), F("2"), F("3")}, 5);
  auto c = SmallSketch(1);
  std::vector<std::vector<WeightedSample>> reference;
  for (uint64_t seed = 0; seed < 4; ++seed) {
    SketchPool pool(20, c);
    auto s = StreamOf(d, StreamOrder::kFixedPermutation, seed);
    s.Replay([&](const DistanceEntry& e) { pool.Ingest(e); });
    pool.Finalize();
    std::vector<std::vector<WeightedSample>> got;
    for (PointId v = 0; v < 20; ++v) got.push_back(pool.close(v).entries());
    if (seed == 0) reference = got;
    EXPECT_EQ(got, reference);
  }
}

TEST(CompressedSet, OrderStatistics) {
  CompressedSet s({F("3"), F("1"), F("3")});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.Predecessor(F("3")), F("1"));
  EXPECT_EQ(s.Successor(F("1")), F("3"));
  EXPECT_EQ(s.Predecessor(F("1")), Fixed());
  EXPECT_FALSE(s.Successor(F("3")).has_value());
  EXPECT_TRUE(s.Contains(F("1")));
  EXPECT_FALSE(s.Contains(F("2")));
}

SketchPool Ingested(const DenseMatrix& d, const SketchConfig& c,
                    MemoryMeter* meter = nullptr) {
  SketchPool pool(d.n(), c, meter);
  auto s = StreamOf(d, StreamOrder::kFixedPermutation, c.seed);
  s.Replay([&](const DistanceEntry& e) { pool.Ingest(e); });
  pool.Finalize();
  return pool;
}

TEST(CompressedSet, HarvestsPlantedLevels) {
  DenseMatrix two = testing::Upper(2, {"4.25"});
  EXPECT_EQ(Ingested(two, SketchConfig::Exact(2, 0)).BuildCompressedSet().values(),
            (std::vector<Fixed>{F("4.25")}));

  GeneratorSpec spec;
  spec.n = 40;
  spec.depth = 3;
  spec.seed = 2;
  auto g = Generate(spec);
  SketchPool pool = Ingested(*g.matrix, SketchConfig::Exact(40, 0));
  EXPECT_EQ(pool.BuildCompressedSet().values(), g.matrix->DistinctValues());
  EXPECT_EQ(pool.BuildCompressedSet().size(), 3u);
}

TEST(SketchPool, PhaseErrors) {
  SketchPool pool(3, SmallSketch(0));
  EXPECT_THROW(pool.Report(0, F("1"), 0), PhaseError);
  pool.Finalize();
  EXPECT_THROW(pool.Ingest({0, 1, F("1")}), PhaseError);
}

TEST(EstimateDegree, ExactPaths) {
  // Star around 0: five neighbors at 1, the rest at 9.
  DenseMatrix d = testing::Blocks({6, 10}, F("1"), F("9"));
  for (PointId u = 1; u < 16; ++u) {
    for (PointId v = u + 1; v < 16; ++v) d.set(u, v, F("9"));
  }
  SketchPool pool = Ingested(d, SmallSketch(4));
  EXPECT_EQ(pool.EstimateDegree(0, F("1"), 0), 6.0);  // itself and five
  EXPECT_EQ(pool.EstimateDegree(0, F("0.5"), 0), 1.0);
  EXPECT_EQ(pool.ExactNeighborhood(0, F("1")),
            (std::vector<PointId>{0, 1, 2, 3, 4, 5}));
}

TEST(EstimateDegree, CompleteGraphWithinLambda) {
  const PointId n = 400;
  DenseMatrix d = testing::Blocks({n}, F("1"), F("1"));
  int good = 0;
  const int seeds = 40;
  for (int seed = 0; seed < seeds; ++seed) {
    auto c = SmallSketch(seed);
    c.instance_count = 1;
    c.sample_factor = 128;
    SketchPool pool = Ingested(d, c);
    ASSERT_FALSE(pool.Knows(0, F("1")));
    double est = pool.EstimateDegree(0, F("1"), 0);
    good += std::abs(est - n) <= c.lambda * n;
  }
  EXPECT_GE(good, seeds * 9 / 10);
}

// Owner 0 with `inner` neighbors at 1 and `outer` at 3; no other pairs.
SketchPool TwoShell(PointId inner, PointId outer, const SketchConfig& c) {
  SketchPool pool(1 + inner + outer, c);
  Rng rng(c.seed ^ 0x55);
  std::vector<PointId> others(inner + outer);
  for (PointId i = 0; i < inner + outer; ++i) others[i] = i + 1;
  rng.Shuffle(others);
  for (PointId p : others) pool.Ingest({0, p, p <= inner ? F("1") : F("3")});
  pool.Finalize();
  return pool;
}

TEST(Report, LowerBranchWhenUpperIsMostlyHeavier) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto c = SmallSketch(seed);
    c.zeta = 0.05;
    c.instance_count = 1;
    SketchPool pool = TwoShell(200, 2000, c);
    auto r = pool.Report(0, F("2"), 0);
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r->governing, F("1")) << seed;
    const double d_w = 201;
    EXPECT_GE(r->size, d_w / 1.5);
    EXPECT_LE(r->size, d_w * 1.5);
  }
}

TEST(Report, SingleShellMatchesDegree) {
  auto c = SmallSketch(3);
  c.instance_count = 1;
  SketchPool pool = TwoShell(1000, 0, c);
  auto r = pool.Report(0, F("1"), 0);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->governing, F("1"));
  EXPECT_NEAR(pool.EstimateDegree(0, F("1"), 0), 1001, 0.25 * 1001);
}

TEST(Memory, MeterMatchesPoolWords) {
  DenseMatrix d = testing::RandomMatrix(60, {F("1"), F("2"), F("3")}, 2);
  MemoryMeter meter;
  SketchPool pool = Ingested(d, SmallSketch(9), &meter);
  EXPECT_EQ(meter.current(), pool.words());
  EXPECT_GE(meter.peak(), meter.current());
  EXPECT_GT(pool.words(), 0);
}

TEST(Snapshot, RoundTripPreservesQueries) {
  DenseMatrix d = testing::RandomMatrix(50, {F("1"), F("2"), F("3")}, 6);
  SketchPool pool = Ingested(d, SmallSketch(12));
  std::stringstream buf;
  pool.Save(buf);
  SketchPool back = SketchPool::Load(buf);
  EXPECT_EQ(back.n(), pool.n());
  EXPECT_EQ(back.words(), pool.words());
  EXPECT_EQ(back.BuildCompressedSet().values(),
            pool.BuildCompressedSet().values());
  for (PointId v = 0; v < 50; ++v) {
    for (const char* w : {"1", "2", "3"}) {
      EXPECT_EQ(back.EstimateDegree(v, F(w), 1), pool.EstimateDegree(v, F(w), 1));
    }
  }
  std::stringstream junk("not a snapshot");
  EXPECT_THROW(SketchPool::Load(junk), Error);
}

}  // namespace
}  // namespace streamfit
