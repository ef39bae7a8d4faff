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

#include <functional>

#include "streamfit/errors.h"
#include "streamfit/generators.h"
#include "streamfit/kernels.h"
#include "streamfit/linf_fit.h"
#include "streamfit/metrics.h"
#include "streamfit/tree_metric.h"
#include "streamfit/ultrametric_tree.h"
#include "test_util.h"

namespace streamfit {
namespace {

using testing::F;
using testing::RandomMatrix;
using testing::StreamOf;
using testing::Upper;

const std::vector<Fixed> kAlphabet{F("1"), F("1.5"), F("2"), F("3.25")};

TEST(Kernels, ParallelMatchesSerial) {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    PointId n = 3 + static_cast<PointId>(seed * 5);
    DenseMatrix a = RandomMatrix(n, kAlphabet, seed);
    DenseMatrix b = RandomMatrix(n, kAlphabet, seed + 100);
    EXPECT_EQ(kernels::DiffSerial(a, b), kernels::DiffParallel(a, b));
    EXPECT_EQ(kernels::MinimaxSerial(a), kernels::MinimaxParallel(a));
    EXPECT_EQ(kernels::UltrametricSerial(a), kernels::UltrametricParallel(a));
    EXPECT_EQ(kernels::FourPointSerial(a), kernels::FourPointParallel(a));

    UltrametricTree ua = SubdominantUltrametric(a);
    UltrametricTree ub = SubdominantUltrametric(b);
    TreeMetricRep ta(ua, PivotData::FromMatrix(a, 0));
    TreeMetricRep tb(ub, PivotData::FromMatrix(b, 0));
    EXPECT_EQ(kernels::TreeL0Serial(ta, tb), kernels::TreeL0Parallel(ta, tb));
    EXPECT_EQ(kernels::TreeL0Serial(ta, ta), 0);
  }
}

TEST(Kernels, SubdominantIsUltrametricAndParallelAgreesOnIt) {
  DenseMatrix d = RandomMatrix(17, kAlphabet, 9);
  DenseMatrix u = SubdominantUltrametric(d).ToMatrix();
  EXPECT_TRUE(kernels::UltrametricSerial(u));
  EXPECT_TRUE(kernels::UltrametricParallel(u));
  EXPECT_TRUE(kernels::FourPointParallel(u));
  EXPECT_EQ(kernels::MinimaxParallel(u), u);
}

TEST(IsUltrametric, Examples) {
  // Gadget: three points pairwise at 0.5 plus one more at 1.5 from all.
  DenseMatrix gadget = Upper(4, {"0.5", "0.5", "1.5", "0.5", "1.5", "1.5"});
  EXPECT_TRUE(IsUltrametric(gadget));
  EXPECT_FALSE(IsUltrametric(Upper(3, {"2", "1", "1.5"})));
  EXPECT_TRUE(IsUltrametric(Upper(2, {"7"})));
  EXPECT_THROW(IsUltrametric(DenseMatrix(3)), DomainError);
}

TEST(FourPoint, Examples) {
  // D01 + D23 = 10, D02 + D13 = 4, D03 + D12 = 4.
  DenseMatrix bad = Upper(4, {"5", "2", "2", "2", "2", "5"});
  EXPECT_FALSE(FourPointCheck(bad));
  EXPECT_TRUE(FourPointCheck(Upper(3, {"2", "1", "1.5"})));
  EXPECT_THROW(FourPointCheck(DenseMatrix(4)), DomainError);

  // Path 0 - 1 - 2 - 3 with edge weights 1, 2, 3.
  DenseMatrix path = Upper(4, {"1", "3", "6", "2", "5", "3"});
  EXPECT_TRUE(FourPointCheck(path));
}

TEST(FourPoint, PlantedTreeMetricsPass) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::kPlantedTreeMetric;
    spec.n = 12;
    spec.seed = seed;
    EXPECT_TRUE(FourPointCheck(*Generate(spec).matrix)) << seed;
  }
}

UltrametricTree TreeOf(const DenseMatrix& u) {
  return SubdominantUltrametric(u);
}

TEST(Cost, Examples) {
  DenseMatrix d = Upper(3, {"2", "1", "1.5"});
  auto s = StreamOf(d);
  CostReport same = Cost(TreeOf(Upper(3, {"1.5", "1", "1.5"})), s);
  EXPECT_EQ(same.l0, 1);
  EXPECT_EQ(same.l1, F("0.5"));
  EXPECT_EQ(same.linf, F("0.5"));
  EXPECT_EQ(same.pairs, 3);
  EXPECT_EQ(same.gap_delta, F("0.5"));
  EXPECT_EQ(same.gap_Delta, F("1"));

  DenseMatrix ultra = Upper(3, {"1", "2", "2"});
  auto s2 = StreamOf(ultra);
  CostReport zero = Cost(TreeOf(ultra), s2);
  EXPECT_EQ(zero.l0, 0);
  EXPECT_EQ(zero.l1, Fixed());
  EXPECT_EQ(zero.linf, Fixed());

  // 1 inside {0,1} and {2,3}, 2 across; a flat tree at level 1.
  DenseMatrix two = testing::Blocks({2, 2}, F("1"), F("2"));
  auto s3 = StreamOf(two);
  TreeBuilder b(4);
  UltrametricTree flat =
      b.Build(b.Internal(F("1"), {b.Leaf(0), b.Leaf(1), b.Leaf(2), b.Leaf(3)}));
  EXPECT_EQ(Cost(flat, s3).l0, 4);
  EXPECT_EQ(CostValue(Cost(flat, s3), Norm::kL1), "4");
}

TEST(Cost, IntegrityErrors) {
  DenseMatrix partial(3);
  partial.set(0, 1, F("1"));
  partial.set(0, 2, F("1"));
  auto s = StreamOf(partial);
  TreeBuilder b(3);
  UltrametricTree t =
      b.Build(b.Internal(F("1"), {b.Leaf(0), b.Leaf(1), b.Leaf(2)}));
  EXPECT_THROW(Cost(t, s), StreamIntegrityError);
}

TEST(Cost, L1BoundsFollowGaps) {
  // Levels drawn from D's values: l1 lies between l0 * delta and l0 * Delta.
  for (uint64_t seed = 0; seed < 40; ++seed) {
    DenseMatrix d = RandomMatrix(8, kAlphabet, seed);
    UltrametricTree t = QuantizeLevels(SubdominantUltrametric(
                                           RandomMatrix(8, kAlphabet, seed + 7)),
                                       d.DistinctValues());
    auto s = StreamOf(d);
    CostReport r = Cost(t, s);
    EXPECT_GE(r.l1, r.gap_delta * r.l0);
    EXPECT_LE(r.l1, r.gap_Delta * r.l0);
  }
}

TEST(Cost, TreeMetricCostMatchesMatrix) {
  DenseMatrix d = RandomMatrix(9, kAlphabet, 3);
  TreeMetricRep t(SubdominantUltrametric(d), PivotData::FromMatrix(d, 2));
  auto s = StreamOf(d);
  EXPECT_EQ(Cost(t, s), CostAgainst(t.ToMatrix(), d));
}

// Every ultrametric tree over n <= 4 labeled points with levels from the
// given values, by recursive set partitioning.
void AllTrees(PointId n, const std::vector<Fixed>& levels,
              const std::function<void(const UltrametricTree&)>& visit) {
  // Encode candidate matrices directly: enumerate all assignments of the
  // values to pairs and keep those that are ultrametric.
  const size_t pairs = PairCount(n);
  std::vector<size_t> digit(pairs, 0);
  for (;;) {
    DenseMatrix m(n);
    size_t k = 0;
    for (PointId u = 0; u < n; ++u) {
      for (PointId v = u + 1; v < n; ++v) m.set(u, v, levels[digit[k++]]);
    }
    if (IsUltrametric(m)) visit(SubdominantUltrametric(m));
    size_t i = 0;
    while (i < pairs && ++digit[i] == levels.size()) digit[i++] = 0;
    if (i == pairs) break;
  }
}

TEST(Quantize, NeverIncreasesL0) {
  const std::vector<Fixed> d_values{F("1"), F("2"), F("3")};
  const std::vector<Fixed> off_grid{F("0.5"), F("1.7"), F("2.5"), F("3.5")};
  for (uint64_t seed = 0; seed < 6; ++seed) {
    DenseMatrix d = RandomMatrix(4, d_values, seed);
    std::vector<Fixed> values = d.DistinctValues();
    AllTrees(4, off_grid, [&](const UltrametricTree& t) {
      int64_t before = CostAgainst(t.ToMatrix(), d).l0;
      int64_t after = CostAgainst(QuantizeLevels(t, values).ToMatrix(), d).l0;
      EXPECT_LE(after, before);
    });
  }
}

}  // namespace
}  // namespace streamfit
