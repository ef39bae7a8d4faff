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
#include <functional>
#include <limits>

#include "streamfit/errors.h"
#include "streamfit/linf_fit.h"
#include "streamfit/metrics.h"
#include "streamfit/oracles.h"
#include "test_util.h"

namespace streamfit {
namespace {

using testing::F;
using testing::RandomMatrix;
using testing::Upper;

// Independent reference: every assignment of D's values to the pairs,
// filtered by the strong triangle inequality. Feasible for n <= 4.
template <typename Score>
auto Exhaustive(const DenseMatrix& d, Score score) {
  const std::vector<Fixed> values = d.DistinctValues();
  const size_t pairs = PairCount(d.n());
  std::vector<size_t> digit(pairs, 0);
  decltype(score(d, d)) best{};
  bool have = false;
  for (;;) {
    DenseMatrix m(d.n());
    size_t k = 0;
    for (PointId u = 0; u < d.n(); ++u) {
      for (PointId v = u + 1; v < d.n(); ++v) m.set(u, v, values[digit[k++]]);
    }
    if (IsUltrametric(m)) {
      auto s = score(m, d);
      if (!have || s < best) best = s;
      have = true;
    }
    size_t i = 0;
    while (i < pairs && ++digit[i] == values.size()) digit[i++] = 0;
    if (i == pairs) break;
  }
  return best;
}

TEST(BruteL0Ultra, UltrametricInputCostsNothing) {
  DenseMatrix d = Upper(4, {"1", "3", "3", "3", "3", "2"});
  BruteL0Result r = BruteL0Ultra(d);
  EXPECT_EQ(r.cost, 0);
  EXPECT_EQ(r.witness.ToMatrix(), d);
}

TEST(BruteL0Ultra, FlippedEdgeCostsOne) {
  DenseMatrix d = testing::Blocks({3, 3}, F("1"), F("2"));
  d.set(1, 4, F("1"));
  EXPECT_EQ(BruteL0Ultra(d).cost, 1);
  EXPECT_EQ(BruteCorrelation(d).cost, 1);
}

TEST(BruteL0Ultra, TinyInstances) {
  EXPECT_EQ(BruteL0Ultra(DenseMatrix(1)).cost, 0);
  EXPECT_EQ(BruteL0Ultra(Upper(2, {"2"})).cost, 0);
  EXPECT_EQ(BruteL0Ultra(Upper(3, {"2", "1", "1.5"})).cost, 1);
}

TEST(BruteL0Ultra, MatchesExhaustiveReference) {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    PointId n = 3 + static_cast<PointId>(seed % 2);
    DenseMatrix d = RandomMatrix(n, {F("1"), F("2"), F("3")}, seed);
    BruteL0Result r = BruteL0Ultra(d);
    int64_t ref = Exhaustive(d, [](const DenseMatrix& m, const DenseMatrix& x) {
      return CostAgainst(m, x).l0;
    });
    EXPECT_EQ(r.cost, ref) << seed;
    EXPECT_EQ(CostAgainst(r.witness.ToMatrix(), d).l0, r.cost);
  }
}

TEST(BruteL1Ultra, MatchesExhaustiveReference) {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    PointId n = 3 + static_cast<PointId>(seed % 2);
    DenseMatrix d = RandomMatrix(n, {F("1"), F("1.5"), F("4")}, seed);
    BruteL1Result r = BruteL1Ultra(d);
    Fixed ref = Exhaustive(d, [](const DenseMatrix& m, const DenseMatrix& x) {
      return CostAgainst(m, x).l1;
    });
    EXPECT_EQ(r.cost, ref) << seed;
    EXPECT_EQ(CostAgainst(r.witness.ToMatrix(), d).l1, r.cost);
  }
}

TEST(BruteL0Ultra, WitnessIsValidAtSevenPoints) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    DenseMatrix d = RandomMatrix(7, {F("1"), F("2"), F("3")}, seed);
    BruteL0Result r = BruteL0Ultra(d);
    EXPECT_TRUE(IsUltrametric(r.witness.ToMatrix()));
    EXPECT_EQ(CostAgainst(r.witness.ToMatrix(), d).l0, r.cost);
    // No better than any quantized fit we can build directly.
    UltrametricTree sub = QuantizeLevels(SubdominantUltrametric(d),
                                         d.DistinctValues());
    EXPECT_LE(r.cost, CostAgainst(sub.ToMatrix(), d).l0);
  }
}

TEST(BruteL0Ultra, BudgetLimits) {
  DenseMatrix d = RandomMatrix(8, {F("1"), F("2")}, 1);
  EXPECT_THROW(BruteL0Ultra(d), OracleUnavailable);
  OracleBudget wide;
  wide.max_n_l0 = 8;
  wide.time_cap_seconds = 1e-9;
  EXPECT_THROW(BruteL0Ultra(RandomMatrix(8, {F("1"), F("2"), F("3")}, 1), wide),
               OracleUnavailable);
}

TEST(BruteCorrelation, AgreesWithL0OnTwoValues) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    PointId n = 3 + static_cast<PointId>(seed % 5);
    DenseMatrix d = RandomMatrix(n, {F("1"), F("2")}, seed);
    if (d.DistinctValues().size() < 2) continue;
    CorrelationResult c = BruteCorrelation(d);
    EXPECT_EQ(c.cost, BruteL0Ultra(d).cost) << seed;
    // Recount the labels' disagreements.
    int64_t bad = 0;
    for (PointId u = 0; u < n; ++u) {
      for (PointId v = u + 1; v < n; ++v) {
        bool similar = d.at(u, v) == F("1");
        bad += similar != (c.labels[u] == c.labels[v]);
      }
    }
    EXPECT_EQ(bad, c.cost);
  }
}

TEST(BruteCorrelation, RejectsThreeValues) {
  EXPECT_THROW(BruteCorrelation(Upper(3, {"1", "2", "3"})), DomainError);
}

TEST(MinimaxCert, Examples) {
  MinimaxCertificate c = MinimaxCert(Upper(3, {"2", "1", "1.5"}));
  EXPECT_EQ(c.lower_bound, F("0.25"));
  EXPECT_EQ(c.u, 0);
  EXPECT_EQ(c.v, 1);
  EXPECT_EQ(c.minimax.at(0, 1), F("1.5"));
  EXPECT_EQ(MinimaxCert(Upper(2, {"3"})).lower_bound, Fixed());
  EXPECT_EQ(MinimaxCert(Upper(3, {"1", "2", "2"})).lower_bound, Fixed());
}

TEST(MinimaxCert, IndependentOfTheMstCode) {
  // Path maxima by brute force over all simple paths for small n.
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const PointId n = 6;
    DenseMatrix d = RandomMatrix(n, {F("1"), F("2"), F("3"), F("5")}, seed);
    MinimaxCertificate c = MinimaxCert(d);
    std::function<Fixed(PointId, PointId, std::vector<bool>&)> best =
        [&](PointId at, PointId goal, std::vector<bool>& seen) -> Fixed {
      Fixed out = Fixed::FromRaw(std::numeric_limits<int64_t>::max());
      for (PointId x = 0; x < n; ++x) {
        if (seen[x] || x == at) continue;
        Fixed step = d.at(at, x);
        if (x == goal) {
          out = std::min(out, step);
          continue;
        }
        seen[x] = true;
        out = std::min(out, std::max(step, best(x, goal, seen)));
        seen[x] = false;
      }
      return out;
    };
    for (PointId u = 0; u < n; ++u) {
      for (PointId v = u + 1; v < n; ++v) {
        std::vector<bool> seen(n, false);
        seen[u] = true;
        EXPECT_EQ(c.minimax.at(u, v), best(u, v, seen));
      }
    }
  }
}

}  // namespace
}  // namespace streamfit
