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

#include "streamfit/oracles.h"

#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "streamfit/kernels.h"

namespace streamfit {
namespace {

constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

class Deadline {
 public:
  explicit Deadline(double seconds)
      : end_(std::chrono::steady_clock::now() +
             std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                 std::chrono::duration<double>(seconds))) {}
  void Check() const {
    if (std::chrono::steady_clock::now() > end_) {
      throw OracleUnavailable("oracle time cap exceeded");
    }
  }

 private:
  std::chrono::steady_clock::time_point end_;
};

// Dynamic program over (subset, top value index). F[i][mask] is the best
// cost of a tree on mask whose levels are values[0..i-1]; row 0 allows no
// internal node at all.
template <typename PairCost>
std::pair<int64_t, UltrametricTree> BruteUltra(const DenseMatrix& d,
                                               const OracleBudget& budget,
                                               PairCost pair_cost) {
  d.RequireComplete();
  const int n = d.n();
  if (n > budget.max_n_l0) {
    throw OracleUnavailable("n = " + std::to_string(n) +
                            " exceeds the enumeration cap");
  }
  if (n == 1) return {0, UltrametricTree()};
  const std::vector<Fixed> values = d.DistinctValues();
  const int nv = static_cast<int>(values.size());
  const uint32_t full = (uint32_t{1} << n) - 1;
  const size_t masks = size_t{1} << n;
  Deadline deadline(budget.time_cap_seconds);

  std::vector<std::vector<int64_t>> f(nv + 1, std::vector<int64_t>(masks, kInf));
  // 0 = skip this value; otherwise the block holding the lowest point.
  std::vector<std::vector<uint32_t>> f_choice(nv + 1,
                                              std::vector<uint32_t>(masks, 0));
  std::vector<std::vector<uint32_t>> p_choice(nv + 1,
                                              std::vector<uint32_t>(masks, 0));
  for (int p = 0; p < n; ++p) {
    for (int i = 0; i <= nv; ++i) f[i][uint32_t{1} << p] = 0;
  }

  std::vector<int64_t> row(static_cast<size_t>(n) * masks);
  std::vector<int64_t> part(masks);
  for (int i = 1; i <= nv; ++i) {
    deadline.Check();
    const Fixed level = values[i - 1];
    // row[u][mask] = cost of pairs (u, w), w in mask, at this level.
    for (int u = 0; u < n; ++u) {
      int64_t* r = &row[static_cast<size_t>(u) * masks];
      r[0] = 0;
      for (uint32_t mask = 1; mask < masks; ++mask) {
        int w = std::countr_zero(mask);
        r[mask] = r[mask & (mask - 1)] +
                  (w == u ? 0 : pair_cost(d.at(u, w), level));
      }
    }
    auto cross = [&](uint32_t a, uint32_t b) {
      int64_t total = 0;
      for (uint32_t m = a; m != 0; m &= m - 1) {
        total += row[static_cast<size_t>(std::countr_zero(m)) * masks + b];
      }
      return total;
    };
    const auto& below = f[i - 1];
    part[0] = 0;
    for (uint32_t mask = 1; mask <= full; ++mask) {
      if ((mask & 0xfff) == 0) deadline.Check();
      const uint32_t low = mask & (~mask + 1);
      const uint32_t others = mask ^ low;
      int64_t best_part = kInf, best_top = kInf;
      uint32_t arg_part = 0, arg_top = 0;
      // Blocks containing the lowest point.
      for (uint32_t sub = others;; sub = (sub - 1) & others) {
        const uint32_t block = sub | low;
        const uint32_t rest = mask ^ block;
        if (below[block] < kInf && part[rest] < kInf) {
          int64_t c = below[block] + cross(block, rest) + part[rest];
          if (c < best_part) {
            best_part = c;
            arg_part = block;
          }
          if (rest != 0 && c < best_top) {
            best_top = c;
            arg_top = block;
          }
        }
        if (sub == 0) break;
      }
      part[mask] = best_part;
      p_choice[i][mask] = arg_part;
      if (std::popcount(mask) == 1) continue;
      f[i][mask] = f[i - 1][mask];
      f_choice[i][mask] = 0;
      if (best_top < f[i][mask]) {
        f[i][mask] = best_top;
        f_choice[i][mask] = arg_top;
      }
    }
  }

  TreeBuilder builder(n);
  auto build = [&](auto& self, uint32_t mask, int i) -> int {
    if (std::popcount(mask) == 1) return builder.Leaf(std::countr_zero(mask));
    while (f_choice[i][mask] == 0) --i;
    std::vector<int> kids;
    uint32_t block = f_choice[i][mask];
    uint32_t rest = mask;
    for (;;) {
      kids.push_back(self(self, block, i - 1));
      rest ^= block;
      if (rest == 0) break;
      block = p_choice[i][rest];
    }
    return builder.Internal(values[i - 1], std::move(kids));
  };
  const int64_t cost = f[nv][full];
  return {cost, builder.Build(build(build, full, nv))};
}

}  // namespace

BruteL0Result BruteL0Ultra(const DenseMatrix& d, const OracleBudget& budget) {
  auto [cost, tree] = BruteUltra(d, budget, [](Fixed x, Fixed level) -> int64_t {
    return x == level ? 0 : 1;
  });
  return BruteL0Result{cost, std::move(tree)};
}

BruteL1Result BruteL1Ultra(const DenseMatrix& d, const OracleBudget& budget) {
  auto [cost, tree] = BruteUltra(d, budget, [](Fixed x, Fixed level) -> int64_t {
    return Abs(x - level).raw();
  });
  return BruteL1Result{Fixed::FromRaw(cost), std::move(tree)};
}

CorrelationResult BruteCorrelation(const DenseMatrix& d,
                                   const OracleBudget& budget) {
  d.RequireComplete();
  const int n = d.n();
  if (n > budget.max_n_cc) {
    throw OracleUnavailable("n = " + std::to_string(n) +
                            " exceeds the partition cap");
  }
  const std::vector<Fixed> values = d.DistinctValues();
  if (values.size() > 2) {
    throw DomainError("correlation oracle needs at most two distinct values");
  }
  const Fixed similar = values.empty() ? Fixed() : values.front();
  Deadline deadline(budget.time_cap_seconds);

  CorrelationResult best;
  best.cost = kInf;
  std::vector<int> labels(n, 0);
  int64_t visited = 0;
  // Restricted growth strings with running cost and a bound.
  auto dfs = [&](auto& self, int i, int used, int64_t cost) -> void {
    if (cost >= best.cost) return;
    if (i == n) {
      best.cost = cost;
      best.labels = labels;
      return;
    }
    if ((++visited & 0xffff) == 0) deadline.Check();
    for (int label = 0; label <= used; ++label) {
      int64_t add = 0;
      for (int j = 0; j < i; ++j) {
        const bool together = labels[j] == label;
        const bool close = d.at(i, j) == similar;
        add += together != close;
      }
      labels[i] = label;
      self(self, i + 1, label == used ? used + 1 : used, cost + add);
    }
  };
  dfs(dfs, 0, 0, 0);
  return best;
}

MinimaxCertificate MinimaxCert(const DenseMatrix& d) {
  d.RequireComplete();
  if (d.n() > 256) throw DomainError("minimax certificate limited to n <= 256");
  MinimaxCertificate cert{kernels::MinimaxSerial(d), Fixed(), 0, 0};
  Fixed worst;
  bool have = false;
  for (PointId u = 0; u < d.n(); ++u) {
    for (PointId v = u + 1; v < d.n(); ++v) {
      Fixed gap = d.at(u, v) - cert.minimax.at(u, v);
      if (!have || gap > worst) {
        have = true;
        worst = gap;
        cert.u = u;
        cert.v = v;
      }
    }
  }
  cert.lower_bound = worst.Half();
  return cert;
}

}  // namespace streamfit
