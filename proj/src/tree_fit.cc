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

#include "streamfit/tree_fit.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <memory>
#include <utility>

#include "streamfit/errors.h"
#include "streamfit/kernels.h"
#include "streamfit/linf_fit.h"
#include "streamfit/seeds.h"

namespace streamfit {
namespace {

using Mask = uint64_t;

// Bron-Kerbosch with pivoting; visits every maximal clique.
template <typename Visit>
void MaximalCliques(const std::vector<Mask>& adj, Mask r, Mask p, Mask x,
                    Visit& visit) {
  if (p == 0 && x == 0) {
    visit(r);
    return;
  }
  Mask px = p | x;
  int pivot = std::countr_zero(px);
  Mask candidates = p & ~adj[pivot];
  while (candidates != 0) {
    int v = std::countr_zero(candidates);
    Mask bit = Mask{1} << v;
    candidates &= candidates - 1;
    MaximalCliques(adj, r | bit, p & adj[v], x & adj[v], visit);
    p &= ~bit;
    x |= bit;
  }
}

struct CliqueInfo {
  int max_size = 0;
  // Cliques of maximum size.
  std::vector<Mask> best;
};

CliqueInfo MaxCliques(const std::vector<int64_t>& pairwise, size_t t,
                      int64_t threshold) {
  std::vector<Mask> adj(t, 0);
  for (size_t i = 0; i < t; ++i) {
    for (size_t j = 0; j < t; ++j) {
      if (i != j && pairwise[i * t + j] <= threshold) adj[i] |= Mask{1} << j;
    }
  }
  CliqueInfo info;
  auto visit = [&](Mask clique) {
    int size = std::popcount(clique);
    if (size > info.max_size) {
      info.max_size = size;
      info.best.clear();
    }
    if (size == info.max_size) info.best.push_back(clique);
  };
  const Mask all = t == 64 ? ~Mask{0} : (Mask{1} << t) - 1;
  MaximalCliques(adj, 0, all, 0, visit);
  return info;
}

int CopyCapped(const UltrametricTree& u, int node, PointId drop, Fixed cap,
               TreeBuilder& b) {
  if (u.is_leaf(node)) return node == static_cast<int>(drop) ? -1 : node;
  std::vector<int> kids;
  for (int c : u.nodes()[node].children) {
    int k = CopyCapped(u, c, drop, cap, b);
    if (k >= 0) kids.push_back(k);
  }
  if (kids.empty()) return -1;
  if (kids.size() == 1) return kids[0];
  return b.Internal(std::min(u.nodes()[node].level, cap), std::move(kids));
}

}  // namespace

std::vector<PivotData> CollectPivotRows(StreamSource& source,
                                        const std::vector<PointId>& pivots) {
  const PointId n = source.n();
  std::vector<int> index_of(n, -1);
  for (size_t i = 0; i < pivots.size(); ++i) {
    if (pivots[i] < 0 || pivots[i] >= n) throw DomainError("pivot out of range");
    index_of[pivots[i]] = static_cast<int>(i);
  }
  std::vector<std::vector<Fixed>> rows(pivots.size(),
                                       std::vector<Fixed>(n, Fixed()));
  PairTracker tracker(n);
  source.Replay([&](const DistanceEntry& e) {
    tracker.Mark(e.u, e.v);
    if (index_of[e.u] >= 0) rows[index_of[e.u]][e.v] = e.d;
    if (index_of[e.v] >= 0) rows[index_of[e.v]][e.u] = e.d;
  });
  tracker.RequireComplete();
  std::vector<PivotData> out;
  out.reserve(pivots.size());
  for (size_t i = 0; i < pivots.size(); ++i) {
    out.push_back(PivotData::FromRow(pivots[i], std::move(rows[i])));
  }
  return out;
}

LinfTreeResult FitLinfTree(StreamSource& source, std::optional<PointId> pivot) {
  const PointId a = pivot.value_or(0);
  std::vector<PivotData> rows = CollectPivotRows(source, {a});
  CentroidStream shifted(source, rows[0]);
  UltrametricTree base = FitLinfMinDecrement(shifted);
  return LinfTreeResult{TreeMetricRep(std::move(base), std::move(rows[0]))};
}

CliqueSelection SelectTreeByClique(const std::vector<PointId>& pivots,
                                   const std::vector<int64_t>& pairwise_l0) {
  const size_t t = pivots.size();
  if (t == 0) throw DomainError("no pivots");
  if (t > 64) throw DomainError("at most 64 pivots");
  if (pairwise_l0.size() != t * t) throw DomainError("pairwise size mismatch");
  for (size_t i = 0; i < t; ++i) {
    if (pairwise_l0[i * t + i] != 0) throw DomainError("nonzero diagonal");
    for (size_t j = 0; j < t; ++j) {
      if (pairwise_l0[i * t + j] != pairwise_l0[j * t + i]) {
        throw DomainError("pairwise matrix not symmetric");
      }
    }
  }
  CliqueSelection sel;
  if (t == 1) {
    sel.clique = {0};
    return sel;
  }
  std::vector<int64_t> values{0};
  for (size_t i = 0; i < t; ++i) {
    for (size_t j = i + 1; j < t; ++j) values.push_back(pairwise_l0[i * t + j]);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  const int need = static_cast<int>((t + 1) / 2);
  auto feasible = [&](int64_t x) {
    return MaxCliques(pairwise_l0, t, kCliqueEdgeFactor * x).max_size >= need;
  };
  size_t lo = 0, hi = values.size() - 1;  // values.back() is feasible
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (feasible(values[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  // The predicate must switch exactly once.
  for (size_t i = 0; i < values.size(); ++i) {
    if (feasible(values[i]) != (i >= lo)) {
      throw ContractError("clique feasibility is not monotone");
    }
  }
  sel.threshold = values[lo];
  CliqueInfo info =
      MaxCliques(pairwise_l0, t, kCliqueEdgeFactor * sel.threshold);
  PointId best_pivot = 0;
  bool have = false;
  for (Mask clique : info.best) {
    for (Mask m = clique; m != 0; m &= m - 1) {
      size_t i = static_cast<size_t>(std::countr_zero(m));
      if (!have || pivots[i] < best_pivot) {
        have = true;
        best_pivot = pivots[i];
        sel.winner = i;
        sel.clique.clear();
        for (Mask k = clique; k != 0; k &= k - 1) {
          sel.clique.push_back(static_cast<size_t>(std::countr_zero(k)));
        }
      }
    }
  }
  return sel;
}

std::vector<PointId> SamplePivots(PointId n, int count, uint64_t seed) {
  if (n < 1) throw DomainError("no points");
  count = std::clamp(count, 1, static_cast<int>(n));
  std::vector<PointId> all(n);
  for (PointId p = 0; p < n; ++p) all[p] = p;
  Rng rng(SubSeed(seed, "pivots"));
  rng.Shuffle(all);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

int DefaultPivotCount(PointId n) {
  if (n < 2) return 1;
  return std::max(1, static_cast<int>(std::ceil(std::log(static_cast<double>(n)))));
}

nlohmann::json L0TreeResult::ReportJson() const {
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& r : reports) fits.push_back(r.ToJson());
  return {{"pivots", candidates.pivots},
          {"pairwise_l0", candidates.pairwise_l0},
          {"selected_pivot", candidates.pivots[selection.winner]},
          {"threshold", selection.threshold},
          {"clique", selection.clique},
          {"fits", std::move(fits)}};
}

UltrametricTree RestrictToPivot(const UltrametricTree& u, PointId a,
                                Fixed top) {
  const PointId n = u.num_points();
  if (a >= n) throw DomainError("pivot out of range");
  if (n == 1) return u;
  TreeBuilder b(n);
  int rest = CopyCapped(u, u.root(), a, top, b);
  return b.Build(b.Internal(top, {rest, b.Leaf(a)}));
}

L0TreeResult FitL0Tree(StreamSource& source, const SketchConfig& config,
                       const AgreementParams& params,
                       const L0TreeOptions& options) {
  const PointId n = source.n();
  if (n < 2) throw DomainError("tree fitting needs at least two points");
  const int count = options.pivot_count > 0 ? options.pivot_count
                                            : DefaultPivotCount(n);
  if (count > 64) throw ConfigError("at most 64 pivots");
  std::vector<PointId> pivots = SamplePivots(n, count, config.seed);
  const size_t t = pivots.size();

  std::vector<PivotData> rows = CollectPivotRows(source, pivots);

  std::vector<std::unique_ptr<L0Fitter>> fitters;
  for (size_t i = 0; i < t; ++i) {
    SketchConfig c = config;
    c.seed = HashCombine(SubSeed(config.seed, "pivot_fit"),
                         static_cast<uint64_t>(pivots[i]));
    fitters.push_back(std::make_unique<L0Fitter>(n, c, params, options.fit));
  }
  source.Replay([&](const DistanceEntry& e) {
    for (size_t i = 0; i < t; ++i) {
      fitters[i]->Ingest(
          DistanceEntry{e.u, e.v, e.d + CentroidValue(rows[i], e.u, e.v)});
    }
  });

  std::vector<std::optional<L0FitResult>> results(t);
  std::vector<std::exception_ptr> errors(t);
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < t; ++i) {
    try {
      results[i] = fitters[i]->Finish();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  CandidateSet cands;
  cands.pivots = pivots;
  std::vector<L0FitReport> reports;
  for (size_t i = 0; i < t; ++i) {
    cands.trees.emplace_back(
        RestrictToPivot(results[i]->tree, pivots[i], rows[i].m_a * 2), rows[i]);
    reports.push_back(results[i]->report);
  }
  cands.pairwise_l0.assign(t * t, 0);
  for (size_t i = 0; i < t; ++i) {
    for (size_t j = i + 1; j < t; ++j) {
      int64_t d = kernels::TreeL0Parallel(cands.trees[i], cands.trees[j]);
      cands.pairwise_l0[i * t + j] = cands.pairwise_l0[j * t + i] = d;
    }
  }
  CliqueSelection sel = SelectTreeByClique(pivots, cands.pairwise_l0);
  TreeMetricRep chosen = cands.trees[sel.winner];
  return L0TreeResult{std::move(chosen), std::move(cands), std::move(sel),
                      std::move(reports)};
}

}  // namespace streamfit
