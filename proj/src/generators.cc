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

#include "streamfit/generators.h"

#include <algorithm>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "streamfit/errors.h"
#include "streamfit/linf_fit.h"
#include "streamfit/seeds.h"

namespace streamfit {
namespace {

std::vector<Fixed> SortedAlphabet(const GeneratorSpec& spec) {
  std::vector<Fixed> values = spec.alphabet;
  if (values.empty()) {
    switch (spec.kind) {
      case GeneratorKind::kPlantedUltrametric:
        for (int i = 1; i <= std::max(spec.depth, 1); ++i) {
          values.push_back(Fixed::FromInt(i));
        }
        break;
      case GeneratorKind::kPlantedTreeMetric:
        values = {Fixed::FromInt(1), *Fixed::Parse("1.5"), Fixed::FromInt(2)};
        break;
      case GeneratorKind::kTwoValued:
        values = {Fixed::FromInt(1), Fixed::FromInt(2)};
        break;
      case GeneratorKind::kUniformRandom:
        values = {Fixed::FromInt(1), Fixed::FromInt(2), Fixed::FromInt(3)};
        break;
    }
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.front() <= Fixed()) throw ConfigError("alphabet values must be positive");
  return values;
}

// Splits items into k non-empty blocks at random cut points.
std::vector<std::vector<PointId>> RandomBlocks(std::vector<PointId> items,
                                               size_t k, Rng& rng) {
  rng.Shuffle(items);
  std::vector<size_t> cuts;
  std::vector<size_t> positions(items.size() - 1);
  std::iota(positions.begin(), positions.end(), size_t{1});
  rng.Shuffle(positions);
  cuts.assign(positions.begin(), positions.begin() + (k - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(items.size());
  std::vector<std::vector<PointId>> blocks;
  size_t start = 0;
  for (size_t cut : cuts) {
    blocks.emplace_back(items.begin() + start, items.begin() + cut);
    std::sort(blocks.back().begin(), blocks.back().end());
    start = cut;
  }
  return blocks;
}

UltrametricTree PlantedUltrametric(const GeneratorSpec& spec,
                                   const std::vector<Fixed>& alphabet,
                                   Rng& rng) {
  if (spec.depth < 1) throw ConfigError("depth must be at least 1");
  if (static_cast<int>(alphabet.size()) < spec.depth) {
    throw ConfigError("alphabet has fewer values than the requested depth");
  }
  // A random strictly decreasing choice of depth levels.
  std::vector<size_t> picks(alphabet.size());
  std::iota(picks.begin(), picks.end(), size_t{0});
  rng.Shuffle(picks);
  picks.resize(spec.depth);
  std::sort(picks.rbegin(), picks.rend());
  std::vector<Fixed> levels;
  for (size_t p : picks) levels.push_back(alphabet[p]);

  TreeBuilder builder(spec.n);
  std::function<int(std::vector<PointId>, size_t)> grow =
      [&](std::vector<PointId> set, size_t depth) -> int {
    if (set.size() == 1) return builder.Leaf(set[0]);
    std::vector<int> children;
    if (depth + 1 == levels.size()) {
      for (PointId p : set) children.push_back(builder.Leaf(p));
    } else {
      size_t most = std::min<size_t>(4, set.size());
      size_t k = 2 + static_cast<size_t>(rng.Below(most - 1));
      for (auto& block : RandomBlocks(std::move(set), k, rng)) {
        children.push_back(grow(std::move(block), depth + 1));
      }
    }
    return builder.Internal(levels[depth], std::move(children));
  };
  std::vector<PointId> all(spec.n);
  std::iota(all.begin(), all.end(), 0);
  return builder.Build(grow(std::move(all), 0));
}

// Random recursive tree over the points with alphabet edge weights; the
// distance is the path length.
DenseMatrix PlantedTreeMetric(PointId n, const std::vector<Fixed>& alphabet,
                              Rng& rng) {
  std::vector<std::vector<std::pair<PointId, Fixed>>> adj(n);
  for (PointId i = 1; i < n; ++i) {
    PointId parent = static_cast<PointId>(rng.Below(static_cast<uint64_t>(i)));
    Fixed w = alphabet[rng.Below(alphabet.size())];
    adj[i].emplace_back(parent, w);
    adj[parent].emplace_back(i, w);
  }
  DenseMatrix d(n);
  std::vector<Fixed> dist(n);
  std::vector<PointId> stack;
  std::vector<bool> seen(n);
  for (PointId s = 0; s < n; ++s) {
    std::fill(seen.begin(), seen.end(), false);
    dist[s] = Fixed();
    seen[s] = true;
    stack.assign(1, s);
    while (!stack.empty()) {
      PointId x = stack.back();
      stack.pop_back();
      for (auto [y, w] : adj[x]) {
        if (seen[y]) continue;
        seen[y] = true;
        dist[y] = dist[x] + w;
        stack.push_back(y);
      }
    }
    for (PointId t = s + 1; t < n; ++t) d.set(s, t, dist[t]);
  }
  return d;
}

std::vector<std::pair<PointId, PointId>> NoisyPairs(PointId n, int64_t k,
                                                    Rng& rng) {
  const size_t total = PairCount(n);
  std::vector<size_t> chosen;
  if (static_cast<size_t>(k) * 4 >= total) {
    std::vector<size_t> all(total);
    std::iota(all.begin(), all.end(), size_t{0});
    rng.Shuffle(all);
    chosen.assign(all.begin(), all.begin() + k);
  } else {
    std::unordered_set<size_t> taken;
    while (static_cast<int64_t>(chosen.size()) < k) {
      size_t idx = static_cast<size_t>(rng.Below(total));
      if (taken.insert(idx).second) chosen.push_back(idx);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<std::pair<PointId, PointId>> out;
  size_t next = 0;
  for (PointId u = 0; u < n && next < chosen.size(); ++u) {
    for (PointId v = u + 1; v < n && next < chosen.size(); ++v) {
      if (PairIndex(u, v, n) == chosen[next]) {
        out.emplace_back(u, v);
        ++next;
      }
    }
  }
  return out;
}

}  // namespace

std::string KindName(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kPlantedUltrametric:
      return "planted_ultrametric";
    case GeneratorKind::kPlantedTreeMetric:
      return "planted_tree_metric";
    case GeneratorKind::kTwoValued:
      return "two_valued";
    case GeneratorKind::kUniformRandom:
      return "uniform_random";
  }
  return "unknown";
}

std::optional<GeneratorKind> ParseKind(std::string_view name) {
  for (auto kind :
       {GeneratorKind::kPlantedUltrametric, GeneratorKind::kPlantedTreeMetric,
        GeneratorKind::kTwoValued, GeneratorKind::kUniformRandom}) {
    if (KindName(kind) == name) return kind;
  }
  return std::nullopt;
}

nlohmann::json GeneratorSpec::ToJson() const {
  std::vector<std::string> values;
  for (Fixed f : alphabet) values.push_back(f.ToString());
  return {{"kind", KindName(kind)}, {"n", n},         {"seed", seed},
          {"noise_k", noise_k},     {"alphabet", values}, {"depth", depth},
          {"groups", groups}};
}

GeneratorSpec GeneratorSpec::FromJson(const nlohmann::json& j) {
  GeneratorSpec spec;
  auto kind = ParseKind(j.at("kind").get<std::string>());
  if (!kind) throw ConfigError("unknown generator kind");
  spec.kind = *kind;
  spec.n = j.at("n").get<PointId>();
  spec.seed = j.value("seed", uint64_t{0});
  spec.noise_k = j.value("noise_k", int64_t{0});
  spec.depth = j.value("depth", 3);
  spec.groups = j.value("groups", 2);
  for (const auto& v : j.value("alphabet", nlohmann::json::array())) {
    auto f = Fixed::Parse(v.get<std::string>());
    if (!f) throw ConfigError("malformed alphabet value");
    spec.alphabet.push_back(*f);
  }
  return spec;
}

GeneratedInstance Generate(const GeneratorSpec& spec) {
  if (spec.n < 1) throw ConfigError("n must be positive");
  if (spec.noise_k < 0 ||
      static_cast<size_t>(spec.noise_k) > PairCount(spec.n)) {
    throw ConfigError("noise_k exceeds the number of pairs");
  }
  const std::vector<Fixed> alphabet = SortedAlphabet(spec);
  Rng rng(SubSeed(spec.seed, "generate"));
  GeneratedInstance out;
  switch (spec.kind) {
    case GeneratorKind::kPlantedUltrametric:
      out.ultrametric_truth = PlantedUltrametric(spec, alphabet, rng);
      out.clean = out.ultrametric_truth->ToMatrix();
      break;
    case GeneratorKind::kPlantedTreeMetric: {
      out.clean = PlantedTreeMetric(spec.n, alphabet, rng);
      PivotData pivot = PivotData::FromMatrix(out.clean, 0);
      DenseMatrix shifted(spec.n);
      for (PointId u = 0; u < spec.n; ++u) {
        for (PointId v = u + 1; v < spec.n; ++v) {
          shifted.set(u, v, out.clean.at(u, v) + CentroidValue(pivot, u, v));
        }
      }
      out.tree_truth.emplace(SubdominantUltrametric(shifted), std::move(pivot));
      break;
    }
    case GeneratorKind::kTwoValued: {
      if (alphabet.size() != 2) {
        throw ConfigError("two_valued needs exactly two values");
      }
      const int groups = std::clamp(spec.groups, 1, spec.n);
      std::vector<PointId> all(spec.n);
      std::iota(all.begin(), all.end(), 0);
      TreeBuilder builder(spec.n);
      std::vector<int> children;
      if (spec.n == 1) {
        out.ultrametric_truth = builder.Build(0);
        out.clean = out.ultrametric_truth->ToMatrix();
        break;
      }
      for (auto& block : RandomBlocks(all, static_cast<size_t>(groups), rng)) {
        if (block.size() == 1) {
          children.push_back(block[0]);
          continue;
        }
        std::vector<int> leaves(block.begin(), block.end());
        children.push_back(builder.Internal(alphabet[0], std::move(leaves)));
      }
      int root = children.size() == 1
                     ? children[0]
                     : builder.Internal(alphabet[1], std::move(children));
      out.ultrametric_truth = builder.Build(root);
      out.clean = out.ultrametric_truth->ToMatrix();
      break;
    }
    case GeneratorKind::kUniformRandom:
      out.clean = DenseMatrix(spec.n);
      for (PointId u = 0; u < spec.n; ++u) {
        for (PointId v = u + 1; v < spec.n; ++v) {
          out.clean.set(u, v, alphabet[rng.Below(alphabet.size())]);
        }
      }
      break;
  }
  DenseMatrix noisy = out.clean;
  if (spec.noise_k > 0) {
    Rng noise_rng(SubSeed(spec.seed, "noise"));
    out.noisy_pairs = NoisyPairs(spec.n, spec.noise_k, noise_rng);
    for (auto [u, v] : out.noisy_pairs) {
      std::vector<Fixed> options;
      for (Fixed f : alphabet) {
        if (f != noisy.at(u, v)) options.push_back(f);
      }
      if (options.empty()) throw ConfigError("noise needs a second alphabet value");
      noisy.set(u, v, options[noise_rng.Below(options.size())]);
    }
  }
  out.matrix = std::make_shared<const DenseMatrix>(std::move(noisy));
  return out;
}

}  // namespace streamfit
