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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <memory>

#include "streamfit/generators.h"
#include "streamfit/kernels.h"
#include "streamfit/linf_fit.h"
#include "streamfit/tree_metric.h"

namespace sf = streamfit;

namespace {

std::shared_ptr<const sf::DenseMatrix> Instance(sf::PointId n) {
  sf::GeneratorSpec spec;
  spec.kind = sf::GeneratorKind::kUniformRandom;
  spec.n = n;
  spec.seed = 7;
  return sf::Generate(spec).matrix;
}

sf::DenseMatrix Ultrametric(sf::PointId n) {
  sf::GeneratorSpec spec;
  spec.kind = sf::GeneratorKind::kPlantedUltrametric;
  spec.n = n;
  spec.seed = 7;
  return *sf::Generate(spec).matrix;
}

template <sf::DenseMatrix (*Kernel)(const sf::DenseMatrix&)>
void BM_Minimax(benchmark::State& state) {
  auto d = Instance(static_cast<sf::PointId>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(*d));
}

template <bool (*Kernel)(const sf::DenseMatrix&)>
void BM_Ultrametric(benchmark::State& state) {
  sf::DenseMatrix d = Ultrametric(static_cast<sf::PointId>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(d));
}

template <bool (*Kernel)(const sf::DenseMatrix&)>
void BM_FourPoint(benchmark::State& state) {
  sf::DenseMatrix d = Ultrametric(static_cast<sf::PointId>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(d));
}

template <sf::kernels::DiffStats (*Kernel)(const sf::DenseMatrix&,
                                           const sf::DenseMatrix&)>
void BM_Diff(benchmark::State& state) {
  const auto n = static_cast<sf::PointId>(state.range(0));
  auto a = Instance(n);
  sf::DenseMatrix b = Ultrametric(n);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(*a, b));
}

template <int64_t (*Kernel)(const sf::TreeMetricRep&, const sf::TreeMetricRep&)>
void BM_TreeL0(benchmark::State& state) {
  const auto n = static_cast<sf::PointId>(state.range(0));
  auto d = Instance(n);
  sf::TreeMetricRep x(sf::SubdominantUltrametric(*d),
                      sf::PivotData::FromMatrix(*d, 0));
  sf::TreeMetricRep y(sf::SubdominantUltrametric(*d),
                      sf::PivotData::FromMatrix(*d, 1));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, y));
}

}  // namespace

BENCHMARK(BM_Minimax<sf::kernels::MinimaxSerial>)->Arg(128)->Arg(256);
BENCHMARK(BM_Minimax<sf::kernels::MinimaxParallel>)->Arg(128)->Arg(256);
BENCHMARK(BM_Ultrametric<sf::kernels::UltrametricSerial>)->Arg(128)->Arg(256);
BENCHMARK(BM_Ultrametric<sf::kernels::UltrametricParallel>)->Arg(128)->Arg(256);
BENCHMARK(BM_FourPoint<sf::kernels::FourPointSerial>)->Arg(32)->Arg(64);
BENCHMARK(BM_FourPoint<sf::kernels::FourPointParallel>)->Arg(32)->Arg(64);
BENCHMARK(BM_Diff<sf::kernels::DiffSerial>)->Arg(1024)->Arg(2048);
BENCHMARK(BM_Diff<sf::kernels::DiffParallel>)->Arg(1024)->Arg(2048);
BENCHMARK(BM_TreeL0<sf::kernels::TreeL0Serial>)->Arg(512)->Arg(1024);
BENCHMARK(BM_TreeL0<sf::kernels::TreeL0Parallel>)->Arg(512)->Arg(1024);

BENCHMARK_MAIN();
