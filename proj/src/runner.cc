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

#include "streamfit/runner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "streamfit/errors.h"
#include "streamfit/l0_fit.h"
#include "streamfit/linf_fit.h"
#include "streamfit/metrics.h"
#include "streamfit/oracles.h"
#include "streamfit/seeds.h"
#include "streamfit/tree_fit.h"

namespace streamfit {
namespace {

template <typename E>
std::optional<E> Lookup(std::string_view s,
                        std::initializer_list<std::pair<std::string_view, E>> table) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

// "0" when both vanish, "inf" when only the optimum does.
std::string RatioText(int64_t cost, int64_t optimum) {
  if (optimum == 0) return cost == 0 ? "0" : "inf";
  std::ostringstream out;
  out << static_cast<double>(cost) / static_cast<double>(optimum);
  return out.str();
}

}  // namespace

std::optional<Structure> ParseStructure(std::string_view s) {
  return Lookup<Structure>(s, {{"ultrametric", Structure::kUltrametric},
                               {"tree", Structure::kTree}});
}

std::optional<Objective> ParseObjective(std::string_view s) {
  return Lookup<Objective>(s, {{"l0", Objective::kL0},
                               {"l1-report", Objective::kL1Report},
                               {"linf", Objective::kLinf}});
}

std::optional<SketchMode> ParseSketchMode(std::string_view s) {
  return Lookup<SketchMode>(s, {{"exact", SketchMode::kExact},
                                {"sketch", SketchMode::kSketch},
                                {"asymptotic", SketchMode::kAsymptotic}});
}

std::string Name(Structure s) {
  return s == Structure::kUltrametric ? "ultrametric" : "tree";
}

std::string Name(Objective o) {
  switch (o) {
    case Objective::kL0:
      return "l0";
    case Objective::kL1Report:
      return "l1-report";
    case Objective::kLinf:
      return "linf";
  }
  return "";
}

std::string Name(SketchMode m) {
  switch (m) {
    case SketchMode::kExact:
      return "exact";
    case SketchMode::kSketch:
      return "sketch";
    case SketchMode::kAsymptotic:
      return "asymptotic";
  }
  return "";
}

int FitConfig::ResolvedPasses() const {
  if (structure == Structure::kTree) {
    if (objective == Objective::kL1Report) {
      throw UsageError("tree fitting supports --objective l0 or linf");
    }
    if (passes != 0 && passes != 2) {
      throw UsageError("tree fitting requires --passes 2");
    }
    return 2;
  }
  if (objective == Objective::kLinf) {
    if (passes != 0 && passes != 1 && passes != 2) {
      throw UsageError("l-inf ultrametric fitting takes --passes 1 or 2");
    }
    return passes == 0 ? 2 : passes;
  }
  if (passes != 0 && passes != 1) {
    throw UsageError("l0 ultrametric fitting requires --passes 1");
  }
  return 1;
}

SketchConfig FitConfig::Sketch(PointId n) const {
  SketchConfig c;
  switch (mode) {
    case SketchMode::kExact:
      c = SketchConfig::Exact(n, seed);
      break;
    case SketchMode::kSketch:
      c = SketchConfig::Scaled(n, seed);
      break;
    case SketchMode::kAsymptotic:
      c = SketchConfig::Asymptotic(n, seed);
      break;
  }
  if (overrides.close_capacity) c.close_capacity = *overrides.close_capacity;
  if (overrides.sample_factor) c.sample_factor = *overrides.sample_factor;
  if (overrides.min_size) c.min_size = *overrides.min_size;
  if (overrides.zeta) c.zeta = *overrides.zeta;
  if (overrides.lambda) c.lambda = *overrides.lambda;
  if (overrides.instance_count) c.instance_count = *overrides.instance_count;
  c.Validate();
  return c;
}

nlohmann::json FitConfig::ToJson() const {
  nlohmann::json j = {{"structure", Name(structure)},
                      {"objective", Name(objective)},
                      {"passes", ResolvedPasses()},
                      {"seed", seed},
                      {"mode", Name(mode)},
                      {"epsilon", epsilon},
                      {"depth_cap", depth_cap},
                      {"pivot_count", pivot_count},
                      {"evaluate", evaluate}};
  if (pivot) j["pivot"] = *pivot;
  return j;
}

nlohmann::json FitOutcome::TreeJson() const {
  if (tree) return tree->ToJson();
  return ultrametric->ToJson();
}

std::string FitOutcome::Newick() const {
  if (tree) return tree->base().ToNewick();
  return ultrametric->ToNewick();
}

FitOutcome RunFit(StreamSource& source, const FitConfig& config) {
  const int passes = config.ResolvedPasses();
  const PointId n = source.n();
  AgreementParams params;
  params.epsilon = config.epsilon;
  params.Validate();
  L0FitOptions fit_options;
  fit_options.depth_cap = config.depth_cap;

  FitOutcome out;
  nlohmann::json result;
  const bool sketched = config.objective != Objective::kLinf;
  if (config.structure == Structure::kUltrametric) {
    if (config.objective == Objective::kLinf) {
      if (passes == 1) {
        out.ultrametric = FitLinfMinDecrement(source);
      } else {
        LinfExactResult r = FitLinfExact(source);
        result = {{"c_bar", r.c_bar.ToString()},
                  {"optimal_cost", r.optimal_cost.ToString()},
                  {"certificate", {r.cert_u, r.cert_v}}};
        out.ultrametric = std::move(r.tree);
      }
    } else {
      L0FitResult r = FitL0(source, config.Sketch(n), params, fit_options);
      result = r.report.ToJson();
      out.ultrametric = std::move(r.tree);
    }
  } else if (config.objective == Objective::kLinf) {
    LinfTreeResult r = FitLinfTree(source, config.pivot);
    result = {{"pivot", r.tree.pivot().a}};
    out.tree = std::move(r.tree);
  } else {
    L0TreeOptions tree_options;
    tree_options.pivot_count = config.pivot_count;
    tree_options.fit = fit_options;
    L0TreeResult r = FitL0Tree(source, config.Sketch(n), params, tree_options);
    result = r.ReportJson();
    out.tree = std::move(r.tree);
  }
  const int fit_passes = source.pass_count();

  nlohmann::json report = {{"schema_version", kReportSchemaVersion},
                           {"command", "fit"},
                           {"n", n},
                           {"seed", config.seed},
                           {"config", config.ToJson()},
                           {"fit_passes", fit_passes},
                           {"result", std::move(result)}};
  if (sketched) report["sketch"] = config.Sketch(n).ToJson();
  if (config.evaluate) {
    CostReport cost = out.tree ? Cost(*out.tree, source)
                               : Cost(*out.ultrametric, source);
    report["cost"] = cost.ToJson();
    if (config.objective == Objective::kL1Report && cost.gap_delta > Fixed()) {
      report["l1_bound_factor"] =
          cost.gap_Delta.ToDouble() / cost.gap_delta.ToDouble();
    }
  }
  out.report = std::move(report);
  return out;
}

std::string RenderJson(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void RunBench(const BenchConfig& config, std::ostream& csv) {
  csv << "kind,n,seed,noise_k,structure,objective,mode,passes,l0,l1,linf,"
         "oracle_l0,ratio_l0,memory_peak_words,memory_per_nlog4n,"
         "memory_over_n2,elapsed_ms\n";
  for (GeneratorKind kind : config.kinds) {
    for (PointId n : config.sizes) {
      for (int s = 0; s < config.seeds; ++s) {
        GeneratorSpec spec;
        spec.kind = kind;
        spec.n = n;
        spec.seed = config.base_seed + static_cast<uint64_t>(s);
        spec.noise_k = config.noise_k;
        GeneratedInstance inst = Generate(spec);
        std::optional<int64_t> oracle;
        if (n <= config.oracle_max_n) {
          OracleBudget budget;
          budget.max_n_l0 = config.oracle_max_n;
          oracle = BruteL0Ultra(*inst.matrix, budget).cost;
        }
        for (const auto& [structure, objective] : config.fits) {
          FitConfig fc;
          fc.structure = structure;
          fc.objective = objective;
          fc.seed = spec.seed;
          fc.mode = config.mode;
          MatrixStream stream(inst.matrix, StreamOrder::kFixedPermutation,
                              SubSeed(spec.seed, "stream"));
          auto start = std::chrono::steady_clock::now();
          FitOutcome out = RunFit(stream, fc);
          auto elapsed = std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - start);
          const auto& cost = out.report.at("cost");
          const auto& result = out.report.at("result");
          int64_t peak = -1;
          if (result.contains("memory_peak_words")) {
            peak = result.at("memory_peak_words").get<int64_t>();
          } else if (result.contains("fits")) {
            peak = 0;
            for (const auto& f : result.at("fits")) {
              peak += f.at("memory_peak_words").get<int64_t>();
            }
          }
          csv << KindName(kind) << ',' << n << ',' << spec.seed << ','
              << spec.noise_k << ',' << Name(structure) << ','
              << Name(objective) << ',' << Name(config.mode) << ','
              << out.report.at("fit_passes").get<int>() << ','
              << cost.at("l0").get<int64_t>() << ','
              << cost.at("l1").get<std::string>() << ','
              << cost.at("linf").get<std::string>() << ',';
          const bool ultra = structure == Structure::kUltrametric;
          if (oracle && ultra) {
            csv << *oracle << ','
                << RatioText(cost.at("l0").get<int64_t>(), *oracle);
          } else {
            csv << ',';
          }
          csv << ',';
          if (peak >= 0) {
            const double l = std::log2(static_cast<double>(std::max<PointId>(n, 2)));
            csv << peak << ',' << peak / (n * std::pow(l, 4)) << ','
                << peak / (static_cast<double>(n) * n);
          } else {
            csv << ",,";
          }
          csv << ',';
          if (config.timings) csv << elapsed.count();
          csv << '\n';
        }
      }
    }
  }
}

}  // namespace streamfit
