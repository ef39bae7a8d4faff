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

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "streamfit/errors.h"
#include "streamfit/generators.h"
#include "streamfit/metrics.h"
#include "streamfit/oracles.h"
#include "streamfit/runner.h"
#include "streamfit/stream.h"
#include "streamfit/tree_metric.h"
#include "streamfit/ultrametric_tree.h"

namespace sf = streamfit;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIntegrity = 3;
constexpr int kExitOracleUnavailable = 4;

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sf::Error("cannot write " + path);
  out << text;
}

nlohmann::json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sf::Error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw sf::ParseError(0, path + ": " + e.what());
  }
}

std::vector<sf::Fixed> ParseAlphabet(const std::string& text) {
  std::vector<sf::Fixed> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    auto v = sf::Fixed::Parse(token);
    if (!v || *v <= sf::Fixed()) {
      throw sf::UsageError("bad alphabet value '" + token + "'");
    }
    out.push_back(*v);
  }
  return out;
}

sf::DenseMatrix LoadMatrix(const std::string& path) {
  sf::FileStream stream(path);
  return sf::CollectMatrix(stream);
}

struct GenArgs {
  std::string kind = "planted_ultrametric";
  sf::PointId n = 8;
  uint64_t seed = 0;
  int64_t noise = 0;
  std::string alphabet;
  int depth = 3;
  int groups = 2;
  std::string out = "-";
  std::string truth;
  std::string spec_out;
};

int RunGen(const GenArgs& a) {
  sf::GeneratorSpec spec;
  auto kind = sf::ParseKind(a.kind);
  if (!kind) throw sf::UsageError("unknown generator kind '" + a.kind + "'");
  spec.kind = *kind;
  spec.n = a.n;
  spec.seed = a.seed;
  spec.noise_k = a.noise;
  spec.depth = a.depth;
  spec.groups = a.groups;
  if (!a.alphabet.empty()) spec.alphabet = ParseAlphabet(a.alphabet);
  sf::GeneratedInstance inst = sf::Generate(spec);
  WriteText(a.out, sf::FormatInstance(*inst.matrix));
  if (!a.truth.empty()) {
    nlohmann::json truth = inst.tree_truth ? inst.tree_truth->ToJson()
                                           : inst.ultrametric_truth->ToJson();
    WriteText(a.truth, sf::RenderJson(truth));
  }
  if (!a.spec_out.empty()) WriteText(a.spec_out, sf::RenderJson(spec.ToJson()));
  return 0;
}

struct FitArgs {
  std::string input;
  std::string structure = "ultrametric";
  std::string objective = "l0";
  std::string mode = "exact";
  sf::FitConfig config;
  std::optional<int64_t> close;
  std::optional<double> sigma, min_size, zeta, lambda;
  std::optional<int> instances, pivot;
  bool no_evaluate = false;
  std::string out;
  std::string newick;
  std::string report = "-";
};

int RunFitCommand(FitArgs& a) {
  sf::FitConfig& c = a.config;
  auto structure = sf::ParseStructure(a.structure);
  auto objective = sf::ParseObjective(a.objective);
  auto mode = sf::ParseSketchMode(a.mode);
  if (!structure) throw sf::UsageError("unknown structure '" + a.structure + "'");
  if (!objective) throw sf::UsageError("unknown objective '" + a.objective + "'");
  if (!mode) throw sf::UsageError("unknown mode '" + a.mode + "'");
  c.structure = *structure;
  c.objective = *objective;
  c.mode = *mode;
  c.overrides = {a.close, a.sigma, a.min_size, a.zeta, a.lambda, a.instances};
  if (a.pivot) c.pivot = *a.pivot;
  c.evaluate = !a.no_evaluate;
  c.ResolvedPasses();  // reject bad combinations before reading input

  sf::FileStream stream(a.input);
  sf::FitOutcome outcome = sf::RunFit(stream, c);
  if (!a.out.empty()) WriteText(a.out, sf::RenderJson(outcome.TreeJson()));
  if (!a.newick.empty()) WriteText(a.newick, outcome.Newick() + "\n");
  WriteText(a.report, sf::RenderJson(outcome.report));
  return 0;
}

int RunCost(const std::string& input, const std::string& tree_path,
            const std::string& p, bool json) {
  sf::Norm norm;
  if (p == "0") {
    norm = sf::Norm::kL0;
  } else if (p == "1") {
    norm = sf::Norm::kL1;
  } else if (p == "inf") {
    norm = sf::Norm::kLinf;
  } else {
    throw sf::UsageError("--p must be 0, 1 or inf");
  }
  nlohmann::json tree = ReadJson(tree_path);
  sf::FileStream stream(input);
  sf::CostReport report;
  const std::string type = tree.value("type", "ultrametric");
  if (type == "tree_metric") {
    report = sf::Cost(sf::TreeMetricRep::FromJson(tree), stream);
  } else if (type == "ultrametric") {
    report = sf::Cost(sf::UltrametricTree::FromJson(tree), stream);
  } else {
    throw sf::UsageError("unknown tree type '" + type + "'");
  }
  if (json) {
    nlohmann::json j = {{"schema_version", sf::kReportSchemaVersion},
                        {"command", "cost"},
                        {"p", p},
                        {"value", sf::CostValue(report, norm)},
                        {"cost", report.ToJson()}};
    std::cout << sf::RenderJson(j);
  } else {
    std::cout << sf::CostValue(report, norm) << "\n";
  }
  return 0;
}

int RunCheck(const std::string& input) {
  sf::DenseMatrix d = LoadMatrix(input);
  std::cout << "ultrametric: " << (sf::IsUltrametric(d) ? "true" : "false")
            << "\n"
            << "four_point: " << (sf::FourPointCheck(d) ? "true" : "false")
            << "\n";
  return 0;
}

int RunOracle(const std::string& which, const std::string& input,
              const sf::OracleBudget& budget) {
  sf::DenseMatrix d = LoadMatrix(input);
  nlohmann::json j = {{"schema_version", sf::kReportSchemaVersion},
                      {"command", "oracle"},
                      {"oracle", which},
                      {"n", d.n()}};
  if (which == "l0") {
    auto r = sf::BruteL0Ultra(d, budget);
    j["cost"] = r.cost;
    j["witness"] = r.witness.ToJson();
  } else if (which == "l1") {
    auto r = sf::BruteL1Ultra(d, budget);
    j["cost"] = r.cost.ToString();
    j["witness"] = r.witness.ToJson();
  } else if (which == "correlation") {
    auto r = sf::BruteCorrelation(d, budget);
    j["cost"] = r.cost;
    j["labels"] = r.labels;
  } else if (which == "minimax") {
    auto r = sf::MinimaxCert(d);
    j["lower_bound"] = r.lower_bound.ToString();
    j["certificate"] = {r.u, r.v};
  } else {
    throw sf::UsageError("unknown oracle '" + which + "'");
  }
  std::cout << sf::RenderJson(j);
  return 0;
}

struct BenchArgs {
  std::vector<std::string> kinds{"planted_ultrametric"};
  std::vector<sf::PointId> sizes{16, 32};
  std::vector<std::string> fits{"ultrametric:l0"};
  std::string mode = "exact";
  int seeds = 3;
  uint64_t base_seed = 1;
  int64_t noise = 0;
  sf::PointId oracle_max_n = 7;
  bool no_timings = false;
  std::string out = "-";
};

int RunBenchCommand(const BenchArgs& a) {
  sf::BenchConfig c;
  c.kinds.clear();
  for (const auto& k : a.kinds) {
    auto kind = sf::ParseKind(k);
    if (!kind) throw sf::UsageError("unknown generator kind '" + k + "'");
    c.kinds.push_back(*kind);
  }
  c.fits.clear();
  for (const auto& f : a.fits) {
    auto colon = f.find(':');
    auto s = sf::ParseStructure(f.substr(0, colon));
    auto o = colon == std::string::npos ? std::nullopt
                                        : sf::ParseObjective(f.substr(colon + 1));
    if (!s || !o) throw sf::UsageError("--fits entries look like tree:l0");
    sf::FitConfig probe;
    probe.structure = *s;
    probe.objective = *o;
    probe.ResolvedPasses();
    c.fits.emplace_back(*s, *o);
  }
  auto mode = sf::ParseSketchMode(a.mode);
  if (!mode) throw sf::UsageError("unknown mode '" + a.mode + "'");
  c.mode = *mode;
  c.sizes = a.sizes;
  c.seeds = a.seeds;
  c.base_seed = a.base_seed;
  c.noise_k = a.noise;
  c.oracle_max_n = a.oracle_max_n;
  c.timings = !a.no_timings;
  std::ostringstream csv;
  sf::RunBench(c, csv);
  WriteText(a.out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit ultrametrics and tree metrics to streamed distances"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a synthetic instance");
  g->add_option("--kind", gen.kind,
                "planted_ultrametric | planted_tree_metric | two_valued | "
                "uniform_random");
  g->add_option("--n", gen.n)->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed);
  g->add_option("--noise", gen.noise, "Number of perturbed pairs");
  g->add_option("--alphabet", gen.alphabet, "Comma-separated values");
  g->add_option("--depth", gen.depth);
  g->add_option("--groups", gen.groups);
  g->add_option("--out", gen.out, "Instance file (default stdout)");
  g->add_option("--truth", gen.truth, "Ground-truth tree JSON");
  g->add_option("--spec-out", gen.spec_out, "Generator spec JSON");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit a tree to an instance file");
  f->add_option("--input", fit.input)->required();
  f->add_option("--structure", fit.structure, "ultrametric | tree");
  f->add_option("--objective", fit.objective, "l0 | l1-report | linf");
  f->add_option("--passes", fit.config.passes);
  f->add_option("--seed", fit.config.seed);
  f->add_option("--mode", fit.mode, "exact | sketch | asymptotic");
  f->add_option("--epsilon", fit.config.epsilon);
  f->add_option("--depth-cap", fit.config.depth_cap);
  f->add_option("--pivots", fit.config.pivot_count, "l0 tree pivot count");
  f->add_option("--pivot", fit.pivot, "l-inf tree pivot");
  f->add_option("--close", fit.close, "Close-neighbor queue capacity");
  f->add_option("--sigma", fit.sigma, "Expected sketch sample count");
  f->add_option("--min-size", fit.min_size, "Smallest ladder size");
  f->add_option("--zeta", fit.zeta);
  f->add_option("--lambda", fit.lambda);
  f->add_option("--instances", fit.instances, "Sketch instances per vertex");
  f->add_flag("--no-evaluate", fit.no_evaluate, "Skip the cost pass");
  f->add_option("--out", fit.out, "Tree JSON");
  f->add_option("--newick", fit.newick, "Newick file");
  f->add_option("--report", fit.report, "Run report JSON (default stdout)");

  std::string cost_input, cost_tree, cost_p = "0";
  bool cost_json = false;
  auto* c = app.add_subcommand("cost", "Evaluate a tree against an instance");
  c->add_option("--input", cost_input)->required();
  c->add_option("--tree", cost_tree)->required();
  c->add_option("--p", cost_p, "0 | 1 | inf");
  c->add_flag("--json", cost_json, "Print the full cost report");

  std::string check_input;
  auto* k = app.add_subcommand("check", "Ultrametric and four-point checks");
  k->add_option("--input", check_input)->required();

  std::string oracle_which, oracle_input;
  sf::OracleBudget budget;
  auto* o = app.add_subcommand("oracle", "Brute-force references");
  o->add_option("which", oracle_which, "l0 | l1 | correlation | minimax")
      ->required();
  o->add_option("--input", oracle_input)->required();
  o->add_option("--max-n", budget.max_n_l0, "Enumeration cap for l0/l1");
  o->add_option("--time-cap", budget.time_cap_seconds, "Seconds");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Batch runs as CSV");
  b->add_option("--kinds", bench.kinds)->delimiter(',');
  b->add_option("--sizes", bench.sizes)->delimiter(',');
  b->add_option("--fits", bench.fits, "structure:objective list")
      ->delimiter(',');
  b->add_option("--mode", bench.mode);
  b->add_option("--seeds", bench.seeds);
  b->add_option("--base-seed", bench.base_seed);
  b->add_option("--noise", bench.noise);
  b->add_option("--oracle-max-n", bench.oracle_max_n);
  b->add_flag("--no-timings", bench.no_timings,
              "Leave elapsed_ms empty for byte-stable output");
  b->add_option("--out", bench.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return RunGen(gen);
    if (*f) return RunFitCommand(fit);
    if (*c) return RunCost(cost_input, cost_tree, cost_p, cost_json);
    if (*k) return RunCheck(check_input);
    if (*o) {
      budget.max_n_cc = std::max(budget.max_n_cc, budget.max_n_l0);
      return RunOracle(oracle_which, oracle_input, budget);
    }
    if (*b) return RunBenchCommand(bench);
  } catch (const sf::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sf::StreamIntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const sf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const sf::OracleUnavailable& e) {
    std::cerr << "oracle unavailable: " << e.what() << "\n";
    return kExitOracleUnavailable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
