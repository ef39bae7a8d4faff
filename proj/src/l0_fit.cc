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

#include "streamfit/l0_fit.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "streamfit/errors.h"

namespace streamfit {
namespace {

class Recursion {
 public:
  Recursion(const SketchPool& pool, const AgreementParams& params,
            int participation_cap, L0FitReport& report)
      : pool_(pool),
        params_(params),
        compressed_(pool.BuildCompressedSet()),
        cursor_(pool.n(), pool.config().instance_count, pool.config().exact),
        participation_(pool.n(), 0),
        cap_(participation_cap),
        report_(report),
        builder_(pool.n()) {}

  UltrametricTree Run() {
    std::vector<PointId> all(pool_.n());
    for (PointId p = 0; p < pool_.n(); ++p) all[p] = p;
    int root = Rec(std::move(all), pool_.max_weight(), 0);
    report_.compressed_set_size = static_cast<int64_t>(compressed_.size());
    report_.instances_consumed = cursor_.max_cursor();
    for (int count : participation_) {
      report_.max_participation = std::max(report_.max_participation, count);
      if (count > cap_) ++report_.participation_violations;
    }
    return builder_.Build(root);
  }

 private:
  int Rec(std::vector<PointId> s, Fixed w, int instance) {
    ++report_.recursive_calls;
    for (PointId p : s) ++participation_[p];
    if (s.size() == 1) return builder_.Leaf(s[0]);

    const double size = static_cast<double>(s.size());
    const Fixed wc = compressed_.Predecessor(w);
    Clustering clustering;
    int next = instance;
    if (wc == Fixed()) {
      // E_0 is empty.
      for (PointId p : s) clustering.clusters.push_back({p});
    } else {
      clustering = SStructuralClustering(pool_, s, wc, instance, params_,
                                         &cursor_, &report_.cluster_stats);
      ++report_.clustering_calls;
      next = instance + 1;
    }

    std::vector<int> children;
    const std::vector<PointId>* big = nullptr;
    for (const auto& c : clustering.clusters) {
      if (static_cast<double>(c.size()) > 0.99 * size) {
        big = &c;
        continue;
      }
      children.push_back(Rec(c, wc, next));
    }
    if (big != nullptr) children.push_back(Peel(*big, size, wc, instance, next));
    return builder_.Internal(w, std::move(children));
  }

  // The large-cluster loop: repeatedly split off vertices whose degree
  // drops one level further down.
  int Peel(std::vector<PointId> c, double size, Fixed w1, int instance,
           int next) {
    Fixed w2 = compressed_.Predecessor(w1);
    std::vector<std::pair<Fixed, int>> chain;
    for (;;) {
      if (!(static_cast<double>(c.size()) > 0.99 * size)) break;
      std::vector<double> est(c.size());
      int64_t high = 0;
      for (size_t i = 0; i < c.size(); ++i) {
        est[i] = pool_.EstimateDegree(c[i], w2, instance);
        high += est[i] > 0.66 * size;
      }
      if (!(static_cast<double>(high) > 0.99 * size)) break;
      std::vector<PointId> r, rest;
      for (size_t i = 0; i < c.size(); ++i) {
        (est[i] < 0.65 * size ? r : rest).push_back(c[i]);
      }
      ++report_.peel_iterations;
      chain.emplace_back(w1, r.empty() ? -1 : Rec(std::move(r), w1, next));
      c = std::move(rest);
      w1 = compressed_.Predecessor(w1);
      w2 = compressed_.Predecessor(w2);
    }
    int tail = Rec(std::move(c), w1, next);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      std::vector<int> kids;
      if (it->second >= 0) kids.push_back(it->second);
      kids.push_back(tail);
      tail = builder_.Internal(it->first, std::move(kids));
    }
    return tail;
  }

  const SketchPool& pool_;
  AgreementParams params_;
  CompressedSet compressed_;
  InstanceCursor cursor_;
  std::vector<int> participation_;
  int cap_;
  L0FitReport& report_;
  TreeBuilder builder_;
};

}  // namespace

nlohmann::json L0FitReport::ToJson() const {
  return {{"recursive_calls", recursive_calls},
          {"clustering_calls", clustering_calls},
          {"peel_iterations", peel_iterations},
          {"max_participation", max_participation},
          {"participation_cap", participation_cap},
          {"participation_violations", participation_violations},
          {"instances_consumed", instances_consumed},
          {"memory_peak_words", memory_peak_words},
          {"compressed_set_size", compressed_set_size},
          {"cluster_stats", cluster_stats.ToJson()}};
}

L0Fitter::L0Fitter(PointId n, const SketchConfig& config,
                   const AgreementParams& params, const L0FitOptions& options)
    : n_(n),
      params_(params),
      options_(options),
      pool_(std::make_unique<SketchPool>(n, config, &meter_)),
      tracker_(n) {
  params_.Validate();
  if (options_.depth_cap < 1) throw ConfigError("depth_cap must be >= 1");
}

void L0Fitter::Ingest(const DistanceEntry& e) {
  tracker_.Mark(e.u, e.v);
  pool_->Ingest(e);
}

L0FitResult L0Fitter::Finish() {
  tracker_.RequireComplete();
  pool_->Finalize();
  L0FitReport report;
  report.memory_peak_words = meter_.peak();
  const int log_n =
      n_ > 1 ? static_cast<int>(std::ceil(std::log2(static_cast<double>(n_))))
             : 0;
  report.participation_cap = options_.depth_cap * std::max(1, log_n);
  Recursion rec(*pool_, params_, report.participation_cap, report);
  UltrametricTree tree = rec.Run();
  return L0FitResult{std::move(tree), report};
}

L0FitResult FitL0(StreamSource& source, const SketchConfig& config,
                  const AgreementParams& params, const L0FitOptions& options) {
  L0Fitter fitter(source.n(), config, params, options);
  source.Replay([&](const DistanceEntry& e) { fitter.Ingest(e); });
  return fitter.Finish();
}

}  // namespace streamfit
