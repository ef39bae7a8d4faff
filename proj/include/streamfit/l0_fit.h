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

#ifndef STREAMFIT_L0_FIT_H_
#define STREAMFIT_L0_FIT_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "json.hpp"
#include "streamfit/agreement.h"
#include "streamfit/memory_meter.h"
#include "streamfit/sketch.h"
#include "streamfit/stream.h"
#include "streamfit/ultrametric_tree.h"

namespace streamfit {

struct L0FitOptions {
  // Participation cap factor: each vertex may take part in at most
  // depth_cap * max(1, ceil(log2 n)) recursive calls.
  int depth_cap = 8;
};

struct L0FitReport {
  int64_t recursive_calls = 0;
  int64_t clustering_calls = 0;
  int64_t peel_iterations = 0;
  int max_participation = 0;
  int participation_cap = 0;
  // Vertices whose participation exceeded the cap.
  int64_t participation_violations = 0;
  int instances_consumed = 0;
  int64_t memory_peak_words = 0;
  int64_t compressed_set_size = 0;
  ClusterStats cluster_stats;

  nlohmann::json ToJson() const;
};

struct L0FitResult {
  UltrametricTree tree;
  L0FitReport report;
};

// Streaming phase plus the divisive recursion. Feed every entry through
// Ingest, then call Finish once.
class L0Fitter {
 public:
  L0Fitter(PointId n, const SketchConfig& config,
           const AgreementParams& params, const L0FitOptions& options = {});

  void Ingest(const DistanceEntry& e);
  // Throws StreamIntegrityError if a pair is missing.
  L0FitResult Finish();

  const SketchPool& pool() const { return *pool_; }

 private:
  PointId n_;
  AgreementParams params_;
  L0FitOptions options_;
  MemoryMeter meter_;
  std::unique_ptr<SketchPool> pool_;
  PairTracker tracker_;
};

// One pass over source.
L0FitResult FitL0(StreamSource& source, const SketchConfig& config,
                  const AgreementParams& params,
                  const L0FitOptions& options = {});

}  // namespace streamfit

#endif  // STREAMFIT_L0_FIT_H_
