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

#include "streamfit/metrics.h"

#include <algorithm>
#include <string>
#include <vector>

#include "streamfit/errors.h"
#include "streamfit/kernels.h"

namespace streamfit {
namespace {

void FillGaps(std::vector<Fixed> values, CostReport& report) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() < 2) return;
  report.gap_Delta = values.back() - values.front();
  report.gap_delta = values[1] - values[0];
  for (size_t i = 2; i < values.size(); ++i) {
    report.gap_delta = std::min(report.gap_delta, values[i] - values[i - 1]);
  }
}

template <typename Tree>
CostReport StreamCost(const Tree& t, StreamSource& source) {
  if (t.num_points() != source.n()) {
    throw DomainError("tree and stream have different point counts");
  }
  CostReport report;
  PairTracker tracker(source.n());
  std::vector<Fixed> seen;
  int64_t l1 = 0;
  source.Replay([&](const DistanceEntry& e) {
    tracker.Mark(e.u, e.v);
    seen.push_back(e.d);
    Fixed diff = Abs(t.Distance(e.u, e.v) - e.d);
    ++report.pairs;
    if (diff == Fixed()) return;
    ++report.l0;
    if (__builtin_add_overflow(l1, diff.raw(), &l1)) {
      throw DomainError("l1 sum overflows the fixed-point range");
    }
    report.linf = std::max(report.linf, diff);
  });
  tracker.RequireComplete();
  report.l1 = Fixed::FromRaw(l1);
  FillGaps(std::move(seen), report);
  return report;
}

}  // namespace

bool IsUltrametric(const DenseMatrix& d) {
  return kernels::UltrametricParallel(d);
}

bool FourPointCheck(const DenseMatrix& d) {
  return kernels::FourPointParallel(d);
}

nlohmann::json CostReport::ToJson() const {
  return {{"pairs", pairs},
          {"l0", l0},
          {"l1", l1.ToString()},
          {"linf", linf.ToString()},
          {"gap_delta", gap_delta.ToString()},
          {"gap_Delta", gap_Delta.ToString()}};
}

std::string CostValue(const CostReport& report, Norm norm) {
  switch (norm) {
    case Norm::kL0:
      return std::to_string(report.l0);
    case Norm::kL1:
      return report.l1.ToString();
    case Norm::kLinf:
      return report.linf.ToString();
  }
  return {};
}

CostReport Cost(const UltrametricTree& t, StreamSource& source) {
  return StreamCost(t, source);
}

CostReport Cost(const TreeMetricRep& t, StreamSource& source) {
  return StreamCost(t, source);
}

CostReport CostAgainst(const DenseMatrix& fitted, const DenseMatrix& d) {
  kernels::DiffStats diff = kernels::DiffParallel(fitted, d);
  CostReport report;
  report.pairs = static_cast<int64_t>(PairCount(d.n()));
  report.l0 = diff.l0;
  report.l1 = diff.l1;
  report.linf = diff.linf;
  FillGaps(d.DistinctValues(), report);
  return report;
}

}  // namespace streamfit
