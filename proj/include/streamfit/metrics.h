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

#ifndef STREAMFIT_METRICS_H_
#define STREAMFIT_METRICS_H_

#include <cstdint>

#include "json.hpp"
#include "streamfit/fixed.h"
#include "streamfit/matrix.h"
#include "streamfit/stream.h"
#include "streamfit/tree_metric.h"
#include "streamfit/ultrametric_tree.h"

namespace streamfit {

// Both throw DomainError on an incomplete matrix.
bool IsUltrametric(const DenseMatrix& d);
bool FourPointCheck(const DenseMatrix& d);

struct CostReport {
  int64_t pairs = 0;
  int64_t l0 = 0;
  Fixed l1;
  Fixed linf;
  // Smallest and largest gap between distinct observed distances; both 0
  // when fewer than two distinct values occur.
  Fixed gap_delta;
  Fixed gap_Delta;

  nlohmann::json ToJson() const;
  bool operator==(const CostReport&) const = default;
};

enum class Norm { kL0, kL1, kLinf };

// Headline value of a report for one norm, as text.
std::string CostValue(const CostReport& report, Norm norm);

// One pass over source. Throws StreamIntegrityError on a missing or
// duplicated pair.
CostReport Cost(const UltrametricTree& t, StreamSource& source);
CostReport Cost(const TreeMetricRep& t, StreamSource& source);

// The same statistics for two in-memory matrices; gaps come from d.
CostReport CostAgainst(const DenseMatrix& fitted, const DenseMatrix& d);

}  // namespace streamfit

#endif  // STREAMFIT_METRICS_H_
