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

#ifndef STREAMFIT_ORACLES_H_
#define STREAMFIT_ORACLES_H_

#include <cstdint>
#include <vector>

#include "streamfit/errors.h"
#include "streamfit/matrix.h"
#include "streamfit/ultrametric_tree.h"

namespace streamfit {

// Raised when an instance is beyond what an oracle can enumerate. Tests
// that catch it must skip, never pass.
class OracleUnavailable : public Error {
 public:
  using Error::Error;
};

struct OracleBudget {
  PointId max_n_l0 = 7;
  PointId max_n_cc = 9;
  double time_cap_seconds = 30.0;
};

struct BruteL0Result {
  int64_t cost = 0;
  UltrametricTree witness;
};

struct BruteL1Result {
  Fixed cost;
  UltrametricTree witness;
};

// Exact minimum over ultrametric trees whose levels are values of d.
BruteL0Result BruteL0Ultra(const DenseMatrix& d, const OracleBudget& budget = {});
BruteL1Result BruteL1Ultra(const DenseMatrix& d, const OracleBudget& budget = {});

struct CorrelationResult {
  int64_t cost = 0;
  // Cluster label per point, labels in first-occurrence order.
  std::vector<int> labels;
};

// Minimum disagreements over all partitions. The smaller of the (at most
// two) distinct values means "similar". Throws DomainError on more values.
CorrelationResult BruteCorrelation(const DenseMatrix& d,
                                   const OracleBudget& budget = {});

struct MinimaxCertificate {
  DenseMatrix minimax;
  // max over pairs of (d - minimax) / 2.
  Fixed lower_bound;
  PointId u = 0;
  PointId v = 0;
};

// All-pairs bottleneck values by relaxation; n <= 256.
MinimaxCertificate MinimaxCert(const DenseMatrix& d);

}  // namespace streamfit

#endif  // STREAMFIT_ORACLES_H_
