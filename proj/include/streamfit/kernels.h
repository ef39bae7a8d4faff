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

#ifndef STREAMFIT_KERNELS_H_
#define STREAMFIT_KERNELS_H_

#include <cstdint>

#include "streamfit/fixed.h"
#include "streamfit/matrix.h"
#include "streamfit/tree_metric.h"

// Quadratic and cubic dense kernels. Each has a plain serial reference and
// an OpenMP version; tests check that the two agree exactly and the bench
// target compares their speed.
namespace streamfit::kernels {

struct DiffStats {
  int64_t l0 = 0;
  Fixed l1;
  Fixed linf;

  bool operator==(const DiffStats&) const = default;
};

// Entrywise |a - b| statistics over all off-diagonal pairs. Both matrices
// must be complete and of equal size. Throws DomainError if l1 overflows.
DiffStats DiffSerial(const DenseMatrix& a, const DenseMatrix& b);
DiffStats DiffParallel(const DenseMatrix& a, const DenseMatrix& b);

// Number of pairs on which two implicit tree metrics disagree.
int64_t TreeL0Serial(const TreeMetricRep& x, const TreeMetricRep& y);
int64_t TreeL0Parallel(const TreeMetricRep& x, const TreeMetricRep& y);

// All-pairs minimax path values (bottleneck distances) by Floyd-Warshall.
DenseMatrix MinimaxSerial(const DenseMatrix& d);
DenseMatrix MinimaxParallel(const DenseMatrix& d);

// Strong triangle inequality on every triple.
bool UltrametricSerial(const DenseMatrix& d);
bool UltrametricParallel(const DenseMatrix& d);

// Four-point condition on every quadruple of distinct points.
bool FourPointSerial(const DenseMatrix& d);
bool FourPointParallel(const DenseMatrix& d);

}  // namespace streamfit::kernels

#endif  // STREAMFIT_KERNELS_H_
