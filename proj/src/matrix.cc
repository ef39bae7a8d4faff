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

#include "streamfit/matrix.h"

#include <algorithm>
#include <string>
#include <vector>

#include "streamfit/errors.h"

namespace streamfit {

DenseMatrix::DenseMatrix(PointId n)
    : n_(n), values_(PairCount(n), kMissing) {}

bool DenseMatrix::IsComplete() const {
  return std::none_of(values_.begin(), values_.end(),
                      [](Fixed f) { return f == kMissing; });
}

void DenseMatrix::RequireComplete() const {
  for (PointId u = 0; u < n_; ++u) {
    for (PointId v = u + 1; v < n_; ++v) {
      if (!has(u, v)) {
        throw DomainError("matrix is missing pair (" + std::to_string(u) +
                          ", " + std::to_string(v) + ")");
      }
    }
  }
}

std::vector<Fixed> DenseMatrix::DistinctValues() const {
  std::vector<Fixed> out;
  out.reserve(values_.size());
  for (Fixed f : values_) {
    if (f != kMissing) out.push_back(f);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Fixed DenseMatrix::MaxValue() const {
  Fixed best;
  for (Fixed f : values_) {
    if (f != kMissing) best = std::max(best, f);
  }
  return best;
}

}  // namespace streamfit
