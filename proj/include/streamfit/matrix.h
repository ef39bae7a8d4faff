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

#ifndef STREAMFIT_MATRIX_H_
#define STREAMFIT_MATRIX_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "streamfit/fixed.h"

namespace streamfit {

using PointId = int32_t;

// One entry of the input: an unordered pair with its distance, u < v.
struct DistanceEntry {
  PointId u = 0;
  PointId v = 0;
  Fixed d;
};

// Index of the unordered pair {u, v} (u != v) in the condensed upper
// triangle of an n-point matrix.
inline size_t PairIndex(PointId u, PointId v, PointId n) {
  if (u > v) std::swap(u, v);
  size_t uu = static_cast<size_t>(u);
  return uu * (2 * static_cast<size_t>(n) - uu - 1) / 2 +
         static_cast<size_t>(v - u - 1);
}

inline size_t PairCount(PointId n) {
  return static_cast<size_t>(n) * static_cast<size_t>(n > 0 ? n - 1 : 0) / 2;
}

// Symmetric distance matrix stored as its condensed upper triangle. Entries
// may be missing until set; the diagonal is implicitly zero.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(PointId n);

  PointId n() const { return n_; }

  Fixed at(PointId u, PointId v) const {
    if (u == v) return Fixed();
    return values_[PairIndex(u, v, n_)];
  }
  bool has(PointId u, PointId v) const {
    return u == v || values_[PairIndex(u, v, n_)] != kMissing;
  }
  void set(PointId u, PointId v, Fixed d) { values_[PairIndex(u, v, n_)] = d; }

  bool IsComplete() const;
  // Throws DomainError naming the first missing pair.
  void RequireComplete() const;

  // Sorted distinct off-diagonal values.
  std::vector<Fixed> DistinctValues() const;
  Fixed MaxValue() const;

  const std::vector<Fixed>& condensed() const { return values_; }

  bool operator==(const DenseMatrix&) const = default;

  static constexpr Fixed kMissing =
      Fixed::FromRaw(std::numeric_limits<int64_t>::min());

 private:
  PointId n_ = 0;
  std::vector<Fixed> values_;
};

}  // namespace streamfit

#endif  // STREAMFIT_MATRIX_H_
