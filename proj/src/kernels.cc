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

#include "streamfit/kernels.h"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <vector>

#include "streamfit/errors.h"

namespace streamfit::kernels {
namespace {

void RequireSameShape(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.n() != b.n()) throw DomainError("matrix sizes differ");
  a.RequireComplete();
  b.RequireComplete();
}

int64_t CheckedAdd(int64_t x, int64_t y) {
  int64_t out;
  if (__builtin_add_overflow(x, y, &out)) {
    throw DomainError("l1 sum overflows the fixed-point range");
  }
  return out;
}

// The max of three values is attained at least twice.
inline bool TopTwoEqual(Fixed x, Fixed y, Fixed z) {
  if (x >= y && x >= z) return x == y || x == z;
  if (y >= z) return y == z;
  return false;
}

// Dense row-major copy so the cubic loops avoid index arithmetic.
std::vector<int64_t> Square(const DenseMatrix& d) {
  const size_t n = static_cast<size_t>(d.n());
  std::vector<int64_t> out(n * n, 0);
  for (PointId u = 0; u < d.n(); ++u) {
    for (PointId v = u + 1; v < d.n(); ++v) {
      int64_t x = d.at(u, v).raw();
      out[u * n + v] = x;
      out[v * n + u] = x;
    }
  }
  return out;
}

DenseMatrix FromSquare(const std::vector<int64_t>& sq, PointId n) {
  DenseMatrix out(n);
  const size_t nn = static_cast<size_t>(n);
  for (PointId u = 0; u < n; ++u) {
    for (PointId v = u + 1; v < n; ++v) {
      out.set(u, v, Fixed::FromRaw(sq[u * nn + v]));
    }
  }
  return out;
}

bool FourPointAt(const std::vector<int64_t>& s, size_t n, size_t i, size_t j,
                 size_t k, size_t l) {
  Fixed a = Fixed::FromRaw(s[i * n + j] + s[k * n + l]);
  Fixed b = Fixed::FromRaw(s[i * n + k] + s[j * n + l]);
  Fixed c = Fixed::FromRaw(s[i * n + l] + s[j * n + k]);
  return TopTwoEqual(a, b, c);
}

}  // namespace

DiffStats DiffSerial(const DenseMatrix& a, const DenseMatrix& b) {
  RequireSameShape(a, b);
  DiffStats out;
  const auto& x = a.condensed();
  const auto& y = b.condensed();
  int64_t l1 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    Fixed diff = Abs(x[i] - y[i]);
    if (diff == Fixed()) continue;
    ++out.l0;
    l1 = CheckedAdd(l1, diff.raw());
    out.linf = std::max(out.linf, diff);
  }
  out.l1 = Fixed::FromRaw(l1);
  return out;
}

DiffStats DiffParallel(const DenseMatrix& a, const DenseMatrix& b) {
  RequireSameShape(a, b);
  const auto& x = a.condensed();
  const auto& y = b.condensed();
  const int64_t size = static_cast<int64_t>(x.size());
  int64_t l0 = 0, linf = 0;
  __int128 l1 = 0;
  int64_t l1_part = 0;
#pragma omp parallel
  {
    int64_t local_l0 = 0, local_linf = 0;
    __int128 local_l1 = 0;
#pragma omp for schedule(static) nowait
    for (int64_t i = 0; i < size; ++i) {
      int64_t diff = Abs(x[i] - y[i]).raw();
      if (diff == 0) continue;
      ++local_l0;
      local_l1 += diff;
      local_linf = std::max(local_linf, diff);
    }
#pragma omp critical
    {
      l0 += local_l0;
      l1 += local_l1;
      linf = std::max(linf, local_linf);
    }
  }
  if (l1 > INT64_MAX) throw DomainError("l1 sum overflows the fixed-point range");
  l1_part = static_cast<int64_t>(l1);
  return DiffStats{l0, Fixed::FromRaw(l1_part), Fixed::FromRaw(linf)};
}

int64_t TreeL0Serial(const TreeMetricRep& x, const TreeMetricRep& y) {
  if (x.num_points() != y.num_points()) throw DomainError("sizes differ");
  const PointId n = x.num_points();
  int64_t count = 0;
  for (PointId u = 0; u < n; ++u) {
    for (PointId v = u + 1; v < n; ++v) {
      if (x.Distance(u, v) != y.Distance(u, v)) ++count;
    }
  }
  return count;
}

int64_t TreeL0Parallel(const TreeMetricRep& x, const TreeMetricRep& y) {
  if (x.num_points() != y.num_points()) throw DomainError("sizes differ");
  const PointId n = x.num_points();
  int64_t count = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : count)
  for (PointId u = 0; u < n; ++u) {
    for (PointId v = u + 1; v < n; ++v) {
      if (x.Distance(u, v) != y.Distance(u, v)) ++count;
    }
  }
  return count;
}

DenseMatrix MinimaxSerial(const DenseMatrix& d) {
  d.RequireComplete();
  const size_t n = static_cast<size_t>(d.n());
  std::vector<int64_t> m = Square(d);
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const int64_t ik = m[i * n + k];
      for (size_t j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        int64_t via = std::max(ik, m[k * n + j]);
        if (via < m[i * n + j]) m[i * n + j] = via;
      }
    }
  }
  return FromSquare(m, d.n());
}

DenseMatrix MinimaxParallel(const DenseMatrix& d) {
  d.RequireComplete();
  const int64_t n = d.n();
  std::vector<int64_t> m = Square(d);
  for (int64_t k = 0; k < n; ++k) {
    // Row k and column k are fixed points of iteration k, so rows can be
    // relaxed independently.
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const int64_t ik = m[i * n + k];
      for (int64_t j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        int64_t via = std::max(ik, m[k * n + j]);
        if (via < m[i * n + j]) m[i * n + j] = via;
      }
    }
  }
  return FromSquare(m, d.n());
}

bool UltrametricSerial(const DenseMatrix& d) {
  d.RequireComplete();
  const size_t n = static_cast<size_t>(d.n());
  std::vector<int64_t> s = Square(d);
  for (size_t u = 0; u < n; ++u) {
    for (size_t v = u + 1; v < n; ++v) {
      for (size_t w = v + 1; w < n; ++w) {
        if (!TopTwoEqual(Fixed::FromRaw(s[u * n + v]),
                         Fixed::FromRaw(s[u * n + w]),
                         Fixed::FromRaw(s[v * n + w]))) {
          return false;
        }
      }
    }
  }
  return true;
}

bool UltrametricParallel(const DenseMatrix& d) {
  d.RequireComplete();
  const int64_t n = d.n();
  std::vector<int64_t> s = Square(d);
  std::atomic<bool> ok{true};
#pragma omp parallel for schedule(dynamic, 4)
  for (int64_t u = 0; u < n; ++u) {
    if (!ok.load(std::memory_order_relaxed)) continue;
    for (int64_t v = u + 1; v < n; ++v) {
      for (int64_t w = v + 1; w < n; ++w) {
        if (!TopTwoEqual(Fixed::FromRaw(s[u * n + v]),
                         Fixed::FromRaw(s[u * n + w]),
                         Fixed::FromRaw(s[v * n + w]))) {
          ok.store(false, std::memory_order_relaxed);
        }
      }
    }
  }
  return ok.load();
}

bool FourPointSerial(const DenseMatrix& d) {
  d.RequireComplete();
  const size_t n = static_cast<size_t>(d.n());
  std::vector<int64_t> s = Square(d);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      for (size_t k = j + 1; k < n; ++k) {
        for (size_t l = k + 1; l < n; ++l) {
          if (!FourPointAt(s, n, i, j, k, l)) return false;
        }
      }
    }
  }
  return true;
}

bool FourPointParallel(const DenseMatrix& d) {
  d.RequireComplete();
  const int64_t n = d.n();
  std::vector<int64_t> s = Square(d);
  std::atomic<bool> ok{true};
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = i + 1; j < n; ++j) {
      if (!ok.load(std::memory_order_relaxed)) break;
      for (int64_t k = j + 1; k < n; ++k) {
        for (int64_t l = k + 1; l < n; ++l) {
          if (!FourPointAt(s, n, i, j, k, l)) {
            ok.store(false, std::memory_order_relaxed);
          }
        }
      }
    }
  }
  return ok.load();
}

}  // namespace streamfit::kernels
