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

#include "streamfit/stream.h"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "streamfit/errors.h"
#include "streamfit/seeds.h"

namespace streamfit {
namespace {

std::vector<uint32_t> SeededOrder(size_t count, uint64_t seed) {
  std::vector<uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(seed);
  rng.Shuffle(order);
  return order;
}

// Inverse of PairIndex, walking rows; used to emit permuted entries.
struct PairCursor {
  explicit PairCursor(PointId n) : n(n), row_start(static_cast<size_t>(n)) {
    row_start[0] = 0;
    for (PointId u = 1; u < n; ++u) {
      row_start[u] = row_start[u - 1] + static_cast<size_t>(n - u);
    }
  }
  std::pair<PointId, PointId> Decode(size_t index) const {
    // Binary search the row whose range contains index.
    PointId lo = 0, hi = n - 2;
    while (lo < hi) {
      PointId mid = (lo + hi + 1) / 2;
      if (row_start[mid] <= index) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return {lo, static_cast<PointId>(lo + 1 + (index - row_start[lo]))};
  }
  PointId n;
  std::vector<size_t> row_start;
};

bool ParseInt(std::string_view token, int64_t& out) {
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> SplitSpaces(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

PointId ReadHeader(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header line");
  int64_t n = 0;
  auto tokens = SplitSpaces(line);
  if (tokens.size() != 1 || !ParseInt(tokens[0], n) || n < 1 ||
      n > (int64_t{1} << 30)) {
    throw ParseError(1, "header must be a positive point count");
  }
  return static_cast<PointId>(n);
}

}  // namespace

MatrixStream::MatrixStream(std::shared_ptr<const DenseMatrix> matrix,
                           StreamOrder order, uint64_t seed)
    : matrix_(std::move(matrix)), order_(order), seed_(seed) {
  if (order_ == StreamOrder::kFixedPermutation) {
    fixed_order_ = SeededOrder(PairCount(matrix_->n()), seed_);
  }
}

void MatrixStream::DoReplay(int pass, const Visitor& visit) {
  const DenseMatrix& m = *matrix_;
  const PointId n = m.n();
  if (order_ == StreamOrder::kRowMajor) {
    for (PointId u = 0; u < n; ++u) {
      for (PointId v = u + 1; v < n; ++v) {
        if (m.has(u, v)) visit(DistanceEntry{u, v, m.at(u, v)});
      }
    }
    return;
  }
  std::vector<uint32_t> fresh;
  const std::vector<uint32_t>* order = &fixed_order_;
  if (order_ == StreamOrder::kPermutationPerPass) {
    fresh = SeededOrder(PairCount(n),
                        HashCombine(seed_, static_cast<uint64_t>(pass)));
    order = &fresh;
  }
  PairCursor cursor(n);
  const auto& values = m.condensed();
  for (uint32_t index : *order) {
    if (values[index] == DenseMatrix::kMissing) continue;
    auto [u, v] = cursor.Decode(index);
    visit(DistanceEntry{u, v, values[index]});
  }
}

FileStream::FileStream(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) throw Error("cannot open " + path_);
  n_ = ReadHeader(in);
}

void FileStream::DoReplay(int /*pass*/, const Visitor& visit) {
  std::ifstream in(path_);
  if (!in) throw Error("cannot open " + path_);
  ReadHeader(in);
  std::string line;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    visit(ParseEntryLine(line, n_, line_number));
  }
}

DistanceEntry ParseEntryLine(const std::string& line, PointId n,
                             int line_number) {
  if (!line.empty() && line.back() == '\r') {
    throw ParseError(line_number, "CR line ending; expected LF");
  }
  auto tokens = SplitSpaces(line);
  if (tokens.size() != 3) {
    throw ParseError(line_number, "expected \"u v d\"");
  }
  int64_t u = 0, v = 0;
  if (!ParseInt(tokens[0], u) || !ParseInt(tokens[1], v)) {
    throw ParseError(line_number, "point ids must be integers");
  }
  if (u < 0 || v < 0 || u >= n || v >= n) {
    throw ParseError(line_number, "point id out of range");
  }
  if (u == v) throw ParseError(line_number, "self pair");
  std::string_view d_text = tokens[2];
  if (auto dot = d_text.find('.'); dot != std::string_view::npos &&
                                   d_text.size() - dot - 1 >
                                       static_cast<size_t>(Fixed::kInputDigits)) {
    throw ParseError(line_number, "more than 9 fractional digits");
  }
  auto d = Fixed::Parse(d_text);
  if (!d) throw ParseError(line_number, "malformed distance");
  if (*d <= Fixed()) throw ParseError(line_number, "non-positive distance");
  if (u > v) std::swap(u, v);
  return DistanceEntry{static_cast<PointId>(u), static_cast<PointId>(v), *d};
}

std::string FormatInstance(const DenseMatrix& matrix) {
  std::ostringstream out;
  out << matrix.n() << '\n';
  for (PointId u = 0; u < matrix.n(); ++u) {
    for (PointId v = u + 1; v < matrix.n(); ++v) {
      if (!matrix.has(u, v)) continue;
      out << u << ' ' << v << ' ' << matrix.at(u, v).ToString() << '\n';
    }
  }
  return out.str();
}

void WriteInstanceFile(const std::string& path, const DenseMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << FormatInstance(matrix);
}

PairTracker::PairTracker(PointId n) : n_(n), seen_(PairCount(n), false) {}

void PairTracker::Mark(PointId u, PointId v) {
  size_t index = PairIndex(u, v, n_);
  if (seen_[index]) {
    throw StreamIntegrityError("duplicate entry for pair (" +
                               std::to_string(std::min(u, v)) + ", " +
                               std::to_string(std::max(u, v)) + ")");
  }
  seen_[index] = true;
  ++seen_count_;
}

void PairTracker::RequireComplete() const {
  if (seen_count_ == seen_.size()) return;
  for (PointId u = 0; u < n_; ++u) {
    for (PointId v = u + 1; v < n_; ++v) {
      if (!seen_[PairIndex(u, v, n_)]) {
        throw StreamIntegrityError("missing entry for pair (" +
                                   std::to_string(u) + ", " +
                                   std::to_string(v) + ")");
      }
    }
  }
}

DenseMatrix CollectMatrix(StreamSource& source, bool require_complete) {
  DenseMatrix m(source.n());
  PairTracker tracker(source.n());
  source.Replay([&](const DistanceEntry& e) {
    tracker.Mark(e.u, e.v);
    m.set(e.u, e.v, e.d);
  });
  if (require_complete) tracker.RequireComplete();
  return m;
}

}  // namespace streamfit
