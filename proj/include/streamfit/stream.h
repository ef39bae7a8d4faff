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

#ifndef STREAMFIT_STREAM_H_
#define STREAMFIT_STREAM_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "streamfit/matrix.h"

namespace streamfit {

// A replayable arbitrary-order sequence of distance entries. Every replay
// yields each unordered pair of the n points exactly once; multi-pass
// algorithms call Replay once per pass.
class StreamSource {
 public:
  using Visitor = std::function<void(const DistanceEntry&)>;

  virtual ~StreamSource() = default;

  virtual PointId n() const = 0;

  void Replay(const Visitor& visit) {
    int pass = pass_count_++;
    DoReplay(pass, visit);
  }

  int pass_count() const { return pass_count_; }

 protected:
  virtual void DoReplay(int pass, const Visitor& visit) = 0;

 private:
  int pass_count_ = 0;
};

enum class StreamOrder {
  kRowMajor,
  // One seeded permutation reused by every pass.
  kFixedPermutation,
  // A fresh permutation per pass, derived from (seed, pass index).
  kPermutationPerPass,
};

// Streams an in-memory matrix. Missing entries are skipped.
class MatrixStream : public StreamSource {
 public:
  MatrixStream(std::shared_ptr<const DenseMatrix> matrix, StreamOrder order,
               uint64_t seed = 0);

  PointId n() const override { return matrix_->n(); }
  const DenseMatrix& matrix() const { return *matrix_; }

 protected:
  void DoReplay(int pass, const Visitor& visit) override;

 private:
  std::shared_ptr<const DenseMatrix> matrix_;
  StreamOrder order_;
  uint64_t seed_;
  std::vector<uint32_t> fixed_order_;
};

// Streams an instance file: a header line "n" followed by lines "u v d",
// ASCII, LF-terminated, d a positive decimal with at most 9 fractional
// digits. The file is re-read on every pass.
class FileStream : public StreamSource {
 public:
  explicit FileStream(std::string path);

  PointId n() const override { return n_; }

 protected:
  void DoReplay(int pass, const Visitor& visit) override;

 private:
  std::string path_;
  PointId n_ = 0;
};

// Parses one "u v d" line. Throws ParseError tagged with line_number.
DistanceEntry ParseEntryLine(const std::string& line, PointId n,
                             int line_number);

// Writes the instance file format in row-major order.
void WriteInstanceFile(const std::string& path, const DenseMatrix& matrix);
std::string FormatInstance(const DenseMatrix& matrix);

// Drains one pass into a matrix. Duplicate pairs always throw
// StreamIntegrityError; missing pairs throw only when require_complete.
DenseMatrix CollectMatrix(StreamSource& source, bool require_complete = true);

// Tracks which pairs a pass has delivered.
class PairTracker {
 public:
  explicit PairTracker(PointId n);
  // Throws StreamIntegrityError on a repeated pair.
  void Mark(PointId u, PointId v);
  // Throws StreamIntegrityError if any pair is missing.
  void RequireComplete() const;
  size_t seen() const { return seen_count_; }

 private:
  PointId n_;
  std::vector<bool> seen_;
  size_t seen_count_ = 0;
};

}  // namespace streamfit

#endif  // STREAMFIT_STREAM_H_
