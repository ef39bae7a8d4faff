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

#ifndef STREAMFIT_MEMORY_METER_H_
#define STREAMFIT_MEMORY_METER_H_

#include <algorithm>
#include <cstdint>

namespace streamfit {

// Counts machine words retained by registered structures and remembers the
// peak since the last reset.
class MemoryMeter {
 public:
  void Add(int64_t words) {
    current_ += words;
    peak_ = std::max(peak_, current_);
  }
  void Remove(int64_t words) { current_ -= words; }
  void Reset() { current_ = peak_ = 0; }
  // Starts a new phase: the peak restarts from the current level.
  void ResetPeak() { peak_ = current_; }

  int64_t current() const { return current_; }
  int64_t peak() const { return peak_; }

 private:
  int64_t current_ = 0;
  int64_t peak_ = 0;
};

}  // namespace streamfit

#endif  // STREAMFIT_MEMORY_METER_H_
