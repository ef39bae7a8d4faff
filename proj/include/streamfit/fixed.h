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

#ifndef STREAMFIT_FIXED_H_
#define STREAMFIT_FIXED_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace streamfit {

// Exact fixed-point distance. Inputs carry at most 9 fractional decimal
// digits; one raw unit is half of 1e-9 so that halving any difference of
// input values stays exact.
class Fixed {
 public:
  static constexpr int64_t kScale = 2'000'000'000;
  static constexpr int kInputDigits = 9;

  constexpr Fixed() = default;

  static constexpr Fixed FromRaw(int64_t raw) { return Fixed(raw); }
  static constexpr Fixed FromInt(int64_t units) { return Fixed(units * kScale); }
  static Fixed FromDouble(double units);

  // Parses "12", "1.5", "0.000000001". Up to 10 fractional digits are
  // accepted provided the value is a multiple of the raw unit.
  static std::optional<Fixed> Parse(std::string_view text);

  // Shortest decimal rendering that parses back to the same value.
  std::string ToString() const;
  double ToDouble() const { return static_cast<double>(raw_) / kScale; }

  constexpr int64_t raw() const { return raw_; }

  // Exact half; throws DomainError if the raw value is odd.
  Fixed Half() const;

  constexpr Fixed operator+(Fixed o) const { return Fixed(raw_ + o.raw_); }
  constexpr Fixed operator-(Fixed o) const { return Fixed(raw_ - o.raw_); }
  constexpr Fixed operator-() const { return Fixed(-raw_); }
  constexpr Fixed& operator+=(Fixed o) {
    raw_ += o.raw_;
    return *this;
  }
  constexpr Fixed& operator-=(Fixed o) {
    raw_ -= o.raw_;
    return *this;
  }
  constexpr Fixed operator*(int64_t k) const { return Fixed(raw_ * k); }

  constexpr auto operator<=>(const Fixed&) const = default;

 private:
  constexpr explicit Fixed(int64_t raw) : raw_(raw) {}
  int64_t raw_ = 0;
};

constexpr Fixed Abs(Fixed f) { return f.raw() < 0 ? -f : f; }

}  // namespace streamfit

#endif  // STREAMFIT_FIXED_H_
