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

#include "streamfit/fixed.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "streamfit/errors.h"

namespace streamfit {
namespace {

// One raw unit is 5e-10, so ten fractional digits are the natural width.
constexpr int kMaxFractionDigits = 10;
constexpr int64_t kTenthNanosPerRaw = 5;
constexpr int64_t kMaxIntegerPart =
    std::numeric_limits<int64_t>::max() / Fixed::kScale - 1;

}  // namespace

Fixed Fixed::FromDouble(double units) {
  return Fixed(static_cast<int64_t>(std::llround(units * kScale)));
}

std::optional<Fixed> Fixed::Parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;

  int64_t integer_part = 0;
  size_t i = 0;
  size_t integer_digits = 0;
  for (; i < text.size() && text[i] != '.'; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') return std::nullopt;
    integer_part = integer_part * 10 + (c - '0');
    if (integer_part > kMaxIntegerPart) return std::nullopt;
    ++integer_digits;
  }
  int64_t fraction = 0;
  int fraction_digits = 0;
  if (i < text.size()) {
    ++i;  // '.'
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c < '0' || c > '9') return std::nullopt;
      if (++fraction_digits > kMaxFractionDigits) return std::nullopt;
      fraction = fraction * 10 + (c - '0');
    }
    if (fraction_digits == 0) return std::nullopt;
  }
  if (integer_digits == 0 && fraction_digits == 0) return std::nullopt;
  for (int k = fraction_digits; k < kMaxFractionDigits; ++k) fraction *= 10;
  if (fraction % kTenthNanosPerRaw != 0) return std::nullopt;

  int64_t raw = integer_part * kScale + fraction / kTenthNanosPerRaw;
  return Fixed(negative ? -raw : raw);
}

std::string Fixed::ToString() const {
  int64_t magnitude = raw_ < 0 ? -raw_ : raw_;
  int64_t integer_part = magnitude / kScale;
  int64_t fraction = (magnitude % kScale) * kTenthNanosPerRaw;
  std::string out = raw_ < 0 ? "-" : "";
  out += std::to_string(integer_part);
  if (fraction != 0) {
    std::string digits = std::to_string(fraction);
    digits.insert(0, kMaxFractionDigits - digits.size(), '0');
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

Fixed Fixed::Half() const {
  if (raw_ % 2 != 0) {
    throw DomainError("value " + ToString() + " has no exact half");
  }
  return Fixed(raw_ / 2);
}

}  // namespace streamfit
