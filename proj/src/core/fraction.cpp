/* Copyright 2026 The AutoLibra Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "autolibra/core/fraction.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "autolibra/core/errors.hpp"

namespace autolibra {
namespace {

using Wide = __int128;

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Fraction make(Wide num, Wide den) {
  if (den == 0) throw InvalidArgumentError("fraction with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr Wide kMax = std::numeric_limits<std::int64_t>::max();
  if (num > kMax || num < -kMax || den > kMax) {
    throw InvalidArgumentError("fraction overflow");
  }
  return Fraction(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Fraction::Fraction(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidArgumentError("fraction with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

Fraction Fraction::from_double(double value, std::int64_t den) {
  return Fraction(static_cast<std::int64_t>(std::llround(value * den)), den);
}

std::string Fraction::to_decimal(int places) const {
  Wide scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  Wide n = num_;
  bool negative = n < 0;
  if (negative) n = -n;
  // round half away from zero: floor((2 * n * scale + den) / (2 * den))
  Wide scaled = (2 * n * scale + den_) / (2 * static_cast<Wide>(den_));
  Wide whole = scaled / scale;
  Wide frac = scaled % scale;
  std::string out = negative && scaled != 0 ? "-" : "";
  out += std::to_string(static_cast<long long>(whole));
  if (places > 0) {
    std::string digits = std::to_string(static_cast<long long>(frac));
    out += '.';
    out += std::string(places - digits.size(), '0');
    out += digits;
  }
  return out;
}

double Fraction::rounded(int places) const {
  return std::stod(to_decimal(places));
}

Fraction operator+(const Fraction& a, const Fraction& b) {
  return make(static_cast<Wide>(a.num_) * b.den_ + static_cast<Wide>(b.num_) * a.den_,
              static_cast<Wide>(a.den_) * b.den_);
}

Fraction operator-(const Fraction& a, const Fraction& b) {
  return make(static_cast<Wide>(a.num_) * b.den_ - static_cast<Wide>(b.num_) * a.den_,
              static_cast<Wide>(a.den_) * b.den_);
}

Fraction operator*(const Fraction& a, const Fraction& b) {
  return make(static_cast<Wide>(a.num_) * b.num_,
              static_cast<Wide>(a.den_) * b.den_);
}

Fraction operator/(const Fraction& a, const Fraction& b) {
  return make(static_cast<Wide>(a.num_) * b.den_,
              static_cast<Wide>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
  Wide lhs = static_cast<Wide>(a.num_) * b.den_;
  Wide rhs = static_cast<Wide>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Fraction abs_diff(const Fraction& a, const Fraction& b) {
  return a < b ? b - a : a - b;
}

}  // namespace autolibra
