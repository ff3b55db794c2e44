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

#ifndef AUTOLIBRA_CORE_FRACTION_HPP_
#define AUTOLIBRA_CORE_FRACTION_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace autolibra {

// Exact non-negative-denominator rational, always kept in lowest terms.
// Coverage, redundancy, scores and ladder statistics are all carried as
// Fractions and only rendered to decimals at the file boundary.
class Fraction {
 public:
  constexpr Fraction() = default;
  Fraction(std::int64_t num, std::int64_t den);
  static Fraction of(std::int64_t num) { return Fraction(num, 1); }

  // Nearest fraction with the given denominator, e.g. 0.01 -> 1/100.
  static Fraction from_double(double value, std::int64_t den = 1000000);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / den_; }

  // Decimal rendering rounded half away from zero, e.g. 5/12 -> "0.4167".
  std::string to_decimal(int places = 4) const;
  // to_decimal parsed back to a double, for JSON emission.
  double rounded(int places = 4) const;

  friend Fraction operator+(const Fraction& a, const Fraction& b);
  friend Fraction operator-(const Fraction& a, const Fraction& b);
  friend Fraction operator*(const Fraction& a, const Fraction& b);
  friend Fraction operator/(const Fraction& a, const Fraction& b);
  friend bool operator==(const Fraction& a, const Fraction& b) = default;
  friend std::strong_ordering operator<=>(const Fraction& a,
                                          const Fraction& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

using OptFraction = std::optional<Fraction>;

// Absolute difference |a - b|.
Fraction abs_diff(const Fraction& a, const Fraction& b);

}  // namespace autolibra

#endif  // AUTOLIBRA_CORE_FRACTION_HPP_
