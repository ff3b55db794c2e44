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

#ifndef AUTOLIBRA_CORE_VALIDATION_HPP_
#define AUTOLIBRA_CORE_VALIDATION_HPP_

#include <string>
#include <vector>

#include "autolibra/core/model.hpp"

namespace autolibra {

struct Violation {
  std::string path;     // e.g. "steps[2].index"
  std::string message;  // e.g. "index density"

  bool operator==(const Violation&) const = default;
};

// Violations are data, not faults. Warnings never make an outcome fail.
struct ValidationOutcome {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;

  bool ok() const { return violations.empty(); }
  bool has_violation(const std::string& message) const;
  bool has_warning(const std::string& message) const;
  std::string summary() const;
};

ValidationOutcome validate_trajectory(const Trajectory& t);

// Derives traits from +1/-1 ratings in input order; N/A ratings yield none.
// Throws CorruptRatingsError on a duplicate (trajectory, metric) rating.
std::vector<Trait> derive_traits(const std::vector<Rating>& ratings);

// Lowercase hyphenated slug, e.g. "Responds Promptly!" -> "responds-promptly".
std::string slugify(const std::string& name);

// Slug for `name` that is not in `taken`, using suffixes "-2", "-3", ...
// The result is added to `taken`.
std::string unique_slug(const std::string& name, std::vector<std::string>& taken);

}  // namespace autolibra

#endif  // AUTOLIBRA_CORE_VALIDATION_HPP_
