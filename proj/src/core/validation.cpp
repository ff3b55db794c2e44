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

#include "autolibra/core/validation.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

#include "autolibra/core/errors.hpp"

namespace autolibra {

bool ValidationOutcome::has_violation(const std::string& message) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.message == message; });
}

bool ValidationOutcome::has_warning(const std::string& message) const {
  return std::any_of(warnings.begin(), warnings.end(),
                     [&](const Violation& v) { return v.message == message; });
}

std::string ValidationOutcome::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.path + ": " + v.message;
  }
  return out;
}

ValidationOutcome validate_trajectory(const Trajectory& t) {
  ValidationOutcome out;
  if (t.id.empty()) out.violations.push_back({"id", "id empty"});
  if (t.steps.empty()) out.violations.push_back({"steps", "steps empty"});
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    if (t.steps[i].index != i) {
      out.violations.push_back(
          {"steps[" + std::to_string(i) + "].index", "index density"});
    }
  }
  return out;
}

std::vector<Trait> derive_traits(const std::vector<Rating>& ratings) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<Trait> traits;
  for (const auto& r : ratings) {
    if (!seen.emplace(r.trajectory_id, r.metric_id).second) {
      throw CorruptRatingsError("duplicate rating for trajectory \"" +
                                r.trajectory_id + "\" metric \"" +
                                r.metric_id + "\"");
    }
    switch (r.value) {
      case RatingValue::kPlusOne:
        traits.push_back({r.trajectory_id, r.metric_id, Polarity::kPositive});
        break;
      case RatingValue::kMinusOne:
        traits.push_back({r.trajectory_id, r.metric_id, Polarity::kNegative});
        break;
      case RatingValue::kNotApplicable:
        break;
    }
  }
  return traits;
}

std::string slugify(const std::string& name) {
  std::string out;
  bool pending_dash = false;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      if (pending_dash && !out.empty()) out += '-';
      pending_dash = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      pending_dash = true;
    }
  }
  return out.empty() ? "metric" : out;
}

std::string unique_slug(const std::string& name,
                        std::vector<std::string>& taken) {
  const std::string base = slugify(name);
  auto is_taken = [&](const std::string& s) {
    return std::find(taken.begin(), taken.end(), s) != taken.end();
  };
  std::string candidate = base;
  for (int k = 2; is_taken(candidate); ++k) {
    candidate = base + "-" + std::to_string(k);
  }
  taken.push_back(candidate);
  return candidate;
}

}  // namespace autolibra
