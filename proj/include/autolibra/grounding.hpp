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

// Feedback grounding: splits one free-text comment into sign-tagged aspects,
// each tied to a contiguous step range of the trajectory it talks about.

#ifndef AUTOLIBRA_GROUNDING_HPP_
#define AUTOLIBRA_GROUNDING_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "autolibra/core/model.hpp"
#include "autolibra/core/validation.hpp"
#include "autolibra/llm/gateway.hpp"
#include "autolibra/llm/roles.hpp"

namespace autolibra {

inline constexpr std::size_t kMaxAspects = 10;
// Above this count validate_aspects warns but accepts.
inline constexpr std::size_t kTypicalMaxAspects = 5;

struct GroundingOptions {
  ModelRole role = RoleModels{}.grounder;
  std::size_t max_aspects = kMaxAspects;
  // Fallback excerpts (when the model's excerpt is not found in the steps)
  // are cut to this many characters.
  std::size_t max_excerpt_chars = 400;
};

ModelRequest grounding_request(const Trajectory& t, const Feedback& f,
                               const GroundingOptions& options);

// Throws EmptyGroundingError when the model finds no aspect, and
// GroundingBoundsError / GroundingCountError when a single repair
// re-prompt does not fix out-of-range steps or too many aspects.
std::vector<Aspect> ground_feedback(const Gateway& gateway, const Trajectory& t,
                                    const Feedback& f,
                                    const GroundingOptions& options = {});

// Grounds many instances concurrently; output order follows `instances`.
std::vector<std::vector<Aspect>> ground_all(
    const Gateway& gateway,
    const std::vector<std::pair<Trajectory, Feedback>>& instances,
    const GroundingOptions& options, std::size_t max_parallel);

ValidationOutcome validate_aspects(const std::vector<Aspect>& aspects,
                                   const Trajectory& t,
                                   std::size_t max_aspects = kMaxAspects);

}  // namespace autolibra

#endif  // AUTOLIBRA_GROUNDING_HPP_
