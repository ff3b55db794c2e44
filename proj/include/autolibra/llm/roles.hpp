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

#ifndef AUTOLIBRA_LLM_ROLES_HPP_
#define AUTOLIBRA_LLM_ROLES_HPP_

#include <string>

namespace autolibra {

struct ModelRole {
  std::string model;
  double temperature = 0.0;
};

// Per-role model configuration. Every field can be overridden from the
// [gateway] config section ("grounder_model", "judge_temperature", ...).
struct RoleModels {
  ModelRole grounder{"gpt-4o", 0.0};
  ModelRole clusterer{"o3-mini@high", 1.0};
  ModelRole judge{"o3-mini@medium", 0.0};
  ModelRole matcher{"gpt-4o", 0.0};
  ModelRole agent{"gemini-2.5-flash", 1.0};
  ModelRole improver{"gemini-2.5-flash", 1.0};
};

}  // namespace autolibra

#endif  // AUTOLIBRA_LLM_ROLES_HPP_
