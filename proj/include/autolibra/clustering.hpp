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

// Behavior clustering: groups grounded aspects into N metrics, each with a
// definition of the desired behavior and good/bad example lists drawn from
// the aspects. Also the iterative variant that extends an existing metric
// set without touching its definitions, and the example-stripping ablation.

#ifndef AUTOLIBRA_CLUSTERING_HPP_
#define AUTOLIBRA_CLUSTERING_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "autolibra/core/model.hpp"
#include "autolibra/core/validation.hpp"
#include "autolibra/llm/gateway.hpp"
#include "autolibra/llm/roles.hpp"

namespace autolibra {

struct ClusteringOptions {
  ModelRole role = RoleModels{}.clusterer;
  // Domain nouns of the granularity instruction ("... one particular
  // website or one particular character").
  std::string scope_noun_a = "website";
  std::string scope_noun_b = "character";
  // Estimated prompt tokens (4 chars per token) available for aspects.
  std::size_t token_budget = 100000;
  int cardinality_retries = 3;
  int schema_retries = 1;
  int frozen_retries = 1;
};

// Aspects in the order they are shown to the model, with the short keys
// ("a1", "a2", ...) the model uses to cite examples.
struct PresentedAspects {
  std::vector<const Aspect*> aspects;
  std::vector<std::string> keys;
  std::size_t total = 0;
};

// Seeded shuffle, then round-robin selection per sign within the token
// budget. Throws InvalidArgumentError if fewer than half the aspects fit.
PresentedAspects present_aspects(const std::vector<Aspect>& aspects,
                                 std::int64_t seed,
                                 const ClusteringOptions& options);

ModelRequest clustering_request(const PresentedAspects& presented,
                                std::size_t n, std::int64_t seed,
                                const ClusteringOptions& options);

// Exactly `n` metrics or CardinalityError (after up to 3 re-prompts);
// SchemaError for empty definitions or metrics without resolvable examples.
MetricSet cluster_aspects(const Gateway& gateway,
                          const std::vector<Aspect>& aspects, std::size_t n,
                          std::int64_t seed,
                          const ClusteringOptions& options = {},
                          std::int64_t candidate_index = 0);

// Child of `existing`: every existing (id, name, definition) is kept
// byte-identical, existing metrics may gain examples, new metrics may be
// appended. A model answer that edits or drops an existing metric gets one
// corrective re-prompt, then FrozenDefinitionError.
MetricSet cluster_iterative(const Gateway& gateway,
                            const std::vector<Aspect>& aspects,
                            const MetricSet& existing, std::int64_t seed,
                            const ClusteringOptions& options = {});

// Same ids, names and definitions with every example list emptied.
// Idempotent.
MetricSet strip_examples(const MetricSet& ms);

// Content-derived id ("ms-<hex>") of a metric set.
std::string compute_metric_set_id(const MetricSet& ms);

// Checks MetricSet / Metric invariants (unique ids, non-empty definitions,
// examples present unless ablated).
ValidationOutcome validate_metric_set(const MetricSet& ms);

}  // namespace autolibra

#endif  // AUTOLIBRA_CLUSTERING_HPP_
