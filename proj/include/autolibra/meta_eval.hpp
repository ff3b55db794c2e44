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

// Meta-evaluation: per-instance matching of human aspects against judge
// traits, and pooled coverage / redundancy over a split.
//
// Matching is many-to-one: several aspects may point at the same trait.
// Only same-sign pairs count (positive aspect <-> positive trait).

#ifndef AUTOLIBRA_META_EVAL_HPP_
#define AUTOLIBRA_META_EVAL_HPP_

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "autolibra/core/model.hpp"
#include "autolibra/judging.hpp"
#include "autolibra/llm/gateway.hpp"
#include "autolibra/llm/roles.hpp"

namespace autolibra {

struct MatchingOptions {
  ModelRole role = RoleModels{}.matcher;
};

// One (trajectory, feedback) pair with its grounded aspects.
struct Instance {
  Trajectory trajectory;
  Feedback feedback;
  std::vector<Aspect> aspects;
};

// `ms` supplies metric names and definitions for the trait list; traits
// whose metric is not in `ms` are shown by id only.
ModelRequest matching_request(const std::vector<Aspect>& aspects,
                              const std::vector<Trait>& traits,
                              const MetricSet* ms,
                              const MatchingOptions& options);

// Asks the model for the best trait per aspect. Sign-inconsistent or
// unknown proposals are discarded (the aspect stays unmatched). No model
// call is made when either list is empty.
MatchRecord match_instance(const Gateway& gateway,
                           const std::string& trajectory_id,
                           const std::string& feedback_id,
                           const std::vector<Aspect>& aspects,
                           const std::vector<Trait>& traits,
                           const MetricSet* ms = nullptr,
                           const MatchingOptions& options = {});

// (aspect_id, metric_id) pairs that may match.
using SimilarityRelation = std::set<std::pair<std::string, std::string>>;

// Reference matcher: exhaustive search over every assignment of each aspect
// to one related trait of the same polarity or to nothing, keeping the assignment with the most
// matched aspects and, among those, the lexicographically smallest sorted
// (aspect_id, trait_id) list. Exponential in the aspect count; meant for
// small instances and tests.
MatchRecord oracle_match(const std::string& trajectory_id,
                         const std::string& feedback_id,
                         const std::vector<Aspect>& aspects,
                         const std::vector<Trait>& traits,
                         const SimilarityRelation& relation);

// Pooled counts over all records. Throws EmptyEvaluationError when there
// are no aspects at all; redundancy is undefined when there are no traits.
QualityReport quality_report(const std::vector<MatchRecord>& records,
                             const std::string& metric_set_id, Split split);

struct EvaluationOptions {
  JudgingOptions judging;
  MatchingOptions matching;
  std::size_t max_parallel = 4;
};

struct Evaluation {
  std::vector<Rating> ratings;
  std::vector<MatchRecord> records;
  QualityReport report;
};

// Judge every instance trajectory with `ms`, derive traits, match them
// against the instance aspects, and pool the result.
Evaluation evaluate_metric_set(const Gateway& gateway,
                               const std::vector<Instance>& instances,
                               const MetricSet& ms, Split split,
                               const EvaluationOptions& options);

}  // namespace autolibra

#endif  // AUTOLIBRA_META_EVAL_HPP_
