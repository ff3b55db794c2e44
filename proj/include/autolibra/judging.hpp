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

// Model-based judging of trajectories against a metric set, and the score
// aggregations over a judging run.

#ifndef AUTOLIBRA_JUDGING_HPP_
#define AUTOLIBRA_JUDGING_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "autolibra/core/model.hpp"
#include "autolibra/llm/gateway.hpp"
#include "autolibra/llm/roles.hpp"

namespace autolibra {

struct JudgingOptions {
  ModelRole role = RoleModels{}.judge;
  int schema_retries = 1;
};

ModelRequest judging_request(const Trajectory& t, const MetricSet& ms,
                             const JudgingOptions& options);

// One rating per metric, in metric-set order. A reply missing metrics gets
// one re-prompt, then JudgeSchemaError.
std::vector<Rating> judge_trajectory(const Gateway& gateway, const Trajectory& t,
                                     const MetricSet& ms,
                                     const JudgingOptions& options = {});

// Ratings for every trajectory, concatenated in trajectory order.
std::vector<Rating> judge_all(const Gateway& gateway,
                              const std::vector<Trajectory>& trajectories,
                              const MetricSet& ms, const JudgingOptions& options,
                              std::size_t max_parallel);

// (#+1) / (#+1 + #-1) for the metric; nullopt when that denominator is 0.
OptFraction metric_score(const std::vector<Rating>& ratings,
                         const std::string& metric_id);

// (#-1) / (#+1 + #-1) for the metric; nullopt when that denominator is 0.
OptFraction failure_rate(const std::vector<Rating>& ratings,
                         const std::string& metric_id);

struct MetricTally {
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::size_t n_na = 0;
  OptFraction score;
  OptFraction failure_rate;
};

// Tallies per metric id of `ms`, in metric-set order.
std::vector<std::pair<std::string, MetricTally>> tally_scores(
    const std::vector<Rating>& ratings, const MetricSet& ms);

// scores.json: {"metric_id": {"score", "failure_rate", "n_pos", "n_neg", "n_na"}}.
Json scores_json(const std::vector<std::pair<std::string, MetricTally>>& tallies);

}  // namespace autolibra

#endif  // AUTOLIBRA_JUDGING_HPP_
