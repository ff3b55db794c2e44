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

// Stage-wise agent improvement on the key-door environment.
//
// Every stage samples trajectories on the train tasks, collects feedback on
// them, induces metrics (optimizer on the first stage, iterative clustering
// afterwards) and then runs an inner loop: play every full-set task, judge,
// rewrite the agent prompt from the train-task trajectories.

#ifndef AUTOLIBRA_LADDER_LADDER_HPP_
#define AUTOLIBRA_LADDER_LADDER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autolibra/clustering.hpp"
#include "autolibra/core/errors.hpp"
#include "autolibra/core/fraction.hpp"
#include "autolibra/core/model.hpp"
#include "autolibra/grounding.hpp"
#include "autolibra/ladder/toy_env.hpp"
#include "autolibra/llm/gateway.hpp"
#include "autolibra/llm/roles.hpp"
#include "autolibra/meta_eval.hpp"
#include "autolibra/optimizer.hpp"

namespace autolibra {

// Environment fault during an episode; carries the steps played so far.
class EpisodeError : public Error {
 public:
  EpisodeError(const std::string& message, Trajectory partial)
      : Error(ErrorCode::kEpisode, message), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

std::string default_agent_prompt();

struct AgentRunnerSpec {
  std::string environment = "key-door";
  std::vector<std::string> train_tasks = key_door_train_ids();
  std::vector<std::string> full_tasks = key_door_full_ids();
  std::size_t step_cap = 30;
  std::string prompt = default_agent_prompt();
  ModelRole role = RoleModels{}.agent;
};

// Throws InvalidArgumentError unless train ⊆ full, full non-empty and
// step_cap >= 1.
void validate_spec(const AgentRunnerSpec& spec);

// "<task id>: <description>", the Trajectory.task of key-door episodes.
std::string episode_task_text(const GridTask& task);
// Task id back out of episode_task_text; empty when absent.
std::string episode_task_id(const Trajectory& t);

ModelRequest agent_action_request(const AgentRunnerSpec& spec,
                                  const GridTask& task, std::size_t step,
                                  const std::string& observation,
                                  const std::vector<std::string>& previous,
                                  std::size_t sample);

// One episode; `sample` distinguishes repeated plays of the same task and
// is sent as the seed hint. The success flag is set by the environment.
Trajectory run_episode(const Gateway& gateway, const AgentRunnerSpec& spec,
                       const std::string& task_id, std::size_t sample = 0,
                       const std::string& trajectory_id = "");

struct ImproverOptions {
  ModelRole role = RoleModels{}.improver;
};

ModelRequest improve_prompt_request(const std::string& current,
                                    const MetricSet& ms,
                                    const std::vector<Trajectory>& trajectories,
                                    const std::vector<Rating>& ratings,
                                    const ImproverOptions& options);

// Rewritten prompt; the current prompt when the model answers empty.
std::string improve_prompt(const Gateway& gateway, const std::string& current,
                           const MetricSet& ms,
                           const std::vector<Trajectory>& trajectories,
                           const std::vector<Rating>& ratings,
                           const ImproverOptions& options = {});

// "p-" + 16 hex digits of the prompt's SHA-256.
std::string prompt_digest(const std::string& prompt);

// Supplies human (or synthetic) feedback for a stage's sampled trajectories.
class FeedbackSource {
 public:
  virtual ~FeedbackSource() = default;
  virtual std::vector<Feedback> collect(
      std::size_t stage, const std::vector<Trajectory>& sampled) = 0;
};

// Reads <dir>/stage<k>_feedback.jsonl. When it does not exist, writes the
// sampled trajectories to <dir>/stage<k>_trajectories.jsonl for annotation
// and returns nothing.
class FileFeedbackSource : public FeedbackSource {
 public:
  explicit FileFeedbackSource(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::vector<Feedback> collect(std::size_t stage,
                                const std::vector<Trajectory>& sampled) override;

 private:
  std::filesystem::path dir_;
};

// Rule-based annotator that replays each episode and comments on the key,
// the door, wall bumps and the outcome. For offline runs.
class SyntheticFeedbackSource : public FeedbackSource {
 public:
  std::vector<Feedback> collect(std::size_t stage,
                                const std::vector<Trajectory>& sampled) override;
};

struct LadderConfig {
  std::size_t stages = 3;
  std::size_t inner_iterations = 4;
  std::size_t trajectories_per_task = 3;
  std::int64_t seed = 0;
  std::size_t max_parallel = 4;
  OptimizerConfig optimizer;
  ClusteringOptions clustering;
  GroundingOptions grounding;
  EvaluationOptions evaluation;
  ImproverOptions improver;
};

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based within the stage
  std::string prompt_digest;
  std::vector<std::pair<std::string, OptFraction>> metric_scores;
  Fraction mean_score;
  Fraction success_rate;
  Fraction running_max_mean;
  Fraction cumulative_avg_mean;
};

struct StageRecord {
  std::size_t stage = 0;  // 1-based
  std::string metric_set_id;
  std::vector<IterationRecord> iterations;
  std::size_t annotations = 0;
};

// State carried across stages.
struct LadderState {
  std::string prompt;
  std::optional<MetricSet> metric_set;
  std::optional<Fraction> running_max;
  Fraction score_sum;
  std::size_t score_count = 0;
  std::map<std::string, std::string> prompts;  // digest -> text
  std::vector<MetricSet> metric_sets;
};

// Mean over the defined per-metric scores; 0 when none is defined.
Fraction mean_metric_score(
    const std::vector<std::pair<std::string, OptFraction>>& scores);

// One stage. Throws StageInputError when a sampled trajectory has no
// feedback.
StageRecord run_stage(const Gateway& gateway, const AgentRunnerSpec& spec,
                      std::size_t stage, const LadderConfig& config,
                      FeedbackSource& feedback, LadderState& state);

struct LadderRun {
  std::vector<StageRecord> stages;
  LadderState state;
};

LadderRun run_ladder(const Gateway& gateway, const AgentRunnerSpec& spec,
                     const LadderConfig& config, FeedbackSource& feedback);

// CSV: stage,iteration,mean_score,running_max,cumulative_avg,success_rate
// with 4-decimal values.
std::string ladder_report(const std::vector<StageRecord>& stages);

Json ladder_run_json(const LadderRun& run);

}  // namespace autolibra

#endif  // AUTOLIBRA_LADDER_LADDER_HPP_
