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

// Pipeline stages over a workspace, each persisting its artifacts under
// runs/<run_id>/. This is what the CLI and the C API drive.

#ifndef AUTOLIBRA_APP_PIPELINE_HPP_
#define AUTOLIBRA_APP_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "autolibra/app/config.hpp"
#include "autolibra/app/workspace.hpp"
#include "autolibra/judging.hpp"
#include "autolibra/ladder/ladder.hpp"
#include "autolibra/llm/gateway.hpp"
#include "autolibra/meta_eval.hpp"
#include "autolibra/optimizer.hpp"

namespace autolibra {

class Session {
 public:
  // `backend` overrides the configured provider (tests inject scripted
  // backends here). In replay mode no backend is needed.
  Session(std::filesystem::path workspace, AppConfig config,
          std::shared_ptr<ModelBackend> backend = nullptr);

  Workspace& workspace() { return ws_; }
  const AppConfig& config() const { return config_; }
  AppConfig& mutable_config() { return config_; }

  // Gateway bound to the run's cassette; built on first use.
  const Gateway& gateway(const std::string& run_id);

  ImportResult ingest_trajectories(const std::filesystem::path& path);
  ImportResult ingest_feedback(const std::filesystem::path& path);
  SplitAssignment split(double fraction, std::int64_t seed);

  // Grounds every annotated trajectory and replaces aspects.jsonl.
  std::vector<Aspect> ground(const std::string& run_id);

  // One metric set of n metrics from the train aspects (all aspects when
  // the workspace has no split).
  MetricSet cluster(const std::string& run_id, std::size_t n);
  MetricSet iterate(const std::string& run_id, const MetricSet& parent);

  struct JudgeOutcome {
    std::vector<Rating> ratings;
    Json scores;
  };
  JudgeOutcome judge(const std::string& run_id, const MetricSet& ms, Split split);

  Evaluation metaeval(const std::string& run_id, const MetricSet& ms, Split split);

  // Optimizer on the train split, then the holdout report when a holdout
  // exists with annotations.
  OptimizeResult optimize(const std::string& run_id);

  LadderRun ladder(const std::string& run_id, FeedbackSource& feedback);

  // Summary of a persisted run.
  Json report(const std::string& run_id) const;

  // A metric set by file path, or by id among the runs of the workspace.
  MetricSet resolve_metric_set(const std::string& path_or_id) const;

 private:
  RunBundle open_run(const std::string& run_id) const;
  void save_run(RunBundle& bundle);
  Split default_split() const;
  EvaluationOptions evaluation_options() const;
  ClusteringOptions clustering_options() const;

  Workspace ws_;
  AppConfig config_;
  std::shared_ptr<ModelBackend> backend_;
  std::mutex gateways_mu_;
  std::map<std::string, std::unique_ptr<Gateway>> gateways_;
};

}  // namespace autolibra

#endif  // AUTOLIBRA_APP_PIPELINE_HPP_
