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

// On-disk workspace:
//
//   <root>/trajectories.jsonl  feedback.jsonl  feedback_audit.jsonl
//   <root>/aspects.jsonl  split.json
//   <root>/runs/<run_id>/{run.json, metricsets/, ratings.jsonl, matches.jsonl,
//                         scores.json,
//                         report.json, report_holdout.json,
//                         optimize_history.json, ladder_run.json,
//                         ladder_report.csv, cassette.jsonl}
//
// All files are plain JSON / JSONL in the core-model formats. Writes from
// one process go through a single mutex; files are replaced atomically.

#ifndef AUTOLIBRA_APP_WORKSPACE_HPP_
#define AUTOLIBRA_APP_WORKSPACE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autolibra/core/model.hpp"
#include "autolibra/llm/gateway.hpp"
#include "autolibra/meta_eval.hpp"

namespace autolibra {

struct SplitAssignment {
  double fraction = 0.2;
  std::int64_t seed = 0;
  std::vector<std::string> train;    // sorted
  std::vector<std::string> holdout;  // sorted

  bool operator==(const SplitAssignment&) const = default;
};

// Holdout size is round-half-up of fraction * |ids|. Throws SplitError for
// fewer than 2 ids or a fraction outside (0, 1).
SplitAssignment split_holdout(std::vector<std::string> ids, double fraction,
                              std::int64_t seed);

Json split_to_json(const SplitAssignment& s);
SplitAssignment split_from_json(const Json& j);

struct ImportResult {
  std::size_t count = 0;
  std::vector<std::string> warnings;
};

struct FeedbackWrite {
  Feedback feedback;
  bool replaced = false;
};

class Workspace {
 public:
  // Creates the directory if needed.
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path trajectories_path() const;
  std::filesystem::path feedback_path() const;
  std::filesystem::path audit_path() const;
  std::filesystem::path aspects_path() const;
  std::filesystem::path split_path() const;
  std::filesystem::path runs_dir() const;
  std::filesystem::path run_dir(const std::string& run_id) const;

  // Validates and adds trajectories from a JSONL file. Duplicate ids (in
  // the file or already stored) throw ValidationError naming the lines;
  // malformed lines throw ParseError with the line number.
  ImportResult import_trajectories(const std::filesystem::path& src);
  // Adds feedback records; each must reference a stored trajectory and
  // carry non-empty text.
  ImportResult import_feedback(const std::filesystem::path& src);

  std::vector<Trajectory> trajectories() const;
  std::optional<Trajectory> find_trajectory(const std::string& id) const;
  std::vector<Feedback> feedback() const;

  // One feedback per (trajectory, annotator): a second submission replaces
  // the first and both are recorded in feedback_audit.jsonl.
  FeedbackWrite put_feedback(const std::string& trajectory_id,
                             const std::string& annotator,
                             const std::string& text,
                             const std::string& created_at);

  std::vector<Aspect> aspects() const;
  void write_aspects(const std::vector<Aspect>& aspects);

  bool has_split() const;
  SplitAssignment split() const;  // NotFoundError when absent
  void write_split(const SplitAssignment& s);

  // Trajectories of the split that have feedback, each with the earliest
  // (created_at, id) feedback and the aspects grounded from it.
  std::vector<Instance> instances(Split split) const;
  // (trajectory, feedback) pairs of the split, for grounding.
  std::vector<std::pair<Trajectory, Feedback>> annotated_pairs(Split split) const;

 private:
  std::vector<std::string> split_ids(Split split) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
};

struct RunBundle {
  std::string run_id;
  Json config = Json::object();
  std::vector<MetricSet> metric_sets;
  std::vector<Rating> ratings;
  std::vector<MatchRecord> matches;
  std::optional<Json> scores;
  std::optional<QualityReport> report;
  std::optional<QualityReport> report_holdout;
  std::optional<Json> optimize_history;
  std::optional<Json> ladder_run;
  std::optional<std::string> ladder_report_csv;
  // Cassette file name relative to the run directory, if any.
  std::optional<std::string> cassette;

  bool operator==(const RunBundle&) const = default;
};

// Writes every present artifact of the bundle under runs/<run_id>/.
void persist_run(const Workspace& ws, const RunBundle& bundle);
// Throws NotFoundError for an unknown run id.
RunBundle load_run(const Workspace& ws, const std::string& run_id);

}  // namespace autolibra

#endif  // AUTOLIBRA_APP_WORKSPACE_HPP_
