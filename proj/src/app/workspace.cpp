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

#include "autolibra/app/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include <spdlog/spdlog.h>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/json_io.hpp"
#include "autolibra/core/util.hpp"
#include "autolibra/core/validation.hpp"

namespace fs = std::filesystem;

namespace autolibra {
namespace {

template <typename T>
std::vector<T> read_if_exists(const fs::path& p) {
  if (!fs::exists(p)) return {};
  return read_jsonl_as<T>(p);
}

template <typename T>
std::vector<std::pair<std::size_t, T>> decode_lines(const fs::path& src) {
  std::vector<std::pair<std::size_t, T>> out;
  for (const auto& row : read_jsonl(src)) {
    try {
      out.emplace_back(row.line, row.value.get<T>());
    } catch (const Error& e) {
      throw ParseError(src.string() + ":" + std::to_string(row.line) + ": " + e.what());
    } catch (const Json::exception& e) {
      throw ParseError(src.string() + ":" + std::to_string(row.line) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

SplitAssignment split_holdout(std::vector<std::string> ids, double fraction,
                              std::int64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw SplitError("holdout fraction must be in (0, 1)");
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < 2) {
    throw SplitError("need at least 2 trajectories to split, have " +
                     std::to_string(ids.size()));
  }
  const auto n_holdout = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(ids.size()) + 0.5 + 1e-9));
  deterministic_shuffle(ids, static_cast<std::uint64_t>(seed));
  SplitAssignment s;
  s.fraction = fraction;
  s.seed = seed;
  s.holdout.assign(ids.begin(), ids.begin() + n_holdout);
  s.train.assign(ids.begin() + n_holdout, ids.end());
  std::sort(s.holdout.begin(), s.holdout.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

Json split_to_json(const SplitAssignment& s) {
  return {{"fraction", s.fraction},
          {"seed", s.seed},
          {"train", s.train},
          {"holdout", s.holdout}};
}

SplitAssignment split_from_json(const Json& j) {
  SplitAssignment s;
  s.fraction = j.at("fraction").get<double>();
  s.seed = j.at("seed").get<std::int64_t>();
  s.train = j.at("train").get<std::vector<std::string>>();
  s.holdout = j.at("holdout").get<std::vector<std::string>>();
  return s;
}

Workspace::Workspace(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw IoError("cannot create workspace " + root_.string() + ": " + ec.message());
}

fs::path Workspace::trajectories_path() const { return root_ / "trajectories.jsonl"; }
fs::path Workspace::feedback_path() const { return root_ / "feedback.jsonl"; }
fs::path Workspace::audit_path() const { return root_ / "feedback_audit.jsonl"; }
fs::path Workspace::aspects_path() const { return root_ / "aspects.jsonl"; }
fs::path Workspace::split_path() const { return root_ / "split.json"; }
fs::path Workspace::runs_dir() const { return root_ / "runs"; }
fs::path Workspace::run_dir(const std::string& run_id) const {
  if (run_id.empty() || run_id.find('/') != std::string::npos || run_id == "." ||
      run_id == "..") {
    throw InvalidArgumentError("bad run id \"" + run_id + "\"");
  }
  return runs_dir() / run_id;
}

ImportResult Workspace::import_trajectories(const fs::path& src) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!fs::exists(src)) throw NotFoundError("no such file: " + src.string());
  auto rows = decode_lines<Trajectory>(src);
  ImportResult result;
  if (rows.empty()) {
    result.warnings.push_back(src.string() + " contains no trajectories");
    spdlog::warn("{} contains no trajectories", src.string());
    return result;
  }
  auto stored = read_if_exists<Trajectory>(trajectories_path());
  std::set<std::string> existing;
  for (const auto& t : stored) existing.insert(t.id);

  std::vector<std::string> problems;
  std::map<std::string, std::size_t> first_line;
  for (const auto& [line, t] : rows) {
    const std::string where = "line " + std::to_string(line);
    auto outcome = validate_trajectory(t);
    for (const auto& v : outcome.violations) {
      problems.push_back(where + ": " + v.path + ": " + v.message);
    }
    if (auto it = first_line.find(t.id); it != first_line.end()) {
      problems.push_back(where + ": duplicate trajectory id \"" + t.id +
                         "\" (first on line " + std::to_string(it->second) + ")");
    } else if (existing.count(t.id)) {
      problems.push_back(where + ": trajectory id \"" + t.id +
                         "\" already in the workspace");
    } else {
      first_line[t.id] = line;
    }
  }
  if (!problems.empty()) {
    std::string msg = src.string() + ": rejected";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  for (auto& [line, t] : rows) stored.push_back(std::move(t));
  write_jsonl(trajectories_path(), stored);
  result.count = rows.size();
  return result;
}

ImportResult Workspace::import_feedback(const fs::path& src) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!fs::exists(src)) throw NotFoundError("no such file: " + src.string());
  auto rows = decode_lines<Feedback>(src);
  ImportResult result;
  if (rows.empty()) {
    result.warnings.push_back(src.string() + " contains no feedback");
    spdlog::warn("{} contains no feedback", src.string());
    return result;
  }
  std::set<std::string> traj_ids;
  for (const auto& t : read_if_exists<Trajectory>(trajectories_path())) {
    traj_ids.insert(t.id);
  }
  auto stored = read_if_exists<Feedback>(feedback_path());
  std::set<std::string> fb_ids;
  for (const auto& f : stored) fb_ids.insert(f.id);
  std::vector<std::string> problems;
  for (const auto& [line, f] : rows) {
    const std::string where = "line " + std::to_string(line);
    if (!traj_ids.count(f.trajectory_id)) {
      problems.push_back(where + ": unknown trajectory \"" + f.trajectory_id + "\"");
    }
    if (normalize_whitespace(f.text).empty()) problems.push_back(where + ": empty text");
    if (f.id.empty()) problems.push_back(where + ": empty id");
    if (!fb_ids.insert(f.id).second) {
      problems.push_back(where + ": duplicate feedback id \"" + f.id + "\"");
    }
  }
  if (!problems.empty()) {
    std::string msg = src.string() + ": rejected";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  for (auto& [line, f] : rows) stored.push_back(std::move(f));
  write_jsonl(feedback_path(), stored);
  result.count = rows.size();
  return result;
}

std::vector<Trajectory> Workspace::trajectories() const {
  std::lock_guard<std::mutex> lock(mu_);
  return read_if_exists<Trajectory>(trajectories_path());
}

std::optional<Trajectory> Workspace::find_trajectory(const std::string& id) const {
  for (auto& t : trajectories()) {
    if (t.id == id) return std::move(t);
  }
  return std::nullopt;
}

std::vector<Feedback> Workspace::feedback() const {
  std::lock_guard<std::mutex> lock(mu_);
  return read_if_exists<Feedback>(feedback_path());
}

FeedbackWrite Workspace::put_feedback(const std::string& trajectory_id,
                                      const std::string& annotator,
                                      const std::string& text,
                                      const std::string& created_at) {
  std::lock_guard<std::mutex> lock(mu_);
  if (normalize_whitespace(text).empty()) {
    throw ValidationError("feedback text is empty");
  }
  bool known = false;
  for (const auto& t : read_if_exists<Trajectory>(trajectories_path())) {
    if (t.id == trajectory_id) {
      known = true;
      break;
    }
  }
  if (!known) throw NotFoundError("unknown trajectory \"" + trajectory_id + "\"");

  FeedbackWrite w;
  w.feedback.id = content_id("fb-", {trajectory_id, annotator});
  w.feedback.trajectory_id = trajectory_id;
  w.feedback.annotator = annotator;
  w.feedback.text = text;
  w.feedback.created_at = created_at;

  auto stored = read_if_exists<Feedback>(feedback_path());
  Json previous = nullptr;
  for (auto& f : stored) {
    if (f.trajectory_id == trajectory_id && f.annotator == annotator) {
      previous = f;
      f = w.feedback;
      w.replaced = true;
    }
  }
  if (!w.replaced) stored.push_back(w.feedback);
  write_jsonl(feedback_path(), stored);
  append_jsonl_line(audit_path(), {{"action", w.replaced ? "overwrite" : "create"},
                                   {"feedback", w.feedback},
                                   {"previous", previous},
                                   {"at", created_at}});
  return w;
}

std::vector<Aspect> Workspace::aspects() const {
  std::lock_guard<std::mutex> lock(mu_);
  return read_if_exists<Aspect>(aspects_path());
}

void Workspace::write_aspects(const std::vector<Aspect>& aspects) {
  std::lock_guard<std::mutex> lock(mu_);
  write_jsonl(aspects_path(), aspects);
}

bool Workspace::has_split() const { return fs::exists(split_path()); }

SplitAssignment Workspace::split() const {
  if (!has_split()) {
    throw NotFoundError("workspace has no split.json; run `split` first");
  }
  return split_from_json(read_json_file(split_path()));
}

void Workspace::write_split(const SplitAssignment& s) {
  std::lock_guard<std::mutex> lock(mu_);
  write_json_file(split_path(), split_to_json(s));
}

std::vector<std::string> Workspace::split_ids(Split which) const {
  if (which == Split::kAll) {
    std::vector<std::string> ids;
    for (const auto& t : trajectories()) ids.push_back(t.id);
    return ids;
  }
  SplitAssignment s = split();
  return which == Split::kTrain ? s.train : s.holdout;
}

std::vector<std::pair<Trajectory, Feedback>> Workspace::annotated_pairs(
    Split which) const {
  const auto ids = split_ids(which);
  const std::set<std::string> wanted(ids.begin(), ids.end());
  std::map<std::string, Feedback> first;
  for (const auto& f : feedback()) {
    auto it = first.find(f.trajectory_id);
    if (it == first.end() ||
        std::tie(f.created_at, f.id) < std::tie(it->second.created_at, it->second.id)) {
      first[f.trajectory_id] = f;
    }
  }
  std::vector<std::pair<Trajectory, Feedback>> out;
  for (auto& t : trajectories()) {
    if (!wanted.count(t.id)) continue;
    auto it = first.find(t.id);
    if (it == first.end()) continue;
    out.emplace_back(std::move(t), it->second);
  }
  return out;
}

std::vector<Instance> Workspace::instances(Split which) const {
  std::map<std::string, std::vector<Aspect>> by_feedback;
  for (auto& a : aspects()) by_feedback[a.feedback_id].push_back(std::move(a));
  std::vector<Instance> out;
  for (auto& [t, f] : annotated_pairs(which)) {
    Instance inst{std::move(t), f, {}};
    if (auto it = by_feedback.find(f.id); it != by_feedback.end()) {
      inst.aspects = it->second;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

void persist_run(const Workspace& ws, const RunBundle& b) {
  const fs::path dir = ws.run_dir(b.run_id);
  fs::create_directories(dir / "metricsets");
  Json manifest = {{"run_id", b.run_id}, {"config", b.config}};
  Json ids = Json::array();
  for (const auto& ms : b.metric_sets) {
    write_json_file(dir / "metricsets" / (ms.id + ".json"), ms);
    ids.push_back(ms.id);
  }
  manifest["metric_sets"] = ids;
  manifest["cassette"] = b.cassette ? Json(*b.cassette) : Json(nullptr);
  write_json_file(dir / "run.json", manifest);
  write_jsonl(dir / "ratings.jsonl", b.ratings);
  write_jsonl(dir / "matches.jsonl", b.matches);
  if (b.scores) write_json_file(dir / "scores.json", *b.scores);
  if (b.report) write_json_file(dir / "report.json", *b.report);
  if (b.report_holdout) write_json_file(dir / "report_holdout.json", *b.report_holdout);
  if (b.optimize_history) write_json_file(dir / "optimize_history.json", *b.optimize_history);
  if (b.ladder_run) write_json_file(dir / "ladder_run.json", *b.ladder_run);
  if (b.ladder_report_csv) write_text_file(dir / "ladder_report.csv", *b.ladder_report_csv);
}

RunBundle load_run(const Workspace& ws, const std::string& run_id) {
  const fs::path dir = ws.run_dir(run_id);
  if (!fs::exists(dir / "run.json")) throw NotFoundError("no run \"" + run_id + "\"");
  const Json manifest = read_json_file(dir / "run.json");
  RunBundle b;
  b.run_id = manifest.at("run_id").get<std::string>();
  b.config = manifest.value("config", Json::object());
  for (const auto& id : manifest.value("metric_sets", Json::array())) {
    b.metric_sets.push_back(
        read_json_file(dir / "metricsets" / (id.get<std::string>() + ".json"))
            .get<MetricSet>());
  }
  if (manifest.contains("cassette") && manifest["cassette"].is_string()) {
    b.cassette = manifest["cassette"].get<std::string>();
  }
  b.ratings = read_if_exists<Rating>(dir / "ratings.jsonl");
  b.matches = read_if_exists<MatchRecord>(dir / "matches.jsonl");
  if (fs::exists(dir / "scores.json")) b.scores = read_json_file(dir / "scores.json");
  if (fs::exists(dir / "report.json")) {
    b.report = read_json_file(dir / "report.json").get<QualityReport>();
  }
  if (fs::exists(dir / "report_holdout.json")) {
    b.report_holdout = read_json_file(dir / "report_holdout.json").get<QualityReport>();
  }
  if (fs::exists(dir / "optimize_history.json")) {
    b.optimize_history = read_json_file(dir / "optimize_history.json");
  }
  if (fs::exists(dir / "ladder_run.json")) {
    b.ladder_run = read_json_file(dir / "ladder_run.json");
  }
  if (fs::exists(dir / "ladder_report.csv")) {
    b.ladder_report_csv = read_text_file(dir / "ladder_report.csv");
  }
  return b;
}

}  // namespace autolibra
