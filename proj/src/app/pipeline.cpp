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

#include "autolibra/app/pipeline.hpp"

#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "autolibra/clustering.hpp"
#include "autolibra/core/errors.hpp"
#include "autolibra/core/json_io.hpp"
#include "autolibra/grounding.hpp"
#include "autolibra/llm/backends.hpp"

namespace fs = std::filesystem;

namespace autolibra {
namespace {

void add_metric_set(RunBundle& b, const MetricSet& ms) {
  for (const auto& m : b.metric_sets) {
    if (m.id == ms.id) return;
  }
  b.metric_sets.push_back(ms);
}

std::vector<Aspect> flatten(const std::vector<Instance>& instances) {
  std::vector<Aspect> out;
  for (const auto& inst : instances) {
    out.insert(out.end(), inst.aspects.begin(), inst.aspects.end());
  }
  return out;
}

Json report_summary(const QualityReport& r) {
  return {{"split", std::string(to_string(r.split))},
          {"metric_set_id", r.metric_set_id},
          {"coverage", r.coverage.rounded(4)},
          {"redundancy", r.redundancy ? Json(r.redundancy->rounded(4)) : Json(nullptr)},
          {"aspects_total", r.counts.aspects_total},
          {"aspects_matched", r.counts.aspects_matched},
          {"traits_total", r.counts.traits_total},
          {"traits_unmatched", r.counts.traits_unmatched},
          {"instances", r.per_instance.size()},
          {"flagged_instances", r.flagged_instances}};
}

}  // namespace

Session::Session(fs::path workspace, AppConfig config,
                 std::shared_ptr<ModelBackend> backend)
    : ws_(std::move(workspace)), config_(std::move(config)), backend_(std::move(backend)) {
  if (!backend_ && config_.cassette_mode != CassetteMode::kReplay) {
    if (config_.provider == "offline") {
      backend_ = make_offline_backend();
    } else if (config_.provider == "http") {
      backend_ = HttpBackend::from_env();
    } else {
      throw InvalidArgumentError("unknown provider \"" + config_.provider +
                                 "\" (expected offline or http)");
    }
  }
}

const Gateway& Session::gateway(const std::string& run_id) {
  std::lock_guard<std::mutex> lock(gateways_mu_);
  auto it = gateways_.find(run_id);
  if (it != gateways_.end()) return *it->second;
  GatewayOptions opts;
  opts.mode = config_.cassette_mode;
  opts.transport_retries = config_.transport_retries;
  opts.structured_attempts = config_.structured_attempts;
  if (!config_.cassette.empty()) {
    opts.cassette_path = config_.cassette;
  } else {
    fs::create_directories(ws_.run_dir(run_id));
    opts.cassette_path = ws_.run_dir(run_id) / "cassette.jsonl";
  }
  auto gw = std::make_unique<Gateway>(backend_, opts);
  const Gateway& ref = *gw;
  gateways_.emplace(run_id, std::move(gw));
  return ref;
}

ImportResult Session::ingest_trajectories(const fs::path& path) {
  return ws_.import_trajectories(path);
}

ImportResult Session::ingest_feedback(const fs::path& path) {
  return ws_.import_feedback(path);
}

SplitAssignment Session::split(double fraction, std::int64_t seed) {
  std::vector<std::string> ids;
  for (const auto& t : ws_.trajectories()) ids.push_back(t.id);
  auto s = split_holdout(std::move(ids), fraction, seed);
  ws_.write_split(s);
  return s;
}

std::vector<Aspect> Session::ground(const std::string& run_id) {
  auto pairs = ws_.annotated_pairs(Split::kAll);
  if (pairs.empty()) throw StageInputError("no annotated trajectories to ground");
  GroundingOptions go;
  go.role = config_.roles.grounder;
  auto per = ground_all(gateway(run_id), pairs, go, config_.max_parallel);
  std::vector<Aspect> all;
  for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
  ws_.write_aspects(all);
  RunBundle b = open_run(run_id);
  save_run(b);
  return all;
}

MetricSet Session::cluster(const std::string& run_id, std::size_t n) {
  auto aspects = flatten(ws_.instances(default_split()));
  if (aspects.empty()) throw StageInputError("no grounded aspects; run ground first");
  MetricSet ms = cluster_aspects(gateway(run_id), aspects, n, config_.seed,
                                 clustering_options());
  RunBundle b = open_run(run_id);
  add_metric_set(b, ms);
  save_run(b);
  return ms;
}

MetricSet Session::iterate(const std::string& run_id, const MetricSet& parent) {
  auto aspects = flatten(ws_.instances(default_split()));
  if (aspects.empty()) throw StageInputError("no grounded aspects; run ground first");
  MetricSet ms = cluster_iterative(gateway(run_id), aspects, parent, config_.seed,
                                   clustering_options());
  RunBundle b = open_run(run_id);
  add_metric_set(b, parent);
  add_metric_set(b, ms);
  save_run(b);
  return ms;
}

Session::JudgeOutcome Session::judge(const std::string& run_id, const MetricSet& ms,
                                     Split split) {
  std::vector<Trajectory> trajs = ws_.trajectories();
  if (split != Split::kAll) {
    const auto s = ws_.split();
    const auto& keep = split == Split::kTrain ? s.train : s.holdout;
    std::set<std::string> ids(keep.begin(), keep.end());
    std::erase_if(trajs, [&](const Trajectory& t) { return !ids.count(t.id); });
  }
  if (trajs.empty()) throw StageInputError("no trajectories to judge");
  JudgeOutcome out;
  out.ratings = judge_all(gateway(run_id), trajs, ms, evaluation_options().judging,
                          config_.max_parallel);
  out.scores = scores_json(tally_scores(out.ratings, ms));
  RunBundle b = open_run(run_id);
  add_metric_set(b, ms);
  b.ratings = out.ratings;
  b.scores = out.scores;
  save_run(b);
  return out;
}

Evaluation Session::metaeval(const std::string& run_id, const MetricSet& ms,
                             Split split) {
  auto instances = ws_.instances(split);
  Evaluation ev = evaluate_metric_set(gateway(run_id), instances, ms, split,
                                      evaluation_options());
  RunBundle b = open_run(run_id);
  add_metric_set(b, ms);
  b.ratings = ev.ratings;
  b.matches = ev.records;
  if (split == Split::kHoldout) {
    b.report_holdout = ev.report;
  } else {
    b.report = ev.report;
  }
  save_run(b);
  return ev;
}

OptimizeResult Session::optimize(const std::string& run_id) {
  OptimizerConfig oc = config_.optimizer;
  oc.seed = config_.seed;
  OptimizeOptions oo{clustering_options(), evaluation_options()};
  const Gateway& gw = gateway(run_id);
  OptimizeResult res = autolibra::optimize(gw, ws_.instances(default_split()), oc, oo);

  RunBundle b = open_run(run_id);
  for (const auto& r : res.history) {
    for (const auto& c : r.candidates) add_metric_set(b, c.metric_set);
  }
  b.ratings = res.ratings;
  b.matches = res.report.per_instance;
  b.report = res.report;
  b.optimize_history = optimize_history_json(res);
  if (ws_.has_split()) {
    auto holdout = ws_.instances(Split::kHoldout);
    if (holdout.empty()) {
      spdlog::warn("holdout split has no annotated trajectories; no holdout report");
    } else {
      b.report_holdout = evaluate_holdout(gw, res.metric_set, holdout, evaluation_options());
    }
  }
  save_run(b);
  return res;
}

LadderRun Session::ladder(const std::string& run_id, FeedbackSource& feedback) {
  AgentRunnerSpec spec;
  spec.step_cap = config_.ladder_step_cap;
  spec.role = config_.roles.agent;
  LadderConfig lc;
  lc.stages = config_.ladder_stages;
  lc.inner_iterations = config_.ladder_inner_iterations;
  lc.trajectories_per_task = config_.ladder_trajectories_per_task;
  lc.seed = config_.seed;
  lc.max_parallel = config_.max_parallel;
  lc.optimizer = config_.optimizer;
  lc.optimizer.seed = config_.seed;
  lc.clustering = clustering_options();
  lc.grounding.role = config_.roles.grounder;
  lc.evaluation = evaluation_options();
  lc.improver.role = config_.roles.improver;
  LadderRun run = run_ladder(gateway(run_id), spec, lc, feedback);

  RunBundle b = open_run(run_id);
  for (const auto& ms : run.state.metric_sets) add_metric_set(b, ms);
  b.ladder_run = ladder_run_json(run);
  b.ladder_report_csv = ladder_report(run.stages);
  save_run(b);
  return run;
}

Json Session::report(const std::string& run_id) const {
  RunBundle b = load_run(ws_, run_id);
  Json sets = Json::array();
  for (const auto& ms : b.metric_sets) {
    sets.push_back({{"id", ms.id},
                    {"n", ms.metrics.size()},
                    {"parent_id", ms.parent_id ? Json(*ms.parent_id) : Json(nullptr)}});
  }
  Json out = {{"run_id", b.run_id},
              {"metric_sets", std::move(sets)},
              {"ratings", b.ratings.size()}};
  if (b.scores) out["scores"] = *b.scores;
  if (b.report) out["report"] = report_summary(*b.report);
  if (b.report_holdout) out["report_holdout"] = report_summary(*b.report_holdout);
  if (b.optimize_history) {
    const Json& h = *b.optimize_history;
    out["optimize"] = {{"rounds", h.at("rounds").size()},
                       {"selected_metric_set_id", h.at("selected_metric_set_id")},
                       {"converged", h.at("converged")},
                       {"stop_reason", h.at("stop_reason")}};
  }
  if (b.ladder_run) {
    out["ladder"] = {{"stages", b.ladder_run->at("stages").size()},
                     {"final_prompt_digest", b.ladder_run->at("final_prompt_digest")}};
  }
  return out;
}

MetricSet Session::resolve_metric_set(const std::string& path_or_id) const {
  std::error_code ec;
  if (fs::is_regular_file(path_or_id, ec)) {
    try {
      return read_json_file(path_or_id).get<MetricSet>();
    } catch (const Json::exception& e) {
      throw ParseError(path_or_id + ": " + e.what());
    }
  }
  if (fs::is_directory(ws_.runs_dir(), ec)) {
    std::vector<fs::path> runs;
    for (const auto& d : fs::directory_iterator(ws_.runs_dir())) runs.push_back(d.path());
    std::sort(runs.begin(), runs.end());
    for (const auto& r : runs) {
      const fs::path p = r / "metricsets" / (path_or_id + ".json");
      if (fs::is_regular_file(p, ec)) return read_json_file(p).get<MetricSet>();
    }
  }
  throw NotFoundError("no metric set file or id \"" + path_or_id + "\"");
}

RunBundle Session::open_run(const std::string& run_id) const {
  try {
    return load_run(ws_, run_id);
  } catch (const NotFoundError&) {
    RunBundle b;
    b.run_id = run_id;
    return b;
  }
}

void Session::save_run(RunBundle& b) {
  b.config = app_config_to_json(config_);
  if (config_.cassette.empty() && config_.cassette_mode != CassetteMode::kLive) {
    b.cassette = "cassette.jsonl";
  }
  persist_run(ws_, b);
}

Split Session::default_split() const {
  return ws_.has_split() ? Split::kTrain : Split::kAll;
}

EvaluationOptions Session::evaluation_options() const {
  EvaluationOptions o;
  o.judging.role = config_.roles.judge;
  o.matching.role = config_.roles.matcher;
  o.max_parallel = config_.max_parallel;
  return o;
}

ClusteringOptions Session::clustering_options() const {
  ClusteringOptions o;
  o.role = config_.roles.clusterer;
  o.scope_noun_a = config_.scope_noun_a;
  o.scope_noun_b = config_.scope_noun_b;
  return o;
}

}  // namespace autolibra
