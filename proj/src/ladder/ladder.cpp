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

#include "autolibra/ladder/ladder.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "autolibra/core/json_io.hpp"
#include "autolibra/core/util.hpp"
#include "autolibra/judging.hpp"

namespace autolibra {
namespace {

constexpr const char* kImproverSystem =
    "You improve the instructions given to an AI agent that plays a text "
    "grid game. You see the agent's current instructions, the evaluation "
    "metrics, and one recent trajectory per task with the agent's rating on "
    "every metric (+1 good, -1 bad, na not applicable) and a rationale. "
    "Rewrite the instructions so the agent does better on the metrics it "
    "failed, without losing what it already does well. Answer with the full "
    "new instructions.";

Json agent_action_schema() {
  Json s = {{"type", "object"},
            {"properties",
             {{"action", {{"type", "string"}, {"enum", grid_action_names()}}}}},
            {"required", {"action"}}};
  return s;
}

Json improved_prompt_schema() {
  return Json::parse(R"({
    "type": "object",
    "properties": {"prompt": {"type": "string"}},
    "required": ["prompt"]
  })");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::int64_t stage_seed(const LadderConfig& cfg, std::size_t stage) {
  return static_cast<std::int64_t>(
      derive_seed(static_cast<std::uint64_t>(cfg.seed), {stage}) >> 1);
}

// Earliest (created_at, id) feedback per trajectory.
std::map<std::string, Feedback> first_feedback(const std::vector<Feedback>& fbs) {
  std::map<std::string, Feedback> out;
  for (const auto& f : fbs) {
    auto it = out.find(f.trajectory_id);
    if (it == out.end() ||
        std::tie(f.created_at, f.id) < std::tie(it->second.created_at, it->second.id)) {
      out[f.trajectory_id] = f;
    }
  }
  return out;
}

}  // namespace

std::string default_agent_prompt() {
  return "You are playing a text grid game. Each turn you see the map and "
         "must choose one action: north, south, east, west, pickup or open.";
}

void validate_spec(const AgentRunnerSpec& spec) {
  if (spec.full_tasks.empty()) throw InvalidArgumentError("empty full task set");
  if (spec.step_cap < 1) throw InvalidArgumentError("step_cap must be >= 1");
  const std::set<std::string> full(spec.full_tasks.begin(), spec.full_tasks.end());
  for (const auto& t : spec.train_tasks) {
    if (!full.count(t)) {
      throw InvalidArgumentError("train task " + t + " is not in the full set");
    }
  }
}

std::string episode_task_text(const GridTask& task) {
  return task.id + ": " + task.description;
}

std::string episode_task_id(const Trajectory& t) {
  const auto colon = t.task.find(':');
  return colon == std::string::npos ? "" : t.task.substr(0, colon);
}

ModelRequest agent_action_request(const AgentRunnerSpec& spec,
                                  const GridTask& task, std::size_t step,
                                  const std::string& observation,
                                  const std::vector<std::string>& previous,
                                  std::size_t sample) {
  ModelRequest req;
  req.model_name = spec.role.model;
  req.temperature = spec.role.temperature;
  req.seed_hint = static_cast<std::int64_t>(sample);
  req.messages.push_back({Role::kSystem, spec.prompt});
  req.messages.push_back(
      {Role::kUser, with_payload("Choose your next action.",
                                 {{"task", task.description},
                                  {"step", step},
                                  {"observation", observation},
                                  {"previous_actions", previous}})});
  req.output_schema = OutputSchema{"agent_action", agent_action_schema()};
  return req;
}

Trajectory run_episode(const Gateway& gateway, const AgentRunnerSpec& spec,
                       const std::string& task_id, std::size_t sample,
                       const std::string& trajectory_id) {
  if (std::find(spec.full_tasks.begin(), spec.full_tasks.end(), task_id) ==
      spec.full_tasks.end()) {
    throw InvalidArgumentError("task " + task_id + " is not in the full set");
  }
  const GridTask& task = find_key_door_task(task_id);
  KeyDoorEnv env(task);
  Trajectory t;
  t.id = trajectory_id.empty()
             ? "ep-" + task_id + "-" + std::to_string(sample) + "-" +
                   prompt_digest(spec.prompt).substr(2, 8)
             : trajectory_id;
  t.task = episode_task_text(task);
  t.agent = spec.role.model;
  t.source = spec.environment;
  t.success = false;
  std::vector<std::string> previous;
  for (std::size_t i = 0; i < spec.step_cap && !env.success(); ++i) {
    const std::string obs = env.observation();
    ModelResponse resp;
    try {
      resp = gateway.complete(
          agent_action_request(spec, task, i, obs, previous, sample));
    } catch (const StructuredOutputError& e) {
      t.success = env.success();
      throw EpisodeError("no valid action at step " + std::to_string(i) + " of " +
                             task_id + ": " + e.what(),
                         t);
    }
    const std::string name = resp.structured->value("action", "");
    auto action = parse_grid_action(name);
    if (!action) {
      t.success = env.success();
      throw EpisodeError("invalid action \"" + name + "\" at step " +
                             std::to_string(i) + " of " + task_id,
                         t);
    }
    t.steps.push_back({i, obs, name});
    env.step(*action);
    previous.push_back(name);
  }
  t.success = env.success();
  return t;
}

ModelRequest improve_prompt_request(const std::string& current,
                                    const MetricSet& ms,
                                    const std::vector<Trajectory>& trajectories,
                                    const std::vector<Rating>& ratings,
                                    const ImproverOptions& options) {
  Json metrics = Json::array();
  for (const auto& m : ms.metrics) {
    metrics.push_back({{"id", m.id}, {"name", m.name}, {"definition", m.definition}});
  }
  Json trajs = Json::array();
  for (const auto& t : trajectories) {
    Json steps = Json::array();
    for (const auto& s : t.steps) steps.push_back(render_step(s));
    Json rs = Json::array();
    for (const auto& r : ratings) {
      if (r.trajectory_id != t.id) continue;
      rs.push_back({{"metric_id", r.metric_id},
                    {"value", std::string(to_string(r.value))},
                    {"rationale", r.rationale}});
    }
    // No success flag: only the metric ratings drive the rewrite.
    trajs.push_back({{"task", t.task}, {"steps", steps}, {"ratings", rs}});
  }
  ModelRequest req;
  req.model_name = options.role.model;
  req.temperature = options.role.temperature;
  req.messages.push_back({Role::kSystem, kImproverSystem});
  req.messages.push_back(
      {Role::kUser, with_payload("Improve the agent instructions.",
                                 {{"current_prompt", current},
                                  {"metrics", metrics},
                                  {"trajectories", trajs}})});
  req.output_schema = OutputSchema{"improved_prompt", improved_prompt_schema()};
  return req;
}

std::string improve_prompt(const Gateway& gateway, const std::string& current,
                           const MetricSet& ms,
                           const std::vector<Trajectory>& trajectories,
                           const std::vector<Rating>& ratings,
                           const ImproverOptions& options) {
  ModelResponse resp = gateway.complete(
      improve_prompt_request(current, ms, trajectories, ratings, options));
  std::string next = trim(resp.structured->value("prompt", ""));
  if (next.empty()) {
    spdlog::warn("improver returned an empty prompt; keeping the current one");
    return current;
  }
  return next;
}

std::string prompt_digest(const std::string& prompt) {
  return "p-" + sha256_hex(prompt).substr(0, 16);
}

std::vector<Feedback> FileFeedbackSource::collect(
    std::size_t stage, const std::vector<Trajectory>& sampled) {
  const auto fb_path = dir_ / ("stage" + std::to_string(stage) + "_feedback.jsonl");
  if (!std::filesystem::exists(fb_path)) {
    const auto out = dir_ / ("stage" + std::to_string(stage) + "_trajectories.jsonl");
    std::filesystem::create_directories(dir_);
    write_jsonl(out, sampled);
    spdlog::warn("no feedback at {}; wrote {} trajectories to {} for annotation",
                 fb_path.string(), sampled.size(), out.string());
    return {};
  }
  return read_jsonl_as<Feedback>(fb_path);
}

std::vector<Feedback> SyntheticFeedbackSource::collect(
    std::size_t, const std::vector<Trajectory>& sampled) {
  std::vector<Feedback> out;
  for (const auto& t : sampled) {
    std::string text;
    const std::string id = episode_task_id(t);
    int key_step = -1, door_step = -1, locked_tries = -1, bumps = 0;
    try {
      KeyDoorEnv env(find_key_door_task(id));
      for (const auto& s : t.steps) {
        auto a = parse_grid_action(s.action);
        if (!a) continue;
        const std::string ev = env.step(*a);
        const int k = static_cast<int>(s.index);
        if (ev == "picked up the key" && key_step < 0) key_step = k;
        if (ev == "opened the door" && door_step < 0) door_step = k;
        if (ev == "the door is locked and you have no key" && locked_tries < 0) {
          locked_tries = k;
        }
        if (ev.rfind("bumped", 0) == 0) ++bumps;
      }
    } catch (const NotFoundError&) {
      // Not a key-door episode: only the outcome is commented on.
    }
    if (key_step >= 0) {
      text += "Good: the agent picked up the key at step " +
              std::to_string(key_step) + ". ";
    } else {
      text += "Bad: the agent never picked up the key. ";
    }
    if (locked_tries >= 0) {
      text += "Bad: at step " + std::to_string(locked_tries) +
              " it tried to open the door without the key. ";
    }
    if (door_step >= 0) {
      text += "Good: it opened the door at step " + std::to_string(door_step) + ". ";
    }
    if (bumps > 0) {
      text += "Bad: it walked into walls or the locked door " +
              std::to_string(bumps) + " times, wasting moves. ";
    }
    if (t.success.value_or(false)) {
      text += "Good: it reached the goal in " + std::to_string(t.steps.size()) +
              " steps.";
    } else {
      text += "Bad: it did not reach the goal before the step limit.";
    }
    Feedback f;
    f.trajectory_id = t.id;
    f.annotator = "synthetic";
    f.text = text;
    f.created_at = "1970-01-01T00:00:00Z";
    f.id = content_id("fb-", {t.id, f.annotator});
    out.push_back(std::move(f));
  }
  return out;
}

Fraction mean_metric_score(
    const std::vector<std::pair<std::string, OptFraction>>& scores) {
  Fraction sum;
  std::int64_t n = 0;
  for (const auto& [id, s] : scores) {
    if (!s) continue;
    sum = sum + *s;
    ++n;
  }
  return n == 0 ? Fraction() : sum / Fraction::of(n);
}

StageRecord run_stage(const Gateway& gateway, const AgentRunnerSpec& spec_in,
                      std::size_t stage, const LadderConfig& config,
                      FeedbackSource& feedback, LadderState& state) {
  validate_spec(spec_in);
  if (config.inner_iterations < 1) {
    throw InvalidArgumentError("inner_iterations must be >= 1");
  }
  AgentRunnerSpec spec = spec_in;
  if (state.prompt.empty()) state.prompt = spec.prompt;
  spec.prompt = state.prompt;
  state.prompts[prompt_digest(spec.prompt)] = spec.prompt;
  const std::size_t par = config.max_parallel;
  const std::string sp = "s" + std::to_string(stage);

  // (a) sample and annotate.
  struct Job {
    std::string task;
    std::size_t sample;
  };
  std::vector<Job> jobs;
  for (const auto& task : spec.train_tasks) {
    for (std::size_t s = 0; s < config.trajectories_per_task; ++s) {
      jobs.push_back({task, s});
    }
  }
  auto sampled = parallel_map<Trajectory>(jobs.size(), par, [&](std::size_t i) {
    return run_episode(gateway, spec, jobs[i].task, jobs[i].sample,
                       sp + "-a-" + jobs[i].task + "-" + std::to_string(jobs[i].sample));
  });
  auto by_traj = first_feedback(feedback.collect(stage, sampled));
  std::vector<std::string> missing;
  std::vector<std::pair<Trajectory, Feedback>> pairs;
  for (const auto& t : sampled) {
    auto it = by_traj.find(t.id);
    if (it == by_traj.end()) {
      missing.push_back(t.id);
    } else {
      pairs.emplace_back(t, it->second);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw StageInputError("stage " + std::to_string(stage) +
                          ": no feedback for " + std::to_string(missing.size()) +
                          " sampled trajectories: " + list);
  }

  // (b) ground and induce.
  auto aspects = ground_all(gateway, pairs, config.grounding, par);
  std::vector<Instance> instances;
  std::vector<Aspect> all_aspects;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    instances.push_back({pairs[i].first, pairs[i].second, aspects[i]});
    all_aspects.insert(all_aspects.end(), aspects[i].begin(), aspects[i].end());
  }
  MetricSet ms;
  if (!state.metric_set) {
    OptimizerConfig oc = config.optimizer;
    oc.seed = stage_seed(config, stage);
    ms = optimize(gateway, instances, oc, {config.clustering, config.evaluation})
             .metric_set;
  } else {
    ms = cluster_iterative(gateway, all_aspects, *state.metric_set,
                           stage_seed(config, stage), config.clustering);
  }
  state.metric_set = ms;
  state.metric_sets.push_back(ms);

  StageRecord rec;
  rec.stage = stage;
  rec.metric_set_id = ms.id;
  rec.annotations = pairs.size();

  // (c) inner loop.
  const std::set<std::string> train(spec.train_tasks.begin(), spec.train_tasks.end());
  std::optional<Fraction> best_mean;
  std::string best_prompt = spec.prompt;
  std::vector<Trajectory> best_train;
  std::vector<Rating> best_train_ratings;
  std::string current = spec.prompt;
  for (std::size_t it = 1; it <= config.inner_iterations; ++it) {
    AgentRunnerSpec run_spec = spec;
    run_spec.prompt = current;
    state.prompts[prompt_digest(current)] = current;
    const std::string ip = sp + "-i" + std::to_string(it) + "-";
    auto trajs = parallel_map<Trajectory>(
        spec.full_tasks.size(), par, [&](std::size_t i) {
          return run_episode(gateway, run_spec, spec.full_tasks[i], 0,
                             ip + spec.full_tasks[i]);
        });
    auto ratings = judge_all(gateway, trajs, ms, config.evaluation.judging, par);

    IterationRecord ir;
    ir.iteration = it;
    ir.prompt_digest = prompt_digest(current);
    for (const auto& m : ms.metrics) {
      ir.metric_scores.emplace_back(m.id, metric_score(ratings, m.id));
    }
    ir.mean_score = mean_metric_score(ir.metric_scores);
    std::int64_t wins = 0;
    for (const auto& t : trajs) wins += t.success.value_or(false) ? 1 : 0;
    ir.success_rate = Fraction(wins, static_cast<std::int64_t>(trajs.size()));
    state.running_max = state.running_max
                            ? std::max(*state.running_max, ir.mean_score)
                            : ir.mean_score;
    state.score_sum = state.score_sum + ir.mean_score;
    ++state.score_count;
    ir.running_max_mean = *state.running_max;
    ir.cumulative_avg_mean =
        state.score_sum / Fraction::of(static_cast<std::int64_t>(state.score_count));
    spdlog::info("stage {} iteration {}: mean {} success {}", stage, it,
                 ir.mean_score.to_decimal(), ir.success_rate.to_decimal());
    rec.iterations.push_back(ir);

    if (!best_mean || ir.mean_score > *best_mean) {
      best_mean = ir.mean_score;
      best_prompt = current;
      best_train.clear();
      best_train_ratings.clear();
      for (const auto& t : trajs) {
        if (!train.count(episode_task_id(t))) continue;
        best_train.push_back(t);
        for (const auto& r : ratings) {
          if (r.trajectory_id == t.id) best_train_ratings.push_back(r);
        }
      }
    }
    if (it < config.inner_iterations) {
      current = improve_prompt(gateway, best_prompt, ms, best_train,
                               best_train_ratings, config.improver);
    }
  }
  state.prompt = best_prompt;
  return rec;
}

LadderRun run_ladder(const Gateway& gateway, const AgentRunnerSpec& spec,
                     const LadderConfig& config, FeedbackSource& feedback) {
  if (config.stages < 1) throw InvalidArgumentError("stages must be >= 1");
  LadderRun run;
  run.state.prompt = spec.prompt;
  for (std::size_t s = 1; s <= config.stages; ++s) {
    run.stages.push_back(run_stage(gateway, spec, s, config, feedback, run.state));
  }
  return run;
}

std::string ladder_report(const std::vector<StageRecord>& stages) {
  std::ostringstream out;
  out << "stage,iteration,mean_score,running_max,cumulative_avg,success_rate\n";
  for (const auto& s : stages) {
    for (const auto& it : s.iterations) {
      out << s.stage << ',' << it.iteration << ',' << it.mean_score.to_decimal()
          << ',' << it.running_max_mean.to_decimal() << ','
          << it.cumulative_avg_mean.to_decimal() << ','
          << it.success_rate.to_decimal() << '\n';
    }
  }
  return out.str();
}

Json ladder_run_json(const LadderRun& run) {
  Json stages = Json::array();
  for (const auto& s : run.stages) {
    Json iters = Json::array();
    for (const auto& it : s.iterations) {
      Json scores = Json::object();
      for (const auto& [id, f] : it.metric_scores) {
        scores[id] = f ? Json(f->rounded(4)) : Json(nullptr);
      }
      iters.push_back({{"iteration", it.iteration},
                       {"prompt_digest", it.prompt_digest},
                       {"metric_scores", scores},
                       {"mean_score", it.mean_score.rounded(4)},
                       {"success_rate", it.success_rate.rounded(4)},
                       {"running_max_mean", it.running_max_mean.rounded(4)},
                       {"cumulative_avg_mean", it.cumulative_avg_mean.rounded(4)}});
    }
    stages.push_back({{"stage", s.stage},
                      {"metric_set_id", s.metric_set_id},
                      {"annotations", s.annotations},
                      {"iterations", iters}});
  }
  Json prompts = Json::object();
  for (const auto& [d, text] : run.state.prompts) prompts[d] = text;
  Json sets = Json::array();
  for (const auto& ms : run.state.metric_sets) sets.push_back(ms);
  return {{"stages", stages},
          {"prompts", prompts},
          {"final_prompt_digest", prompt_digest(run.state.prompt)},
          {"metric_sets", sets}};
}

}  // namespace autolibra
