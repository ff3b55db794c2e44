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

#include "autolibra/judging.hpp"

#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/util.hpp"

namespace autolibra {
namespace {

constexpr const char* kSystemPrompt =
    "You are an expert evaluator of AI agent trajectories. For every metric "
    "below, rate the trajectory \"+1\" if the agent shows the positive "
    "behavior the metric defines, \"-1\" if it shows the negative behavior, "
    "or \"na\" if the metric does not apply to this trajectory. The good and "
    "bad examples illustrate each metric. Give a short rationale for every "
    "rating, citing steps where possible.";

Json ratings_schema() {
  return Json::parse(R"({
    "type": "object",
    "properties": {
      "ratings": {
        "type": "array",
        "items": {
          "type": "object",
          "properties": {
            "metric_id": {"type": "string"},
            "value": {"type": "string", "enum": ["+1", "-1", "na"]},
            "rationale": {"type": "string"}
          },
          "required": ["metric_id", "value", "rationale"]
        }
      }
    },
    "required": ["ratings"]
  })");
}

struct Counts {
  std::size_t pos = 0, neg = 0, na = 0;
};

Counts count_for(const std::vector<Rating>& ratings, const std::string& id) {
  Counts c;
  for (const auto& r : ratings) {
    if (r.metric_id != id) continue;
    switch (r.value) {
      case RatingValue::kPlusOne: ++c.pos; break;
      case RatingValue::kMinusOne: ++c.neg; break;
      case RatingValue::kNotApplicable: ++c.na; break;
    }
  }
  return c;
}

}  // namespace

ModelRequest judging_request(const Trajectory& t, const MetricSet& ms,
                             const JudgingOptions& options) {
  Json metrics = Json::array();
  for (const auto& m : ms.metrics) {
    metrics.push_back({{"id", m.id},
                       {"name", m.name},
                       {"definition", m.definition},
                       {"good_examples", m.good_examples},
                       {"bad_examples", m.bad_examples}});
  }
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back(render_step(s));
  // The success flag is deliberately absent.
  Json payload = {{"trajectory_id", t.id},
                  {"task", t.task},
                  {"steps", steps},
                  {"metrics", metrics}};
  ModelRequest req;
  req.model_name = options.role.model;
  req.temperature = options.role.temperature;
  req.messages.push_back({Role::kSystem, kSystemPrompt});
  req.messages.push_back(
      {Role::kUser, with_payload("Rate this trajectory on every metric.", payload)});
  req.output_schema = OutputSchema{"ratings", ratings_schema()};
  return req;
}

std::vector<Rating> judge_trajectory(const Gateway& gateway, const Trajectory& t,
                                     const MetricSet& ms,
                                     const JudgingOptions& options) {
  if (ms.metrics.empty()) throw InvalidArgumentError("empty metric set");
  ModelRequest req = judging_request(t, ms, options);
  for (int attempt = 0;; ++attempt) {
    ModelResponse resp = gateway.complete(req);
    std::map<std::string, const Json*> by_metric;
    for (const auto& r : resp.structured->at("ratings")) {
      const std::string id = r["metric_id"].get<std::string>();
      if (!ms.find(id)) {
        spdlog::warn("judge rated unknown metric \"{}\"; ignored", id);
        continue;
      }
      by_metric.try_emplace(id, &r);
    }
    std::vector<std::string> missing;
    for (const auto& m : ms.metrics) {
      if (!by_metric.count(m.id)) missing.push_back(m.id);
    }
    if (missing.empty()) {
      std::vector<Rating> out;
      for (const auto& m : ms.metrics) {
        const Json& r = *by_metric.at(m.id);
        out.push_back({t.id, m.id,
                       parse_rating_value(r["value"].get<std::string>()),
                       r["rationale"].get<std::string>()});
      }
      return out;
    }
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    if (attempt >= options.schema_retries) {
      throw JudgeSchemaError("judge omitted metrics for trajectory " + t.id +
                             ": " + list);
    }
    req.messages.push_back({Role::kAssistant, resp.text});
    req.messages.push_back(
        {Role::kUser, "You did not rate these metrics: " + list +
                          ". Rate every metric exactly once."});
  }
}

std::vector<Rating> judge_all(const Gateway& gateway,
                              const std::vector<Trajectory>& trajectories,
                              const MetricSet& ms, const JudgingOptions& options,
                              std::size_t max_parallel) {
  auto per = parallel_map<std::vector<Rating>>(
      trajectories.size(), max_parallel, [&](std::size_t i) {
        return judge_trajectory(gateway, trajectories[i], ms, options);
      });
  std::vector<Rating> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

OptFraction metric_score(const std::vector<Rating>& ratings,
                         const std::string& metric_id) {
  Counts c = count_for(ratings, metric_id);
  if (c.pos + c.neg == 0) return std::nullopt;
  return Fraction(static_cast<std::int64_t>(c.pos),
                  static_cast<std::int64_t>(c.pos + c.neg));
}

OptFraction failure_rate(const std::vector<Rating>& ratings,
                         const std::string& metric_id) {
  Counts c = count_for(ratings, metric_id);
  if (c.pos + c.neg == 0) return std::nullopt;
  return Fraction(static_cast<std::int64_t>(c.neg),
                  static_cast<std::int64_t>(c.pos + c.neg));
}

std::vector<std::pair<std::string, MetricTally>> tally_scores(
    const std::vector<Rating>& ratings, const MetricSet& ms) {
  std::vector<std::pair<std::string, MetricTally>> out;
  for (const auto& m : ms.metrics) {
    Counts c = count_for(ratings, m.id);
    MetricTally t;
    t.n_pos = c.pos;
    t.n_neg = c.neg;
    t.n_na = c.na;
    t.score = metric_score(ratings, m.id);
    t.failure_rate = failure_rate(ratings, m.id);
    out.emplace_back(m.id, t);
  }
  return out;
}

Json scores_json(const std::vector<std::pair<std::string, MetricTally>>& tallies) {
  Json out = Json::object();
  auto frac = [](const OptFraction& f) {
    return f ? Json(f->rounded(4)) : Json(nullptr);
  };
  for (const auto& [id, t] : tallies) {
    out[id] = {{"score", frac(t.score)},
               {"failure_rate", frac(t.failure_rate)},
               {"n_pos", t.n_pos},
               {"n_neg", t.n_neg},
               {"n_na", t.n_na}};
  }
  return out;
}

}  // namespace autolibra
