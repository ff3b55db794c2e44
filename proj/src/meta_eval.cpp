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

#include "autolibra/meta_eval.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include <spdlog/spdlog.h>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/util.hpp"
#include "autolibra/core/validation.hpp"

namespace autolibra {
namespace {

constexpr const char* kSystemPrompt =
    "You compare human feedback with an automatic evaluation of the same AI "
    "agent trajectory. The human feedback was broken into aspects, each "
    "positive or negative. The evaluation produced traits: metrics the agent "
    "was rated positively (+1) or negatively (-1) on. For each aspect, find "
    "the best matching trait: one that describes the same behavior with the "
    "same sign. A positive aspect can only match a positive trait and a "
    "negative aspect only a negative trait. If no trait matches, answer an "
    "empty trait_id. Several aspects may match the same trait.";

Json matches_schema() {
  return Json::parse(R"({
    "type": "object",
    "properties": {
      "matches": {
        "type": "array",
        "items": {
          "type": "object",
          "properties": {
            "aspect_id": {"type": "string"},
            "trait_id": {"type": "string"}
          },
          "required": ["aspect_id", "trait_id"]
        }
      }
    },
    "required": ["matches"]
  })");
}

MatchRecord assemble(const std::string& trajectory_id,
                     const std::string& feedback_id,
                     const std::vector<Aspect>& aspects,
                     const std::vector<Trait>& traits,
                     const std::map<std::string, std::string>& chosen) {
  MatchRecord rec;
  rec.trajectory_id = trajectory_id;
  rec.feedback_id = feedback_id;
  std::set<std::string> used;
  for (const auto& a : aspects) {
    MatchPair p{a.id, std::nullopt};
    if (auto it = chosen.find(a.id); it != chosen.end()) {
      for (const auto& t : traits) {
        if (t.metric_id == it->second) {
          p.trait = t;
          used.insert(t.metric_id);
          break;
        }
      }
    }
    rec.pairs.push_back(std::move(p));
  }
  for (const auto& t : traits) {
    if (!used.count(t.metric_id)) rec.unmatched_traits.push_back(t);
  }
  return rec;
}

}  // namespace

ModelRequest matching_request(const std::vector<Aspect>& aspects,
                              const std::vector<Trait>& traits,
                              const MetricSet* ms,
                              const MatchingOptions& options) {
  Json a = Json::array();
  for (const auto& x : aspects) {
    a.push_back({{"id", x.id},
                 {"sign", std::string(to_string(x.sign))},
                 {"feedback", x.feedback_text},
                 {"behavior", x.behavior.excerpt}});
  }
  Json t = Json::array();
  for (const auto& x : traits) {
    Json entry = {{"id", x.metric_id},
                  {"polarity", std::string(to_string(x.polarity))}};
    if (const Metric* m = ms ? ms->find(x.metric_id) : nullptr) {
      entry["name"] = m->name;
      entry["definition"] = m->definition;
      entry["good_examples"] = m->good_examples;
      entry["bad_examples"] = m->bad_examples;
    }
    t.push_back(std::move(entry));
  }
  ModelRequest req;
  req.model_name = options.role.model;
  req.temperature = options.role.temperature;
  req.messages.push_back({Role::kSystem, kSystemPrompt});
  req.messages.push_back(
      {Role::kUser, with_payload("Match each aspect to its best trait.",
                                 {{"aspects", a}, {"traits", t}})});
  req.output_schema = OutputSchema{"matches", matches_schema()};
  return req;
}

MatchRecord match_instance(const Gateway& gateway,
                           const std::string& trajectory_id,
                           const std::string& feedback_id,
                           const std::vector<Aspect>& aspects,
                           const std::vector<Trait>& traits,
                           const MetricSet* ms,
                           const MatchingOptions& options) {
  std::map<std::string, std::string> chosen;
  if (!aspects.empty() && !traits.empty()) {
    ModelResponse resp =
        gateway.complete(matching_request(aspects, traits, ms, options));
    std::map<std::string, const Aspect*> aspect_by_id;
    for (const auto& a : aspects) aspect_by_id[a.id] = &a;
    std::map<std::string, const Trait*> trait_by_id;
    for (const auto& t : traits) trait_by_id[t.metric_id] = &t;
    for (const auto& m : resp.structured->at("matches")) {
      const std::string aid = m["aspect_id"].get<std::string>();
      const std::string tid = m["trait_id"].get<std::string>();
      auto a = aspect_by_id.find(aid);
      if (a == aspect_by_id.end() || chosen.count(aid) || tid.empty()) continue;
      auto t = trait_by_id.find(tid);
      if (t == trait_by_id.end()) {
        spdlog::warn("matcher proposed unknown trait \"{}\" for aspect {}", tid,
                     aid);
        continue;
      }
      if (t->second->polarity != a->second->sign) {
        spdlog::warn("matcher proposed sign-inconsistent pair ({}, {}); discarded",
                     aid, tid);
        continue;
      }
      chosen[aid] = tid;
    }
  }
  return assemble(trajectory_id, feedback_id, aspects, traits, chosen);
}

MatchRecord oracle_match(const std::string& trajectory_id,
                         const std::string& feedback_id,
                         const std::vector<Aspect>& aspects,
                         const std::vector<Trait>& traits,
                         const SimilarityRelation& relation) {
  std::vector<const Aspect*> order;
  for (const auto& a : aspects) order.push_back(&a);
  std::sort(order.begin(), order.end(),
            [](const Aspect* x, const Aspect* y) { return x->id < y->id; });
  std::vector<std::vector<std::string>> options(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& t : traits) {
      if (t.polarity == order[i]->sign && relation.count({order[i]->id, t.metric_id})) {
        options[i].push_back(t.metric_id);
      }
    }
    std::sort(options[i].begin(), options[i].end());
  }

  using Pairs = std::vector<std::pair<std::string, std::string>>;
  Pairs current, best;
  bool have_best = false;
  std::function<void(std::size_t)> search = [&](std::size_t i) {
    if (i == order.size()) {
      if (!have_best || current.size() > best.size() ||
          (current.size() == best.size() && current < best)) {
        best = current;
        have_best = true;
      }
      return;
    }
    for (const auto& tid : options[i]) {
      current.emplace_back(order[i]->id, tid);
      search(i + 1);
      current.pop_back();
    }
    search(i + 1);  // leave aspect i unmatched
  };
  search(0);

  std::map<std::string, std::string> chosen(best.begin(), best.end());
  return assemble(trajectory_id, feedback_id, aspects, traits, chosen);
}

QualityReport quality_report(const std::vector<MatchRecord>& records,
                             const std::string& metric_set_id, Split split) {
  QualityReport r;
  r.metric_set_id = metric_set_id;
  r.split = split;
  r.per_instance = records;
  for (const auto& rec : records) {
    r.counts.aspects_total += rec.pairs.size();
    r.counts.aspects_matched += rec.matched_aspects();
    const std::size_t traits = rec.trait_count();
    r.counts.traits_total += traits;
    r.counts.traits_unmatched += rec.unmatched_traits.size();
    if (rec.pairs.empty() && traits > 0) {
      r.flagged_instances.push_back(rec.trajectory_id);
    }
  }
  if (r.counts.aspects_total == 0) {
    throw EmptyEvaluationError("no aspects in the " +
                               std::string(to_string(split)) + " split");
  }
  r.coverage = Fraction(static_cast<std::int64_t>(r.counts.aspects_matched),
                        static_cast<std::int64_t>(r.counts.aspects_total));
  if (r.counts.traits_total > 0) {
    r.redundancy =
        Fraction(static_cast<std::int64_t>(r.counts.traits_unmatched),
                 static_cast<std::int64_t>(r.counts.traits_total));
  }
  return r;
}

Evaluation evaluate_metric_set(const Gateway& gateway,
                               const std::vector<Instance>& instances,
                               const MetricSet& ms, Split split,
                               const EvaluationOptions& options) {
  if (instances.empty()) {
    throw EmptyEvaluationError("no instances in the " +
                               std::string(to_string(split)) + " split");
  }
  std::vector<Trajectory> trajectories;
  for (const auto& inst : instances) trajectories.push_back(inst.trajectory);

  Evaluation out;
  auto per_traj = parallel_map<std::vector<Rating>>(
      instances.size(), options.max_parallel, [&](std::size_t i) {
        return judge_trajectory(gateway, trajectories[i], ms, options.judging);
      });
  out.records = parallel_map<MatchRecord>(
      instances.size(), options.max_parallel, [&](std::size_t i) {
        const auto& inst = instances[i];
        return match_instance(gateway, inst.trajectory.id, inst.feedback.id,
                              inst.aspects, derive_traits(per_traj[i]), &ms,
                              options.matching);
      });
  for (auto& v : per_traj) {
    out.ratings.insert(out.ratings.end(), v.begin(), v.end());
  }
  out.report = quality_report(out.records, ms.id, split);
  return out;
}

}  // namespace autolibra
