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

#include "autolibra/clustering.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include <spdlog/spdlog.h>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/json_io.hpp"
#include "autolibra/core/util.hpp"

namespace autolibra {
namespace {

std::string granularity_instruction(const ClusteringOptions& o) {
  return "The granularity of the grouping should be minimal; only very "
         "similar behaviors are grouped together; but don't limit to one "
         "particular " + o.scope_noun_a + " or one particular " +
         o.scope_noun_b + ".";
}

Json metric_items_schema(bool with_id) {
  Json props = {
      {"name", {{"type", "string"}}},
      {"definition", {{"type", "string"}}},
      {"good_examples", {{"type", "array"}, {"items", {{"type", "string"}}}}},
      {"bad_examples", {{"type", "array"}, {"items", {{"type", "string"}}}}}};
  Json required = {"name", "definition", "good_examples", "bad_examples"};
  if (with_id) {
    props["id"] = {{"type", "string"}};
    required.push_back("id");
  }
  return {{"type", "object"},
          {"properties",
           {{"metrics",
             {{"type", "array"},
              {"items",
               {{"type", "object"},
                {"properties", props},
                {"required", required}}}}}}},
          {"required", {"metrics"}}};
}

Json aspect_entry(const Aspect& a, const std::string& key) {
  return {{"key", key},
          {"sign", std::string(to_string(a.sign))},
          {"feedback", a.feedback_text},
          {"behavior", a.behavior.excerpt}};
}

std::size_t estimate_tokens(const std::string& s) { return (s.size() + 3) / 4; }

// Resolves cited keys to excerpts, dropping unknown keys and duplicates.
std::vector<std::string> resolve_examples(
    const Json& keys, const std::map<std::string, std::string>& excerpt_by_key,
    std::vector<std::string> into = {}) {
  for (const auto& k : keys) {
    const std::string key = k.get<std::string>();
    auto it = excerpt_by_key.find(key);
    if (it == excerpt_by_key.end()) {
      spdlog::warn("clustering output cites unknown aspect key \"{}\"", key);
      continue;
    }
    if (std::find(into.begin(), into.end(), it->second) == into.end()) {
      into.push_back(it->second);
    }
  }
  return into;
}

std::map<std::string, std::string> excerpt_index(const PresentedAspects& p) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < p.aspects.size(); ++i) {
    out[p.keys[i]] = p.aspects[i]->behavior.excerpt;
  }
  return out;
}

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out;
  for (const auto& i : issues) out += "- " + i + "\n";
  return out;
}

}  // namespace

PresentedAspects present_aspects(const std::vector<Aspect>& aspects,
                                 std::int64_t seed,
                                 const ClusteringOptions& options) {
  std::vector<const Aspect*> order;
  for (const auto& a : aspects) order.push_back(&a);
  deterministic_shuffle(order, static_cast<std::uint64_t>(seed));

  std::vector<const Aspect*> pos, neg;
  for (const Aspect* a : order) {
    (a->sign == Polarity::kPositive ? pos : neg).push_back(a);
  }
  PresentedAspects out;
  out.total = aspects.size();
  std::size_t used = 0, ip = 0, in = 0;
  bool pos_open = true, neg_open = true;
  auto take = [&](std::vector<const Aspect*>& list, std::size_t& idx,
                  bool& open) {
    if (!open || idx >= list.size()) {
      open = false;
      return;
    }
    const Aspect* a = list[idx];
    std::size_t cost = estimate_tokens(aspect_entry(*a, "a000").dump());
    if (used + cost > options.token_budget) {
      open = false;
      return;
    }
    used += cost;
    ++idx;
    out.aspects.push_back(a);
  };
  while (pos_open || neg_open) {
    take(pos, ip, pos_open);
    take(neg, in, neg_open);
  }
  if (out.aspects.size() * 2 < out.total) {
    throw InvalidArgumentError(
        "clustering prompt budget admits only " +
        std::to_string(out.aspects.size()) + " of " +
        std::to_string(out.total) + " aspects (below 50%)");
  }
  if (out.aspects.size() < out.total) {
    spdlog::warn("clustering prompt truncated to {} of {} aspects",
                 out.aspects.size(), out.total);
  }
  for (std::size_t i = 0; i < out.aspects.size(); ++i) {
    out.keys.push_back("a" + std::to_string(i + 1));
  }
  return out;
}

ModelRequest clustering_request(const PresentedAspects& presented,
                                std::size_t n, std::int64_t seed,
                                const ClusteringOptions& options) {
  Json items = Json::array();
  for (std::size_t i = 0; i < presented.aspects.size(); ++i) {
    items.push_back(aspect_entry(*presented.aspects[i], presented.keys[i]));
  }
  const std::string system =
      "You induce evaluation metrics for AI agents from grounded human "
      "feedback. Each aspect is a behavior of an agent together with what a "
      "human said about it and whether it was praised (positive) or "
      "criticized (negative).\n"
      "Group the aspects into exactly " + std::to_string(n) +
      " metrics. A positive and a negative aspect about the same dimension of "
      "behavior belong to the same metric. " + granularity_instruction(options) +
      "\nFor each metric give a short \"name\", a \"definition\" summarizing "
      "the criteria of positive behavior, and cite aspect keys in "
      "\"good_examples\" (positive behaviors) and \"bad_examples\" (negative "
      "behaviors). Every metric needs at least one example.";
  ModelRequest req;
  req.model_name = options.role.model;
  req.temperature = options.role.temperature;
  req.seed_hint = seed;
  req.messages.push_back({Role::kSystem, system});
  req.messages.push_back(
      {Role::kUser,
       with_payload("Cluster these aspects into " + std::to_string(n) +
                        " metrics.",
                    {{"n", n}, {"aspects", items}})});
  req.output_schema = OutputSchema{"metric_set", metric_items_schema(false)};
  return req;
}

MetricSet cluster_aspects(const Gateway& gateway,
                          const std::vector<Aspect>& aspects, std::size_t n,
                          std::int64_t seed, const ClusteringOptions& options,
                          std::int64_t candidate_index) {
  if (aspects.empty()) throw InvalidArgumentError("no aspects to cluster");
  if (n < 1) throw InvalidArgumentError("metric count must be >= 1");

  PresentedAspects presented = present_aspects(aspects, seed, options);
  const auto excerpts = excerpt_index(presented);
  ModelRequest req = clustering_request(presented, n, seed, options);

  int cardinality_retries = 0, schema_retries = 0;
  for (;;) {
    ModelResponse resp = gateway.complete(req);
    const Json& metrics = resp.structured->at("metrics");
    std::vector<std::string> issues;
    bool cardinality = false;
    if (metrics.size() != n) {
      cardinality = true;
      issues.push_back("you returned " + std::to_string(metrics.size()) +
                       " metrics; return exactly " + std::to_string(n));
    } else {
      for (std::size_t i = 0; i < metrics.size(); ++i) {
        const Json& m = metrics[i];
        if (normalize_whitespace(m["definition"].get<std::string>()).empty()) {
          issues.push_back("metric " + std::to_string(i + 1) +
                           " has an empty definition");
        }
        if (normalize_whitespace(m["name"].get<std::string>()).empty()) {
          issues.push_back("metric " + std::to_string(i + 1) + " has no name");
        }
        if (resolve_examples(m["good_examples"], excerpts).empty() &&
            resolve_examples(m["bad_examples"], excerpts).empty()) {
          issues.push_back("metric " + std::to_string(i + 1) +
                           " cites no valid aspect key");
        }
      }
    }
    if (issues.empty()) {
      MetricSet ms;
      ms.requested_n = n;
      ms.provenance = {seed, candidate_index, false};
      std::vector<std::string> taken;
      for (const auto& m : metrics) {
        Metric metric;
        metric.name = normalize_whitespace(m["name"].get<std::string>());
        metric.id = unique_slug(metric.name, taken);
        metric.definition = normalize_whitespace(m["definition"].get<std::string>());
        metric.good_examples = resolve_examples(m["good_examples"], excerpts);
        metric.bad_examples = resolve_examples(m["bad_examples"], excerpts);
        ms.metrics.push_back(std::move(metric));
      }
      ms.id = compute_metric_set_id(ms);
      return ms;
    }
    if (cardinality) {
      if (cardinality_retries++ >= options.cardinality_retries) {
        throw CardinalityError("clusterer returned " +
                               std::to_string(metrics.size()) +
                               " metrics instead of " + std::to_string(n) +
                               " after " + std::to_string(options.cardinality_retries) +
                               " re-prompts");
      }
    } else if (schema_retries++ >= options.schema_retries) {
      throw SchemaError("clusterer output invalid after re-prompt:\n" +
                        join_issues(issues));
    }
    req.messages.push_back({Role::kAssistant, resp.text});
    req.messages.push_back(
        {Role::kUser, "Please fix these problems and answer again:\n" +
                          join_issues(issues)});
  }
}

MetricSet cluster_iterative(const Gateway& gateway,
                            const std::vector<Aspect>& aspects,
                            const MetricSet& existing, std::int64_t seed,
                            const ClusteringOptions& options) {
  if (auto v = validate_metric_set(existing); !v.ok()) {
    throw ValidationError("existing metric set invalid: " + v.summary());
  }
  PresentedAspects presented = present_aspects(aspects, seed, options);
  const auto excerpts = excerpt_index(presented);

  Json existing_json = Json::array();
  for (const auto& m : existing.metrics) {
    existing_json.push_back(
        {{"id", m.id}, {"name", m.name}, {"definition", m.definition}});
  }
  Json items = Json::array();
  for (std::size_t i = 0; i < presented.aspects.size(); ++i) {
    items.push_back(aspect_entry(*presented.aspects[i], presented.keys[i]));
  }
  const std::string system =
      "You maintain a set of evaluation metrics for AI agents. You are given "
      "the existing metrics and new grounded aspects of agent behavior.\n"
      "Do not change the definitions of the existing metrics. Only add new "
      "behaviors to the existing metrics (cite aspect keys as good_examples "
      "or bad_examples), and add new metrics if necessary. " +
      granularity_instruction(options) +
      "\nReturn every existing metric with its \"id\", \"name\" and "
      "\"definition\" copied exactly, followed by any new metrics with an "
      "empty \"id\".";
  ModelRequest req;
  req.model_name = options.role.model;
  req.temperature = options.role.temperature;
  req.seed_hint = seed;
  req.messages.push_back({Role::kSystem, system});
  req.messages.push_back(
      {Role::kUser,
       with_payload("Extend the metric set with these aspects.",
                    {{"existing_metrics", existing_json}, {"aspects", items}})});
  req.output_schema = OutputSchema{"iterative_metric_set", metric_items_schema(true)};

  int frozen_retries = 0, schema_retries = 0;
  for (;;) {
    ModelResponse resp = gateway.complete(req);
    const Json& metrics = resp.structured->at("metrics");
    std::map<std::string, const Json*> by_id;
    std::vector<const Json*> fresh;
    for (const auto& m : metrics) {
      const std::string id = m["id"].get<std::string>();
      if (!id.empty() && existing.find(id) && !by_id.count(id)) {
        by_id[id] = &m;
      } else {
        fresh.push_back(&m);
      }
    }
    std::vector<std::string> frozen_issues, schema_issues;
    for (const auto& m : existing.metrics) {
      auto it = by_id.find(m.id);
      if (it == by_id.end()) {
        frozen_issues.push_back("existing metric \"" + m.id + "\" is missing");
        continue;
      }
      const Json& out = *it->second;
      if (normalize_whitespace(out["name"].get<std::string>()) !=
              normalize_whitespace(m.name) ||
          normalize_whitespace(out["definition"].get<std::string>()) !=
              normalize_whitespace(m.definition)) {
        frozen_issues.push_back("existing metric \"" + m.id +
                                "\" was changed; copy its name and definition "
                                "exactly");
      }
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      const Json& m = *fresh[i];
      if (normalize_whitespace(m["definition"].get<std::string>()).empty() ||
          normalize_whitespace(m["name"].get<std::string>()).empty()) {
        schema_issues.push_back("new metric " + std::to_string(i + 1) +
                                " needs a name and a definition");
      }
      if (resolve_examples(m["good_examples"], excerpts).empty() &&
          resolve_examples(m["bad_examples"], excerpts).empty()) {
        schema_issues.push_back("new metric " + std::to_string(i + 1) +
                                " cites no valid aspect key");
      }
    }
    if (frozen_issues.empty() && schema_issues.empty()) {
      MetricSet child;
      child.parent_id = existing.id;
      child.provenance = {seed, 0, existing.provenance.ablation};
      std::vector<std::string> taken;
      for (const auto& m : existing.metrics) {
        const Json& out = *by_id.at(m.id);
        Metric kept = m;
        kept.good_examples =
            resolve_examples(out["good_examples"], excerpts, kept.good_examples);
        kept.bad_examples =
            resolve_examples(out["bad_examples"], excerpts, kept.bad_examples);
        taken.push_back(kept.id);
        child.metrics.push_back(std::move(kept));
      }
      for (const Json* m : fresh) {
        Metric metric;
        metric.name = normalize_whitespace((*m)["name"].get<std::string>());
        metric.id = unique_slug(metric.name, taken);
        metric.definition =
            normalize_whitespace((*m)["definition"].get<std::string>());
        metric.good_examples = resolve_examples((*m)["good_examples"], excerpts);
        metric.bad_examples = resolve_examples((*m)["bad_examples"], excerpts);
        child.metrics.push_back(std::move(metric));
      }
      child.requested_n = child.metrics.size();
      child.id = compute_metric_set_id(child);
      return child;
    }
    if (!frozen_issues.empty()) {
      if (frozen_retries++ >= options.frozen_retries) {
        throw FrozenDefinitionError("clusterer altered frozen metrics:\n" +
                                    join_issues(frozen_issues));
      }
    } else if (schema_retries++ >= options.schema_retries) {
      throw SchemaError("iterative clustering output invalid:\n" +
                        join_issues(schema_issues));
    }
    std::vector<std::string> all = frozen_issues;
    all.insert(all.end(), schema_issues.begin(), schema_issues.end());
    req.messages.push_back({Role::kAssistant, resp.text});
    req.messages.push_back(
        {Role::kUser, "Please fix these problems and answer again:\n" +
                          join_issues(all)});
  }
}

MetricSet strip_examples(const MetricSet& ms) {
  if (ms.provenance.ablation) return ms;
  MetricSet out = ms;
  for (auto& m : out.metrics) {
    m.good_examples.clear();
    m.bad_examples.clear();
  }
  out.provenance.ablation = true;
  out.id = ms.id + "-noex";
  return out;
}

std::string compute_metric_set_id(const MetricSet& ms) {
  Json j = ms;
  j.erase("id");
  return content_id("ms-", {j.dump()}, 12);
}

ValidationOutcome validate_metric_set(const MetricSet& ms) {
  ValidationOutcome out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < ms.metrics.size(); ++i) {
    const Metric& m = ms.metrics[i];
    const std::string path = "metrics[" + std::to_string(i) + "]";
    if (m.id.empty()) out.violations.push_back({path + ".id", "id empty"});
    if (!ids.insert(m.id).second) {
      out.violations.push_back({path + ".id", "duplicate metric id"});
    }
    if (normalize_whitespace(m.definition).empty()) {
      out.violations.push_back({path + ".definition", "definition empty"});
    }
    if (!ms.provenance.ablation && m.good_examples.empty() &&
        m.bad_examples.empty()) {
      out.violations.push_back({path, "no examples"});
    }
  }
  if (ms.metrics.empty()) out.violations.push_back({"metrics", "metrics empty"});
  return out;
}

}  // namespace autolibra
