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

#include "autolibra/grounding.hpp"

#include <set>
#include <string>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/util.hpp"

namespace autolibra {
namespace {

constexpr const char* kSystemPrompt =
    "You analyze feedback that a human wrote after watching an AI agent "
    "complete a task.\n"
    "(1) Break down the feedback into bullet points.\n"
    "(2) For each bullet point, find the corresponding part of the trajectory "
    "to which the feedback refers.\n"
    "For every bullet point return: \"feedback\" (the bullet point), \"sign\" "
    "(\"positive\" if the human praises the behavior, \"negative\" if they "
    "criticize it), \"step_start\" and \"step_end\" (inclusive 0-based step "
    "indices of the referenced behavior) and \"excerpt\" (text copied from "
    "those steps).";

Json aspects_schema() {
  return Json::parse(R"({
    "type": "object",
    "properties": {
      "aspects": {
        "type": "array",
        "items": {
          "type": "object",
          "properties": {
            "feedback": {"type": "string"},
            "sign": {"type": "string", "enum": ["positive", "negative"]},
            "step_start": {"type": "integer"},
            "step_end": {"type": "integer"},
            "excerpt": {"type": "string"}
          },
          "required": ["feedback", "sign", "step_start", "step_end", "excerpt"]
        }
      }
    },
    "required": ["aspects"]
  })");
}

// Problems that the single repair re-prompt may fix.
std::vector<std::string> repairable_issues(const Json& aspects,
                                           std::size_t step_count,
                                           std::size_t max_aspects,
                                           bool* bounds, bool* count) {
  std::vector<std::string> issues;
  if (aspects.size() > max_aspects) {
    *count = true;
    issues.push_back("returned " + std::to_string(aspects.size()) +
                     " aspects; at most " + std::to_string(max_aspects) +
                     " are allowed");
  }
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    auto start = aspects[i]["step_start"].get<std::int64_t>();
    auto end = aspects[i]["step_end"].get<std::int64_t>();
    if (start < 0 || end < start ||
        end >= static_cast<std::int64_t>(step_count)) {
      *bounds = true;
      issues.push_back("aspect " + std::to_string(i) + " references steps [" +
                       std::to_string(start) + ", " + std::to_string(end) +
                       "] but valid indices are 0.." +
                       std::to_string(step_count - 1) +
                       " with step_start <= step_end");
    }
  }
  return issues;
}

}  // namespace

ModelRequest grounding_request(const Trajectory& t, const Feedback& f,
                               const GroundingOptions& options) {
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back(render_step(s));
  Json payload = {{"task", t.task},
                  {"step_count", t.steps.size()},
                  {"steps", steps},
                  {"feedback", f.text}};
  ModelRequest req;
  req.model_name = options.role.model;
  req.temperature = options.role.temperature;
  req.messages.push_back({Role::kSystem, kSystemPrompt});
  req.messages.push_back(
      {Role::kUser, with_payload("Ground this feedback in the trajectory.", payload)});
  req.output_schema = OutputSchema{"aspects", aspects_schema()};
  return req;
}

std::vector<Aspect> ground_feedback(const Gateway& gateway, const Trajectory& t,
                                    const Feedback& f,
                                    const GroundingOptions& options) {
  if (f.trajectory_id != t.id) {
    throw InvalidArgumentError("feedback " + f.id + " belongs to trajectory " +
                               f.trajectory_id + ", not " + t.id);
  }
  if (auto v = validate_trajectory(t); !v.ok()) {
    throw ValidationError("trajectory " + t.id + " invalid: " + v.summary());
  }
  if (normalize_whitespace(f.text).empty()) {
    throw InvalidArgumentError("feedback " + f.id + " is empty");
  }

  ModelRequest req = grounding_request(t, f, options);
  Json aspects;
  for (int attempt = 0;; ++attempt) {
    ModelResponse resp = gateway.complete(req);
    aspects = resp.structured->at("aspects");
    if (aspects.empty()) {
      throw EmptyGroundingError("no aspects found in feedback " + f.id);
    }
    bool bounds = false, count = false;
    auto issues = repairable_issues(aspects, t.steps.size(),
                                    options.max_aspects, &bounds, &count);
    if (issues.empty()) break;
    std::string joined;
    for (const auto& i : issues) joined += "- " + i + "\n";
    if (attempt >= 1) {
      if (bounds) {
        throw GroundingBoundsError("feedback " + f.id +
                                   ": step references still out of bounds "
                                   "after repair:\n" + joined);
      }
      throw GroundingCountError("feedback " + f.id +
                                ": too many aspects after repair:\n" + joined);
    }
    req.messages.push_back({Role::kAssistant, resp.text});
    req.messages.push_back(
        {Role::kUser, "Please fix these problems and answer again:\n" + joined});
  }

  std::vector<Aspect> out;
  std::set<std::string> ids;
  for (const auto& a : aspects) {
    Aspect aspect;
    aspect.feedback_id = f.id;
    aspect.trajectory_id = t.id;
    aspect.sign = parse_polarity(a["sign"].get<std::string>());
    aspect.feedback_text = normalize_whitespace(a["feedback"].get<std::string>());
    aspect.behavior.step_start = a["step_start"].get<std::size_t>();
    aspect.behavior.step_end = a["step_end"].get<std::size_t>();
    const std::string referenced = referenced_text(
        t, aspect.behavior.step_start, aspect.behavior.step_end);
    std::string excerpt = normalize_whitespace(a["excerpt"].get<std::string>());
    if (excerpt.empty() || referenced.find(excerpt) == std::string::npos) {
      excerpt = truncate_words(referenced, options.max_excerpt_chars);
    }
    aspect.behavior.excerpt = excerpt;
    const std::string base = content_id(
        "asp-", {f.id, to_string(aspect.sign), aspect.feedback_text,
                 std::to_string(aspect.behavior.step_start),
                 std::to_string(aspect.behavior.step_end)});
    aspect.id = base;
    for (int k = 2; !ids.insert(aspect.id).second; ++k) {
      aspect.id = base + "-" + std::to_string(k);
    }
    out.push_back(std::move(aspect));
  }
  return out;
}

std::vector<std::vector<Aspect>> ground_all(
    const Gateway& gateway,
    const std::vector<std::pair<Trajectory, Feedback>>& instances,
    const GroundingOptions& options, std::size_t max_parallel) {
  return parallel_map<std::vector<Aspect>>(
      instances.size(), max_parallel, [&](std::size_t i) {
        return ground_feedback(gateway, instances[i].first, instances[i].second,
                               options);
      });
}

ValidationOutcome validate_aspects(const std::vector<Aspect>& aspects,
                                   const Trajectory& t,
                                   std::size_t max_aspects) {
  ValidationOutcome out;
  if (aspects.empty() || aspects.size() > max_aspects) {
    out.violations.push_back(
        {"aspects", "count outside [1, " + std::to_string(max_aspects) + "]"});
  } else if (aspects.size() > kTypicalMaxAspects) {
    out.warnings.push_back({"aspects", "above typical range"});
  }
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    const auto& a = aspects[i];
    const std::string path = "aspects[" + std::to_string(i) + "]";
    if (a.trajectory_id != t.id) {
      out.violations.push_back({path + ".trajectory_id", "wrong trajectory"});
    }
    if (a.behavior.step_start > a.behavior.step_end ||
        a.behavior.step_end >= t.steps.size()) {
      out.violations.push_back({path + ".behavior", "step range out of bounds"});
    }
    if (a.sign != Polarity::kPositive && a.sign != Polarity::kNegative) {
      out.violations.push_back({path + ".sign", "bad sign"});
    }
  }
  return out;
}

}  // namespace autolibra
