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

#include "autolibra/core/model.hpp"

#include <set>
#include <string>
#include <utility>

#include "autolibra/core/errors.hpp"

namespace autolibra {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kSplit: return "split_error";
    case ErrorCode::kCassetteMiss: return "cassette_miss";
    case ErrorCode::kTransport: return "transport_error";
    case ErrorCode::kStructuredOutput: return "structured_output_error";
    case ErrorCode::kGrounding: return "grounding_error";
    case ErrorCode::kCardinality: return "cardinality_error";
    case ErrorCode::kSchema: return "schema_error";
    case ErrorCode::kFrozenDefinition: return "frozen_definition_error";
    case ErrorCode::kJudgeSchema: return "judge_schema_error";
    case ErrorCode::kEmptyEvaluation: return "empty_evaluation_error";
    case ErrorCode::kOptimizer: return "optimizer_error";
    case ErrorCode::kEpisode: return "episode_error";
    case ErrorCode::kStageInput: return "stage_input_error";
    case ErrorCode::kCorruptRatings: return "corrupt_ratings_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kInternal: return "internal_error";
  }
  return "unknown";
}

std::string_view to_string(Polarity p) {
  return p == Polarity::kPositive ? "positive" : "negative";
}

Polarity parse_polarity(std::string_view s) {
  if (s == "positive") return Polarity::kPositive;
  if (s == "negative") return Polarity::kNegative;
  throw ParseError("sign must be \"positive\" or \"negative\", got \"" +
                   std::string(s) + "\"");
}

const Metric* MetricSet::find(std::string_view metric_id) const {
  for (const auto& m : metrics) {
    if (m.id == metric_id) return &m;
  }
  return nullptr;
}

std::string_view to_string(RatingValue v) {
  switch (v) {
    case RatingValue::kPlusOne: return "+1";
    case RatingValue::kMinusOne: return "-1";
    case RatingValue::kNotApplicable: return "na";
  }
  return "na";
}

RatingValue parse_rating_value(std::string_view s) {
  if (s == "+1" || s == "1") return RatingValue::kPlusOne;
  if (s == "-1") return RatingValue::kMinusOne;
  if (s == "na" || s == "N/A" || s == "n/a") return RatingValue::kNotApplicable;
  throw ParseError("rating value must be \"+1\", \"-1\" or \"na\", got \"" +
                   std::string(s) + "\"");
}

std::size_t MatchRecord::matched_aspects() const {
  std::size_t n = 0;
  for (const auto& p : pairs) n += p.trait.has_value();
  return n;
}

std::size_t MatchRecord::trait_count() const {
  std::set<std::pair<std::string, std::string>> matched;
  for (const auto& p : pairs) {
    if (p.trait) matched.emplace(p.trait->trajectory_id, p.trait->metric_id);
  }
  return matched.size() + unmatched_traits.size();
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kHoldout: return "holdout";
    case Split::kAll: return "all";
  }
  return "all";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "holdout") return Split::kHoldout;
  if (s == "all") return Split::kAll;
  throw ParseError("split must be train, holdout or all, got \"" +
                   std::string(s) + "\"");
}

}  // namespace autolibra
