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

// Shared domain types. All of them are plain values: immutable once built
// and safe to share between threads.

#ifndef AUTOLIBRA_CORE_MODEL_HPP_
#define AUTOLIBRA_CORE_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autolibra/core/fraction.hpp"

namespace autolibra {

struct Step {
  std::size_t index = 0;
  std::string observation;
  std::string action;

  bool operator==(const Step&) const = default;
};

// One agent episode.
struct Trajectory {
  std::string id;
  std::string task;
  std::string agent;
  std::string source;
  std::vector<Step> steps;
  std::optional<bool> success;

  bool operator==(const Trajectory&) const = default;
};

struct Feedback {
  std::string id;
  std::string trajectory_id;
  std::string annotator;
  std::string text;
  std::string created_at;  // ISO-8601

  bool operator==(const Feedback&) const = default;
};

// Sign of an aspect and polarity of a trait share one enum so that
// sign-consistent matching is a plain equality.
enum class Polarity { kPositive, kNegative };

std::string_view to_string(Polarity p);
Polarity parse_polarity(std::string_view s);

// Contiguous, inclusive step range.
struct BehaviorRef {
  std::size_t step_start = 0;
  std::size_t step_end = 0;
  std::string excerpt;

  bool operator==(const BehaviorRef&) const = default;
};

struct Aspect {
  std::string id;
  std::string feedback_id;
  std::string trajectory_id;
  Polarity sign = Polarity::kPositive;
  std::string feedback_text;
  BehaviorRef behavior;

  bool operator==(const Aspect&) const = default;
};

struct Metric {
  std::string id;
  std::string name;
  std::string definition;
  std::vector<std::string> good_examples;
  std::vector<std::string> bad_examples;

  bool operator==(const Metric&) const = default;
};

struct Provenance {
  std::int64_t seed = 0;
  std::int64_t candidate_index = 0;
  bool ablation = false;  // produced by strip_examples

  bool operator==(const Provenance&) const = default;
};

struct MetricSet {
  std::string id;
  std::optional<std::string> parent_id;
  std::vector<Metric> metrics;
  std::size_t requested_n = 0;
  Provenance provenance;

  const Metric* find(std::string_view metric_id) const;
  bool operator==(const MetricSet&) const = default;
};

enum class RatingValue { kPlusOne, kMinusOne, kNotApplicable };

std::string_view to_string(RatingValue v);  // "+1" | "-1" | "na"
RatingValue parse_rating_value(std::string_view s);

struct Rating {
  std::string trajectory_id;
  std::string metric_id;
  RatingValue value = RatingValue::kNotApplicable;
  std::string rationale;

  bool operator==(const Rating&) const = default;
};

struct Trait {
  std::string trajectory_id;
  std::string metric_id;
  Polarity polarity = Polarity::kPositive;

  bool operator==(const Trait&) const = default;
};

struct MatchPair {
  std::string aspect_id;
  std::optional<Trait> trait;

  bool operator==(const MatchPair&) const = default;
};

// Aspect-to-trait matching for one (trajectory, feedback) instance.
struct MatchRecord {
  std::string trajectory_id;
  std::string feedback_id;
  std::vector<MatchPair> pairs;
  std::vector<Trait> unmatched_traits;  // traits no aspect points at

  std::size_t matched_aspects() const;
  // Distinct matched traits plus unmatched ones.
  std::size_t trait_count() const;
  bool operator==(const MatchRecord&) const = default;
};

enum class Split { kTrain, kHoldout, kAll };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct QualityCounts {
  std::size_t aspects_total = 0;
  std::size_t aspects_matched = 0;
  std::size_t traits_total = 0;
  std::size_t traits_unmatched = 0;

  bool operator==(const QualityCounts&) const = default;
};

struct QualityReport {
  std::string metric_set_id;
  Split split = Split::kAll;
  Fraction coverage;
  OptFraction redundancy;  // undefined when no traits exist
  std::vector<MatchRecord> per_instance;
  QualityCounts counts;
  // Instances whose feedback produced no aspects but which still carry
  // traits; their traits count towards redundancy.
  std::vector<std::string> flagged_instances;

  bool operator==(const QualityReport&) const = default;
};

}  // namespace autolibra

#endif  // AUTOLIBRA_CORE_MODEL_HPP_
