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

// Canonical file encodings of the domain types (trajectories.jsonl,
// feedback.jsonl, aspects.jsonl, metricset.json, ratings.jsonl,
// matches.jsonl, report.json). Decoding is strict: a missing or mistyped
// field raises ParseError naming the field.

#ifndef AUTOLIBRA_CORE_JSON_IO_HPP_
#define AUTOLIBRA_CORE_JSON_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/model.hpp"

namespace autolibra {

using Json = nlohmann::json;

void to_json(Json& j, const Trajectory& t);
void from_json(const Json& j, Trajectory& t);
void to_json(Json& j, const Feedback& f);
void from_json(const Json& j, Feedback& f);
void to_json(Json& j, const Aspect& a);
void from_json(const Json& j, Aspect& a);
void to_json(Json& j, const Metric& m);
void from_json(const Json& j, Metric& m);
void to_json(Json& j, const MetricSet& ms);
void from_json(const Json& j, MetricSet& ms);
void to_json(Json& j, const Rating& r);
void from_json(const Json& j, Rating& r);
void to_json(Json& j, const Trait& t);
void from_json(const Json& j, Trait& t);
void to_json(Json& j, const MatchRecord& m);
void from_json(const Json& j, MatchRecord& m);
// Fractions are written as 4-place decimals; decoding recomputes them
// exactly from "counts".
void to_json(Json& j, const QualityReport& r);
void from_json(const Json& j, QualityReport& r);

// Reads a JSON-lines file. Blank lines are skipped; a malformed line raises
// ParseError with its 1-based line number.
struct JsonLine {
  std::size_t line = 0;
  Json value;
};
std::vector<JsonLine> read_jsonl(const std::filesystem::path& path);

template <typename T>
std::vector<T> read_jsonl_as(const std::filesystem::path& path) {
  std::vector<T> out;
  for (const auto& row : read_jsonl(path)) {
    try {
      out.push_back(row.value.get<T>());
    } catch (const Error& e) {
      throw ParseError(path.string() + ":" + std::to_string(row.line) + ": " +
                       e.what());
    } catch (const Json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(row.line) + ": " +
                       e.what());
    }
  }
  return out;
}

// Atomic replace: writes to a sibling temp file, then renames.
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);
// Pretty-printed with 2-space indent and trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& value);

template <typename T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& rows) {
  std::string content;
  for (const auto& row : rows) {
    content += Json(row).dump();
    content += '\n';
  }
  write_text_file(path, content);
}

// Appends one line and flushes.
void append_jsonl_line(const std::filesystem::path& path, const Json& value);

}  // namespace autolibra

#endif  // AUTOLIBRA_CORE_JSON_IO_HPP_
