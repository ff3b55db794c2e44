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

#include "autolibra/core/json_io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace autolibra {
namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) {
    throw ParseError(std::string("missing field \"") + name + "\"");
  }
  return *it;
}

std::string get_string(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) {
    throw ParseError(std::string("field \"") + name + "\" must be a string");
  }
  return v.get<std::string>();
}

std::int64_t get_int(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) {
    throw ParseError(std::string("field \"") + name + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

std::size_t get_index(const Json& j, const char* name) {
  std::int64_t v = get_int(j, name);
  if (v < 0) {
    throw ParseError(std::string("field \"") + name + "\" must be >= 0");
  }
  return static_cast<std::size_t>(v);
}

std::vector<std::string> get_string_list(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_array()) {
    throw ParseError(std::string("field \"") + name + "\" must be an array");
  }
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw ParseError(std::string("field \"") + name +
                       "\" must contain strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

Json fraction_json(const OptFraction& f) {
  if (!f) return nullptr;
  return f->rounded(4);
}

}  // namespace

void to_json(Json& j, const Trajectory& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"observation", s.observation}, {"action", s.action}});
  }
  j = Json{{"id", t.id},         {"task", t.task},   {"agent", t.agent},
           {"source", t.source}, {"steps", steps},
           {"success", t.success ? Json(*t.success) : Json(nullptr)}};
}

void from_json(const Json& j, Trajectory& t) {
  t.id = get_string(j, "id");
  t.task = get_string(j, "task");
  t.agent = j.contains("agent") ? get_string(j, "agent") : "";
  t.source = j.contains("source") ? get_string(j, "source") : "";
  const Json& steps = field(j, "steps");
  if (!steps.is_array()) throw ParseError("field \"steps\" must be an array");
  t.steps.clear();
  for (const auto& s : steps) {
    Step step;
    step.index = t.steps.size();
    step.observation = get_string(s, "observation");
    step.action = get_string(s, "action");
    t.steps.push_back(std::move(step));
  }
  t.success.reset();
  if (auto it = j.find("success"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) {
      throw ParseError("field \"success\" must be a boolean or null");
    }
    t.success = it->get<bool>();
  }
}

void to_json(Json& j, const Feedback& f) {
  j = Json{{"id", f.id},
           {"trajectory_id", f.trajectory_id},
           {"annotator", f.annotator},
           {"text", f.text},
           {"created_at", f.created_at}};
}

void from_json(const Json& j, Feedback& f) {
  f.id = get_string(j, "id");
  f.trajectory_id = get_string(j, "trajectory_id");
  f.annotator = get_string(j, "annotator");
  f.text = get_string(j, "text");
  f.created_at = get_string(j, "created_at");
}

void to_json(Json& j, const Aspect& a) {
  j = Json{{"id", a.id},
           {"feedback_id", a.feedback_id},
           {"trajectory_id", a.trajectory_id},
           {"sign", std::string(to_string(a.sign))},
           {"feedback_text", a.feedback_text},
           {"behavior",
            {{"step_start", a.behavior.step_start},
             {"step_end", a.behavior.step_end},
             {"excerpt", a.behavior.excerpt}}}};
}

void from_json(const Json& j, Aspect& a) {
  a.id = get_string(j, "id");
  a.feedback_id = get_string(j, "feedback_id");
  a.trajectory_id = get_string(j, "trajectory_id");
  a.sign = parse_polarity(get_string(j, "sign"));
  a.feedback_text = get_string(j, "feedback_text");
  const Json& b = field(j, "behavior");
  a.behavior.step_start = get_index(b, "step_start");
  a.behavior.step_end = get_index(b, "step_end");
  a.behavior.excerpt = get_string(b, "excerpt");
}

void to_json(Json& j, const Metric& m) {
  j = Json{{"id", m.id},
           {"name", m.name},
           {"definition", m.definition},
           {"good_examples", m.good_examples},
           {"bad_examples", m.bad_examples}};
}

void from_json(const Json& j, Metric& m) {
  m.id = get_string(j, "id");
  m.name = get_string(j, "name");
  m.definition = get_string(j, "definition");
  m.good_examples = get_string_list(j, "good_examples");
  m.bad_examples = get_string_list(j, "bad_examples");
}

void to_json(Json& j, const MetricSet& ms) {
  Json provenance = {{"seed", ms.provenance.seed},
                     {"candidate_index", ms.provenance.candidate_index}};
  if (ms.provenance.ablation) provenance["ablation"] = true;
  j = Json{{"id", ms.id},
           {"parent_id", ms.parent_id ? Json(*ms.parent_id) : Json(nullptr)},
           {"requested_n", ms.requested_n},
           {"provenance", provenance},
           {"metrics", ms.metrics}};
}

void from_json(const Json& j, MetricSet& ms) {
  ms.id = get_string(j, "id");
  ms.parent_id.reset();
  if (auto it = j.find("parent_id"); it != j.end() && !it->is_null()) {
    ms.parent_id = get_string(j, "parent_id");
  }
  ms.requested_n = get_index(j, "requested_n");
  const Json& p = field(j, "provenance");
  ms.provenance.seed = get_int(p, "seed");
  ms.provenance.candidate_index = get_int(p, "candidate_index");
  ms.provenance.ablation = p.value("ablation", false);
  const Json& metrics = field(j, "metrics");
  if (!metrics.is_array()) throw ParseError("field \"metrics\" must be an array");
  ms.metrics.clear();
  for (const auto& m : metrics) ms.metrics.push_back(m.get<Metric>());
}

void to_json(Json& j, const Rating& r) {
  j = Json{{"trajectory_id", r.trajectory_id},
           {"metric_id", r.metric_id},
           {"value", std::string(to_string(r.value))},
           {"rationale", r.rationale}};
}

void from_json(const Json& j, Rating& r) {
  r.trajectory_id = get_string(j, "trajectory_id");
  r.metric_id = get_string(j, "metric_id");
  r.value = parse_rating_value(get_string(j, "value"));
  r.rationale = get_string(j, "rationale");
}

void to_json(Json& j, const Trait& t) {
  j = Json{{"trajectory_id", t.trajectory_id},
           {"metric_id", t.metric_id},
           {"polarity", std::string(to_string(t.polarity))}};
}

void from_json(const Json& j, Trait& t) {
  t.trajectory_id = get_string(j, "trajectory_id");
  t.metric_id = get_string(j, "metric_id");
  t.polarity = parse_polarity(get_string(j, "polarity"));
}

void to_json(Json& j, const MatchRecord& m) {
  Json pairs = Json::array();
  for (const auto& p : m.pairs) {
    pairs.push_back({{"aspect_id", p.aspect_id},
                     {"trait", p.trait ? Json(*p.trait) : Json(nullptr)}});
  }
  j = Json{{"instance_id",
            {{"trajectory_id", m.trajectory_id},
             {"feedback_id", m.feedback_id}}},
           {"pairs", pairs},
           {"unmatched_traits", m.unmatched_traits}};
}

void from_json(const Json& j, MatchRecord& m) {
  const Json& inst = field(j, "instance_id");
  m.trajectory_id = get_string(inst, "trajectory_id");
  m.feedback_id = get_string(inst, "feedback_id");
  m.pairs.clear();
  for (const auto& p : field(j, "pairs")) {
    MatchPair pair;
    pair.aspect_id = get_string(p, "aspect_id");
    const Json& t = field(p, "trait");
    if (!t.is_null()) pair.trait = t.get<Trait>();
    m.pairs.push_back(std::move(pair));
  }
  m.unmatched_traits.clear();
  for (const auto& t : field(j, "unmatched_traits")) {
    m.unmatched_traits.push_back(t.get<Trait>());
  }
}

void to_json(Json& j, const QualityReport& r) {
  j = Json{{"metric_set_id", r.metric_set_id},
           {"split", std::string(to_string(r.split))},
           {"coverage", fraction_json(r.coverage)},
           {"redundancy", fraction_json(r.redundancy)},
           {"counts",
            {{"aspects_total", r.counts.aspects_total},
             {"aspects_matched", r.counts.aspects_matched},
             {"traits_total", r.counts.traits_total},
             {"traits_unmatched", r.counts.traits_unmatched}}},
           {"flagged_instances", r.flagged_instances},
           {"per_instance", r.per_instance}};
}

void from_json(const Json& j, QualityReport& r) {
  r.metric_set_id = get_string(j, "metric_set_id");
  r.split = parse_split(get_string(j, "split"));
  const Json& c = field(j, "counts");
  r.counts.aspects_total = get_index(c, "aspects_total");
  r.counts.aspects_matched = get_index(c, "aspects_matched");
  r.counts.traits_total = get_index(c, "traits_total");
  r.counts.traits_unmatched = get_index(c, "traits_unmatched");
  if (r.counts.aspects_total == 0) {
    throw ParseError("report with zero aspects");
  }
  r.coverage = Fraction(static_cast<std::int64_t>(r.counts.aspects_matched),
                        static_cast<std::int64_t>(r.counts.aspects_total));
  r.redundancy.reset();
  if (r.counts.traits_total > 0) {
    r.redundancy =
        Fraction(static_cast<std::int64_t>(r.counts.traits_unmatched),
                 static_cast<std::int64_t>(r.counts.traits_total));
  }
  r.flagged_instances = get_string_list(j, "flagged_instances");
  r.per_instance.clear();
  for (const auto& m : field(j, "per_instance")) {
    r.per_instance.push_back(m.get<MatchRecord>());
  }
}

std::vector<JsonLine> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<JsonLine> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back({lineno, Json::parse(line)});
    } catch (const Json::parse_error& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": invalid JSON: " + e.what());
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

Json read_json_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

void append_jsonl_line(const std::filesystem::path& path, const Json& value) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to " + path.string());
  out << value.dump() << '\n';
  out.flush();
  if (!out) throw IoError("append failed for " + path.string());
}

}  // namespace autolibra
