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

#include "autolibra/app/config.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <vector>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/json_io.hpp"

namespace autolibra {
namespace {

class TomlLine {
 public:
  TomlLine(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  bool at_end() {
    skip_ws();
    return i_ >= s_.size() || s_[i_] == '#';
  }
  bool eat(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string key() {
    skip_ws();
    if (i_ < s_.size() && (s_[i_] == '"' || s_[i_] == '\'')) return string_value();
    const std::size_t start = i_;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' ||
            s_[i_] == '-')) {
      ++i_;
    }
    if (i_ == start) fail("expected a key");
    return std::string(s_.substr(start, i_ - start));
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{key()};
    while (eat('.')) parts.push_back(key());
    return parts;
  }

  Json value() {
    skip_ws();
    if (i_ >= s_.size()) fail("missing value");
    const char c = s_[i_];
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') return array_value();
    if (s_.substr(i_, 4) == "true") {
      i_ += 4;
      return true;
    }
    if (s_.substr(i_, 5) == "false") {
      i_ += 5;
      return false;
    }
    return number_value();
  }

 private:
  std::string string_value() {
    const char quote = s_[i_++];
    std::string out;
    while (true) {
      if (i_ >= s_.size()) fail("unterminated string");
      char c = s_[i_++];
      if (c == quote) return out;
      if (c == '\\' && quote == '"') {
        if (i_ >= s_.size()) fail("unterminated escape");
        char e = s_[i_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'u': {
            if (i_ + 4 > s_.size()) fail("short \\u escape");
            unsigned cp = 0;
            auto r = std::from_chars(s_.data() + i_, s_.data() + i_ + 4, cp, 16);
            if (r.ptr != s_.data() + i_ + 4) fail("bad \\u escape");
            i_ += 4;
            // UTF-8 encode (BMP only).
            if (cp < 0x80) {
              out += static_cast<char>(cp);
            } else if (cp < 0x800) {
              out += static_cast<char>(0xC0 | (cp >> 6));
              out += static_cast<char>(0x80 | (cp & 0x3F));
            } else {
              out += static_cast<char>(0xE0 | (cp >> 12));
              out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
              out += static_cast<char>(0x80 | (cp & 0x3F));
            }
            break;
          }
          default: fail(std::string("unknown escape \\") + e);
        }
        continue;
      }
      out += c;
    }
  }

  Json array_value() {
    ++i_;  // '['
    Json arr = Json::array();
    if (eat(']')) return arr;
    while (true) {
      arr.push_back(value());
      if (eat(']')) return arr;
      expect(',');
      if (eat(']')) return arr;  // trailing comma
    }
  }

  Json number_value() {
    const std::size_t start = i_;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '+' ||
            s_[i_] == '-' || s_[i_] == '.' || s_[i_] == '_')) {
      ++i_;
    }
    std::string tok;
    for (char c : s_.substr(start, i_ - start)) {
      if (c != '_') tok += c;
    }
    if (tok.empty()) fail("expected a value");
    const bool is_float = tok.find_first_of(".eE") != std::string::npos &&
                          tok.find("0x") == std::string::npos;
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    if (*b == '+') ++b;
    if (is_float) {
      // std::from_chars for double is not in libstdc++ 11.
      std::istringstream in{std::string(b, e)};
      in.imbue(std::locale::classic());
      double d = 0;
      in >> d;
      if (in.fail() || !in.eof()) fail("bad number \"" + tok + "\"");
      return d;
    }
    std::int64_t v = 0;
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) fail("bad value \"" + tok + "\"");
    return v;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t i_ = 0;
};

Json& descend(Json& root, const std::vector<std::string>& path, std::size_t n,
              const TomlLine& ln) {
  Json* node = &root;
  for (std::size_t k = 0; k < n; ++k) {
    Json& child = (*node)[path[k]];
    if (child.is_null()) child = Json::object();
    if (!child.is_object()) ln.fail("\"" + path[k] + "\" is not a table");
    node = &child;
  }
  return *node;
}

void check_keys(const Json& section, const std::string& name,
                const std::set<std::string>& allowed) {
  for (const auto& [k, v] : section.items()) {
    if (!allowed.count(k)) {
      throw InvalidArgumentError("unknown config key " +
                                 (name.empty() ? k : name + "." + k));
    }
  }
}

template <typename T>
void take(const Json& section, const char* key, T& out) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgumentError(std::string("bad type for config key ") + key);
  }
}

void take_size(const Json& section, const char* key, std::size_t& out) {
  if (!section.contains(key)) return;
  std::int64_t v = 0;
  take(section, key, v);
  if (v < 0) throw InvalidArgumentError(std::string(key) + " must be >= 0");
  out = static_cast<std::size_t>(v);
}

const char* const kRoleNames[] = {"grounder", "clusterer", "judge",
                                  "matcher",  "agent",     "improver"};

ModelRole& role_ref(RoleModels& r, std::string_view name) {
  if (name == "grounder") return r.grounder;
  if (name == "clusterer") return r.clusterer;
  if (name == "judge") return r.judge;
  if (name == "matcher") return r.matcher;
  if (name == "agent") return r.agent;
  return r.improver;
}

}  // namespace

Json parse_toml(std::string_view text) {
  Json root = Json::object();
  std::vector<std::string> table;
  std::set<std::string> seen_tables;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    pos = nl + 1;
    ++line_no;
    TomlLine ln(raw, line_no);
    if (ln.at_end()) continue;
    if (ln.eat('[')) {
      if (ln.eat('[')) ln.fail("arrays of tables are not supported");
      table = ln.dotted_key();
      ln.expect(']');
      if (!ln.at_end()) ln.fail("trailing characters after table header");
      std::string joined;
      for (const auto& p : table) joined += p + ".";
      if (!seen_tables.insert(joined).second) ln.fail("table defined twice");
      descend(root, table, table.size(), ln);
      continue;
    }
    auto key = ln.dotted_key();
    ln.expect('=');
    Json v = ln.value();
    if (!ln.at_end()) ln.fail("trailing characters after value");
    std::vector<std::string> full = table;
    full.insert(full.end(), key.begin(), key.end());
    Json& parent = descend(root, full, full.size() - 1, ln);
    if (parent.contains(full.back())) ln.fail("duplicate key \"" + full.back() + "\"");
    parent[full.back()] = std::move(v);
  }
  return root;
}

AppConfig app_config_from_json(const Json& j, AppConfig c) {
  if (!j.is_object()) throw InvalidArgumentError("config must be a table");
  check_keys(j, "", {"seed", "holdout_fraction", "gateway", "optimizer", "ladder",
                     "server"});
  take(j, "seed", c.seed);
  take(j, "holdout_fraction", c.holdout_fraction);

  if (j.contains("gateway")) {
    const Json& g = j["gateway"];
    std::set<std::string> allowed = {"provider", "cassette_mode", "cassette",
                                     "max_parallel", "transport_retries",
                                     "structured_attempts", "scope_noun_a",
                                     "scope_noun_b"};
    for (const char* r : kRoleNames) {
      allowed.insert(std::string(r) + "_model");
      allowed.insert(std::string(r) + "_temperature");
    }
    check_keys(g, "gateway", allowed);
    take(g, "provider", c.provider);
    if (c.provider != "offline" && c.provider != "http") {
      throw InvalidArgumentError("gateway.provider must be \"offline\" or \"http\"");
    }
    if (g.contains("cassette_mode")) {
      c.cassette_mode = parse_cassette_mode(g["cassette_mode"].get<std::string>());
    }
    take(g, "cassette", c.cassette);
    take_size(g, "max_parallel", c.max_parallel);
    take(g, "transport_retries", c.transport_retries);
    take(g, "structured_attempts", c.structured_attempts);
    take(g, "scope_noun_a", c.scope_noun_a);
    take(g, "scope_noun_b", c.scope_noun_b);
    for (const char* r : kRoleNames) {
      ModelRole& role = role_ref(c.roles, r);
      take(g, (std::string(r) + "_model").c_str(), role.model);
      take(g, (std::string(r) + "_temperature").c_str(), role.temperature);
    }
  }
  if (j.contains("optimizer")) {
    const Json& o = j["optimizer"];
    check_keys(o, "optimizer", {"n_min", "n_max", "sets_per_n", "coverage_band",
                                "refine_radius", "max_rounds",
                                "convergence_tolerance"});
    take_size(o, "n_min", c.optimizer.n_min);
    take_size(o, "n_max", c.optimizer.n_max);
    take_size(o, "sets_per_n", c.optimizer.sets_per_n);
    take(o, "coverage_band", c.optimizer.coverage_band);
    take_size(o, "refine_radius", c.optimizer.refine_radius);
    take_size(o, "max_rounds", c.optimizer.max_rounds);
    take(o, "convergence_tolerance", c.optimizer.convergence_tolerance);
    validate_config(c.optimizer);
  }
  if (j.contains("ladder")) {
    const Json& l = j["ladder"];
    check_keys(l, "ladder", {"stages", "inner_iterations", "trajectories_per_task",
                             "step_cap"});
    take_size(l, "stages", c.ladder_stages);
    take_size(l, "inner_iterations", c.ladder_inner_iterations);
    take_size(l, "trajectories_per_task", c.ladder_trajectories_per_task);
    take_size(l, "step_cap", c.ladder_step_cap);
  }
  if (j.contains("server")) {
    const Json& s = j["server"];
    check_keys(s, "server", {"host", "port", "static_dir", "strict_guidance"});
    take(s, "host", c.server.host);
    take(s, "port", c.server.port);
    take(s, "static_dir", c.server.static_dir);
    take(s, "strict_guidance", c.server.strict_guidance);
  }
  return c;
}

AppConfig load_app_config(const std::filesystem::path& path, AppConfig base) {
  return app_config_from_json(parse_toml(read_text_file(path)), std::move(base));
}

Json app_config_to_json(const AppConfig& c) {
  Json g = {{"provider", c.provider},
            {"cassette_mode", to_string(c.cassette_mode)},
            {"cassette", c.cassette},
            {"max_parallel", c.max_parallel},
            {"transport_retries", c.transport_retries},
            {"structured_attempts", c.structured_attempts},
            {"scope_noun_a", c.scope_noun_a},
            {"scope_noun_b", c.scope_noun_b}};
  RoleModels roles = c.roles;
  for (const char* r : kRoleNames) {
    const ModelRole& role = role_ref(roles, r);
    g[std::string(r) + "_model"] = role.model;
    g[std::string(r) + "_temperature"] = role.temperature;
  }
  return {{"seed", c.seed},
          {"holdout_fraction", c.holdout_fraction},
          {"gateway", g},
          {"optimizer",
           {{"n_min", c.optimizer.n_min},
            {"n_max", c.optimizer.n_max},
            {"sets_per_n", c.optimizer.sets_per_n},
            {"coverage_band", c.optimizer.coverage_band},
            {"refine_radius", c.optimizer.refine_radius},
            {"max_rounds", c.optimizer.max_rounds},
            {"convergence_tolerance", c.optimizer.convergence_tolerance}}},
          {"ladder",
           {{"stages", c.ladder_stages},
            {"inner_iterations", c.ladder_inner_iterations},
            {"trajectories_per_task", c.ladder_trajectories_per_task},
            {"step_cap", c.ladder_step_cap}}},
          {"server",
           {{"host", c.server.host},
            {"port", c.server.port},
            {"static_dir", c.server.static_dir},
            {"strict_guidance", c.server.strict_guidance}}}};
}

}  // namespace autolibra
