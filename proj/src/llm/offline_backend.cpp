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

// Deterministic keyword heuristics standing in for a model. Good enough to
// drive every pipeline stage end to end without network access; not a
// substitute for a real model's judgment.

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/util.hpp"
#include "autolibra/llm/backends.hpp"

namespace autolibra {
namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "the", "and", "for", "that", "this", "with", "was", "were", "are", "its",
      "it's", "his", "her", "they", "them", "then", "than", "but", "not", "you",
      "your", "agent", "agents", "step", "steps", "good", "bad", "very", "too",
      "has", "had", "have", "did", "does", "doing", "done", "also", "all",
      "any", "some", "into", "onto", "from", "when", "while", "which", "what",
      "who", "whom", "there", "their", "here", "about", "after", "before",
      "could", "would", "should", "been", "being", "just", "only", "more",
      "most", "such", "able", "observation", "action", "map", "times", "time",
      "at", "of", "to", "in", "on", "is", "a", "an", "it", "as", "by", "be"};
  return words;
}

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 3 && !stopwords().count(cur) &&
        !std::all_of(cur.begin(), cur.end(), ::isdigit)) {
      out.push_back(cur);
    }
    cur.clear();
  };
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      cur += static_cast<char>(std::tolower(u));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::size_t overlap(const std::string& a, const std::string& b) {
  auto ta = tokens(a), tb = tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  std::size_t n = 0;
  for (const auto& w : sa) n += sb.count(w);
  return n;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

bool negative_cue(const std::string& sentence) {
  const std::string s = lower(sentence);
  if (s.rfind("bad:", 0) == 0) return true;
  if (s.rfind("good:", 0) == 0) return false;
  static const char* cues[] = {"not ",    "never",    "fail",     "wrong",
                               "didn't",  "did not",  "wasted",   "wasting",
                               "error",   "froze",    "slow",     "unable",
                               "couldn't", "missing", "without",  "bad",
                               "poor",    "forgot",   "ignored",  "too long"};
  for (const char* c : cues) {
    if (contains(s, c)) return true;
  }
  return false;
}

std::vector<std::string> sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '.' || c == ';' || c == '\n' || c == '!' || c == '?') {
      std::string s = normalize_whitespace(cur);
      if (s.size() > 2) out.push_back(s);
      cur.clear();
    } else {
      cur += c;
    }
  }
  std::string s = normalize_whitespace(cur);
  if (s.size() > 2) out.push_back(s);
  return out;
}

// "Step k — OBSERVATION: ... ACTION: a" -> "ACTION: a".
std::string action_part(const std::string& rendered) {
  auto p = rendered.rfind("ACTION:");
  return normalize_whitespace(p == std::string::npos ? rendered : rendered.substr(p));
}

Json ground(const Json& p) {
  const auto steps = p.at("steps").get<std::vector<std::string>>();
  const std::int64_t n = static_cast<std::int64_t>(steps.size());
  Json aspects = Json::array();
  for (const auto& s : sentences(p.at("feedback").get<std::string>())) {
    if (aspects.size() >= 10) break;
    std::int64_t step = -1;
    const std::string ls = lower(s);
    if (auto pos = ls.find("step "); pos != std::string::npos) {
      std::istringstream in(ls.substr(pos + 5));
      std::int64_t k = -1;
      if (in >> k) step = k;
    }
    if (step < 0 && (contains(ls, "end") || contains(ls, "final") || contains(ls, "last"))) {
      step = n - 1;
    }
    if (step < 0) {
      std::size_t best = 0;
      step = 0;
      for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t o = overlap(s, steps[i]);
        if (o > best) {
          best = o;
          step = i;
        }
      }
    }
    step = std::clamp<std::int64_t>(step, 0, std::max<std::int64_t>(n - 1, 0));
    std::string fb = s;
    for (const char* prefix : {"Good: ", "Bad: "}) {
      if (fb.rfind(prefix, 0) == 0) fb = fb.substr(std::string_view(prefix).size());
    }
    aspects.push_back({{"feedback", fb},
                       {"sign", negative_cue(s) ? "negative" : "positive"},
                       {"step_start", step},
                       {"step_end", step},
                       {"excerpt", n > 0 ? action_part(steps[step]) : ""}});
  }
  return {{"aspects", aspects}};
}

struct Group {
  std::string theme;
  std::vector<const Json*> members;
};

// Most frequent content word of the whole batch present in the text.
std::string theme_of(const std::string& text, const std::map<std::string, int>& freq) {
  std::string best;
  int best_n = -1;
  for (const auto& w : tokens(text)) {
    const int f = freq.at(w);
    if (f > best_n || (f == best_n && w < best)) {
      best = w;
      best_n = f;
    }
  }
  return best.empty() ? "general" : best;
}

Json metric_from(const Group& g, const std::string& id, std::size_t part) {
  std::string name = g.theme;
  name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  name += " handling";
  if (part > 1) name += " " + std::to_string(part);
  std::string quote;
  for (const Json* a : g.members) {
    if ((*a)["sign"] == "positive") {
      quote = (*a)["feedback"].get<std::string>();
      break;
    }
  }
  if (quote.empty()) quote = (*g.members.front())["feedback"].get<std::string>();
  Json good = Json::array(), bad = Json::array();
  for (const Json* a : g.members) {
    ((*a)["sign"] == "positive" ? good : bad).push_back((*a)["key"]);
  }
  Json m = {{"name", name},
            {"definition", "The agent deals with " + g.theme +
                               " correctly, for example: " + quote},
            {"good_examples", good},
            {"bad_examples", bad}};
  m["id"] = id;
  return m;
}

std::vector<Group> group_aspects(const Json& aspects) {
  std::map<std::string, int> freq;
  for (const auto& a : aspects) {
    auto ts = tokens(a["feedback"].get<std::string>());
    for (const auto& w : std::set<std::string>(ts.begin(), ts.end())) ++freq[w];
  }
  std::map<std::string, Group> by_theme;
  std::vector<std::string> order;
  for (const auto& a : aspects) {
    const std::string t = theme_of(a["feedback"].get<std::string>(), freq);
    if (!by_theme.count(t)) order.push_back(t);
    by_theme[t].theme = t;
    by_theme[t].members.push_back(&a);
  }
  std::vector<Group> groups;
  for (const auto& t : order) groups.push_back(by_theme[t]);
  std::stable_sort(groups.begin(), groups.end(), [](const Group& x, const Group& y) {
    return x.members.size() > y.members.size();
  });
  return groups;
}

Json cluster(const Json& p) {
  const std::size_t n = p.at("n").get<std::size_t>();
  std::vector<Group> groups = group_aspects(p.at("aspects"));
  if (groups.empty()) return {{"metrics", Json::array()}};
  while (groups.size() > n) {
    Group last = groups.back();
    groups.pop_back();
    auto& into = groups.back();
    into.members.insert(into.members.end(), last.members.begin(), last.members.end());
  }
  std::vector<std::size_t> parts(groups.size(), 1);
  while (groups.size() < n) {
    // Split the largest group; a single-member group is duplicated.
    std::size_t big = 0;
    for (std::size_t i = 1; i < groups.size(); ++i) {
      if (groups[i].members.size() > groups[big].members.size()) big = i;
    }
    Group half = groups[big];
    if (groups[big].members.size() >= 2) {
      const std::size_t mid = groups[big].members.size() / 2;
      half.members.assign(groups[big].members.begin() + mid, groups[big].members.end());
      groups[big].members.resize(mid);
    }
    groups.push_back(half);
    std::size_t same = 0;
    for (const auto& g : groups) same += g.theme == half.theme;
    parts.push_back(same);
  }
  Json metrics = Json::array();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    Json m = metric_from(groups[i], "", parts[i]);
    m.erase("id");
    metrics.push_back(std::move(m));
  }
  return {{"metrics", metrics}};
}

Json cluster_iterative_reply(const Json& p) {
  const Json& existing = p.at("existing_metrics");
  Json metrics = Json::array();
  std::vector<std::vector<const Json*>> attached(existing.size());
  std::vector<const Json*> leftover;
  for (const auto& a : p.at("aspects")) {
    const std::string text = a["feedback"].get<std::string>();
    std::size_t best = 0, best_i = 0;
    for (std::size_t i = 0; i < existing.size(); ++i) {
      const std::size_t o = overlap(text, existing[i]["name"].get<std::string>() + " " +
                                              existing[i]["definition"].get<std::string>());
      if (o > best) {
        best = o;
        best_i = i;
      }
    }
    if (best > 0) {
      attached[best_i].push_back(&a);
    } else {
      leftover.push_back(&a);
    }
  }
  for (std::size_t i = 0; i < existing.size(); ++i) {
    Json good = Json::array(), bad = Json::array();
    for (const Json* a : attached[i]) {
      ((*a)["sign"] == "positive" ? good : bad).push_back((*a)["key"]);
    }
    metrics.push_back({{"id", existing[i]["id"]},
                       {"name", existing[i]["name"]},
                       {"definition", existing[i]["definition"]},
                       {"good_examples", good},
                       {"bad_examples", bad}});
  }
  if (!leftover.empty()) {
    Json rest = Json::array();
    for (const Json* a : leftover) rest.push_back(*a);
    for (const auto& g : group_aspects(rest)) metrics.push_back(metric_from(g, "", 1));
  }
  return {{"metrics", metrics}};
}

Json judge(const Json& p) {
  std::string text;
  for (const auto& s : p.at("steps")) text += normalize_whitespace(s.get<std::string>()) + " ";
  Json ratings = Json::array();
  for (const auto& m : p.at("metrics")) {
    std::size_t good = 0, bad = 0;
    for (const auto& e : m["good_examples"]) {
      good += contains(text, normalize_whitespace(e.get<std::string>())) ? 1 : 0;
    }
    for (const auto& e : m["bad_examples"]) {
      bad += contains(text, normalize_whitespace(e.get<std::string>())) ? 1 : 0;
    }
    std::string value = "na", why = "No behavior related to this metric was found.";
    if (good > 0 && good >= bad) {
      value = "+1";
      why = "The trajectory shows " + std::to_string(good) + " praised behavior(s).";
    } else if (bad > 0) {
      value = "-1";
      why = "The trajectory shows " + std::to_string(bad) + " criticized behavior(s).";
    }
    ratings.push_back({{"metric_id", m["id"]}, {"value", value}, {"rationale", why}});
  }
  return {{"ratings", ratings}};
}

Json match(const Json& p) {
  Json matches = Json::array();
  for (const auto& a : p.at("aspects")) {
    const std::string text =
        a["feedback"].get<std::string>() + " " + a["behavior"].get<std::string>();
    std::string best_id;
    std::size_t best = 0;
    for (const auto& t : p.at("traits")) {
      if (t["polarity"] != a["sign"]) continue;
      const std::size_t o = overlap(text, t.value("name", "") + " " + t.value("definition", ""));
      if (o > best) {
        best = o;
        best_id = t["id"].get<std::string>();
      }
    }
    matches.push_back({{"aspect_id", a["id"]}, {"trait_id", best_id}});
  }
  return {{"matches", matches}};
}

// Grid agent: competence follows what the instructions mention.
Json act(const std::string& prompt, const Json& p, std::int64_t seed_hint) {
  const std::string obs = p.at("observation").get<std::string>();
  std::vector<std::string> rows;
  std::istringstream in(obs);
  std::string line;
  std::getline(in, line);  // "Map:"
  while (std::getline(in, line) && !line.empty() && line[0] == '#') rows.push_back(line);
  const bool has_key = contains(obs, "You hold the key");
  const bool door_locked = contains(obs, "The door is locked");
  const std::string lp = lower(prompt);
  const bool knows_key = contains(lp, "key");
  const bool knows_door = contains(lp, "door");

  int ar = 0, ac = 0;
  std::vector<std::pair<int, int>> keys, doors, goals;
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    for (int c = 0; c < static_cast<int>(rows[r].size()); ++c) {
      switch (rows[r][c]) {
        case 'A': ar = r; ac = c; break;
        case 'K': keys.emplace_back(r, c); break;
        case 'D': doors.emplace_back(r, c); break;
        case 'G': goals.emplace_back(r, c); break;
        default: break;
      }
    }
  }
  auto adjacent = [&](int r, int c, std::pair<int, int> t) {
    return std::abs(r - t.first) + std::abs(c - t.second) == 1;
  };
  std::vector<std::pair<int, int>> targets;
  if (!has_key && knows_key && !keys.empty()) {
    if (keys[0] == std::make_pair(ar, ac)) return {{"action", "pickup"}};
    targets = keys;
  } else if (has_key && door_locked && knows_door && !doors.empty()) {
    if (adjacent(ar, ac, doors[0])) return {{"action", "open"}};
    const auto d = doors[0];
    targets = {{d.first - 1, d.second}, {d.first + 1, d.second},
               {d.first, d.second - 1}, {d.first, d.second + 1}};
  } else {
    targets = goals;
  }
  static const char* names[] = {"north", "south", "east", "west"};
  static const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, 1, -1};
  auto open_cell = [&](int r, int c) {
    if (r < 0 || r >= static_cast<int>(rows.size()) || c < 0 ||
        c >= static_cast<int>(rows[r].size())) {
      return false;
    }
    const char x = rows[r][c];
    return x != '#' && x != 'D';
  };
  // BFS from the agent; first move of a shortest path to any target.
  std::map<std::pair<int, int>, int> first;
  std::deque<std::pair<int, int>> q{{ar, ac}};
  first[{ar, ac}] = -1;
  while (!q.empty()) {
    auto [r, c] = q.front();
    q.pop_front();
    if (std::find(targets.begin(), targets.end(), std::make_pair(r, c)) != targets.end() &&
        first[{r, c}] >= 0) {
      return {{"action", names[first[{r, c}]]}};
    }
    for (int k = 0; k < 4; ++k) {
      std::pair<int, int> nx{r + dr[k], c + dc[k]};
      if (!open_cell(nx.first, nx.second) || first.count(nx)) continue;
      first[nx] = first[{r, c}] < 0 ? k : first[{r, c}];
      q.push_back(nx);
    }
  }
  const auto step = p.value("step", std::int64_t{0});
  return {{"action", names[static_cast<std::size_t>(step + seed_hint) % 4]}};
}

Json improve(const Json& p) {
  std::string prompt = p.at("current_prompt").get<std::string>();
  std::map<std::string, int> failures;
  for (const auto& t : p.at("trajectories")) {
    for (const auto& r : t["ratings"]) {
      if (r["value"] == "-1") ++failures[r["metric_id"].get<std::string>()];
    }
  }
  std::vector<std::pair<int, std::string>> ranked;
  for (const auto& m : p.at("metrics")) {
    const std::string id = m["id"].get<std::string>();
    ranked.emplace_back(-(failures.count(id) ? failures[id] : 0), id);
  }
  std::sort(ranked.begin(), ranked.end());
  std::string lp = lower(prompt);
  std::string all_text;
  for (const auto& m : p.at("metrics")) {
    all_text += lower(m["name"].get<std::string>() + " " +
                      m["definition"].get<std::string>()) + " ";
  }
  if (!contains(lp, "key") && contains(all_text, "key")) {
    return {{"prompt", prompt + " First walk to the key (K) and pick it up."}};
  }
  if (!contains(lp, "door") && contains(all_text, "door")) {
    return {{"prompt", prompt + " Once you hold the key, stand next to the door (D) and open it."}};
  }
  if (!contains(lp, "goal") && contains(all_text, "goal")) {
    return {{"prompt", prompt + " Then walk onto the goal (G)."}};
  }
  return {{"prompt", prompt}};
}

class OfflineBackend : public ModelBackend {
 public:
  RawCompletion complete(const ModelRequest& req) override {
    if (!req.output_schema) {
      return {"The offline backend only answers structured requests.", {}, {}};
    }
    auto payload = extract_payload(req);
    if (!payload) throw InvalidArgumentError("offline backend: request has no payload");
    const std::string& schema = req.output_schema->name;
    Json out;
    if (schema == "aspects") {
      out = ground(*payload);
    } else if (schema == "metric_set") {
      out = cluster(*payload);
    } else if (schema == "iterative_metric_set") {
      out = cluster_iterative_reply(*payload);
    } else if (schema == "ratings") {
      out = judge(*payload);
    } else if (schema == "matches") {
      out = match(*payload);
    } else if (schema == "agent_action") {
      const std::string sys =
          req.messages.empty() || req.messages[0].role != Role::kSystem ? ""
                                                                         : req.messages[0].text;
      out = act(sys, *payload, req.seed_hint.value_or(0));
    } else if (schema == "improved_prompt") {
      out = improve(*payload);
    } else {
      throw InvalidArgumentError("offline backend: unknown schema " + schema);
    }
    RawCompletion rc;
    rc.text = out.dump();
    rc.provider_meta = {{"provider", "offline"}};
    return rc;
  }
};

}  // namespace

std::shared_ptr<ModelBackend> make_offline_backend() {
  return std::make_shared<OfflineBackend>();
}

}  // namespace autolibra
