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

// Scripted model backends and small fixture builders shared by the tests.

#ifndef AUTOLIBRA_TESTS_SUPPORT_TEST_SUPPORT_HPP_
#define AUTOLIBRA_TESTS_SUPPORT_TEST_SUPPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "autolibra/core/model.hpp"
#include "autolibra/llm/gateway.hpp"

namespace autolibra::testing {

// Reply for one request. `attempt` is 0 for the first ask and counts
// corrective re-prompts after that.
using JsonHandler = std::function<Json(const Json& payload, const ModelRequest& req,
                                       int attempt)>;
using RawHandler = std::function<std::string(const Json& payload,
                                             const ModelRequest& req, int attempt)>;

// Routes by output schema name ("aspects", "ratings", ...). An unrouted
// request throws TransportError so a test notices it.
class ScriptedBackend : public ModelBackend {
 public:
  void on(const std::string& schema, JsonHandler h);
  void on_raw(const std::string& schema, RawHandler h);
  RawCompletion complete(const ModelRequest& request) override;
  std::size_t calls(const std::string& schema) const;
  std::size_t total_calls() const;

 private:
  std::map<std::string, RawHandler> handlers_;
  mutable std::mutex mu_;
  std::map<std::string, std::size_t> calls_;
};

// Corrective re-prompts append an assistant turn and a user turn.
int attempt_of(const ModelRequest& req);

// Live-mode gateway without retry backoff.
std::unique_ptr<Gateway> live_gateway(std::shared_ptr<ModelBackend> backend,
                                      int structured_attempts = 3);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

Trajectory make_trajectory(const std::string& id, std::size_t steps,
                           const std::string& task = "find the item");
Feedback make_feedback(const std::string& trajectory_id, const std::string& text,
                       const std::string& annotator = "ann",
                       const std::string& created_at = "2026-01-01T00:00:00Z");
Aspect make_aspect(const std::string& id, const std::string& trajectory_id,
                   Polarity sign, std::size_t step = 0,
                   const std::string& feedback_id = "fb");
Metric make_metric(const std::string& id, const std::string& definition = "");
MetricSet make_metric_set(const std::vector<std::string>& metric_ids,
                          const std::string& id = "ms-test");

// Shortest action sequence on a key-door map, by breadth-first search over
// (position, key held, door open). Rows use the map legend plus 'A' for the
// agent and '/' for an opened door; a missing 'K' means the key is held.
// nullopt when the goal is unreachable.
std::optional<std::vector<std::string>> keydoor_shortest_plan(
    const std::vector<std::string>& rows);

// Same search starting from a rendered observation.
std::optional<std::vector<std::string>> keydoor_plan_from_observation(
    const std::string& observation);

// Reads the source tree fixture directory.
std::filesystem::path fixture_path(const std::string& rel);

}  // namespace autolibra::testing

#endif  // AUTOLIBRA_TESTS_SUPPORT_TEST_SUPPORT_HPP_
