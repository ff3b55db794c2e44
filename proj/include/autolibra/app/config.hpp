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

// Run configuration, read from a small TOML subset:
//
//   seed = 7
//   [gateway]
//   provider = "offline"          # or "http"
//   cassette_mode = "record"      # live | record | replay
//   judge_model = "o3-mini@medium"
//   [optimizer]
//   n_min = 4
//   [ladder]
//   inner_iterations = 4
//   [server]
//   port = 8642
//
// Supported: [table] and [a.b] headers, bare or quoted keys, basic and
// literal strings, integers, floats, booleans, single-line arrays, and
// comments. No inline tables, multi-line strings or dates.

#ifndef AUTOLIBRA_APP_CONFIG_HPP_
#define AUTOLIBRA_APP_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "autolibra/ladder/ladder.hpp"
#include "autolibra/llm/gateway.hpp"
#include "autolibra/llm/roles.hpp"
#include "autolibra/optimizer.hpp"

namespace autolibra {

// TOML text to a JSON object. Throws ParseError with the line number.
Json parse_toml(std::string_view text);

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8642;
  std::string static_dir;  // empty: built-in placeholder page
  bool strict_guidance = false;
};

struct AppConfig {
  std::int64_t seed = 0;
  // Gateway.
  std::string provider = "offline";
  CassetteMode cassette_mode = CassetteMode::kLive;
  std::string cassette;  // empty: <run dir>/cassette.jsonl
  std::size_t max_parallel = 4;
  int transport_retries = 3;
  int structured_attempts = 3;
  RoleModels roles;
  std::string scope_noun_a = "website";
  std::string scope_noun_b = "character";
  // Stages.
  OptimizerConfig optimizer;
  double holdout_fraction = 0.2;
  std::size_t ladder_stages = 3;
  std::size_t ladder_inner_iterations = 4;
  std::size_t ladder_trajectories_per_task = 3;
  std::size_t ladder_step_cap = 30;
  ServerConfig server;
};

// Unknown sections or keys throw InvalidArgumentError.
AppConfig app_config_from_json(const Json& j, AppConfig base = {});
AppConfig load_app_config(const std::filesystem::path& path, AppConfig base = {});
Json app_config_to_json(const AppConfig& c);

}  // namespace autolibra

#endif  // AUTOLIBRA_APP_CONFIG_HPP_
