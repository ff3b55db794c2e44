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

// "key-door": a deterministic text grid game. The agent must pick up the
// key, open the locked door while standing next to it, and walk onto G.
//
// Map legend: '#' wall, '.' floor, 'A' start, 'K' key, 'D' locked door,
// 'G' goal. An opened door renders as '/' and is walkable.

#ifndef AUTOLIBRA_LADDER_TOY_ENV_HPP_
#define AUTOLIBRA_LADDER_TOY_ENV_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autolibra {

enum class GridAction { kNorth, kSouth, kEast, kWest, kPickup, kOpen };

std::string_view to_string(GridAction a);
std::optional<GridAction> parse_grid_action(std::string_view s);
const std::vector<std::string>& grid_action_names();

struct GridTask {
  std::string id;
  std::string description;
  std::vector<std::string> rows;
};

// The 10 built-in tasks; the first 6 form the train subset.
const std::vector<GridTask>& key_door_tasks();
std::vector<std::string> key_door_train_ids();
std::vector<std::string> key_door_full_ids();
// Throws NotFoundError.
const GridTask& find_key_door_task(const std::string& id);

struct GridPos {
  int row = 0;
  int col = 0;
  bool operator==(const GridPos&) const = default;
  auto operator<=>(const GridPos&) const = default;
};

class KeyDoorEnv {
 public:
  // Throws InvalidArgumentError on a malformed map (needs exactly one of
  // A, K, D and G, rectangular rows).
  explicit KeyDoorEnv(const GridTask& task);

  // Applies one action and returns a short event description. Bumping into
  // a wall or a locked door leaves the agent in place.
  std::string step(GridAction a);

  std::string observation() const;
  bool success() const { return pos_ == goal_; }

  GridPos position() const { return pos_; }
  bool has_key() const { return has_key_; }
  bool door_open() const { return door_open_; }
  const GridTask& task() const { return task_; }

 private:
  bool walkable(GridPos p) const;

  GridTask task_;
  GridPos pos_, key_, door_, goal_;
  bool has_key_ = false;
  bool door_open_ = false;
  std::string last_event_ = "start";
};

}  // namespace autolibra

#endif  // AUTOLIBRA_LADDER_TOY_ENV_HPP_
