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

#include "autolibra/ladder/toy_env.hpp"

#include <cstdlib>

#include "autolibra/core/errors.hpp"

namespace autolibra {
namespace {

constexpr const char* kDescription =
    "Pick up the key (K), open the locked door (D) while standing next to "
    "it, then walk onto the goal (G).";

GridTask task(const char* id, std::vector<std::string> rows) {
  return GridTask{id, kDescription, std::move(rows)};
}

}  // namespace

std::string_view to_string(GridAction a) {
  switch (a) {
    case GridAction::kNorth: return "north";
    case GridAction::kSouth: return "south";
    case GridAction::kEast: return "east";
    case GridAction::kWest: return "west";
    case GridAction::kPickup: return "pickup";
    case GridAction::kOpen: return "open";
  }
  return "?";
}

const std::vector<std::string>& grid_action_names() {
  static const std::vector<std::string> names = {"north", "south",  "east",
                                                 "west",  "pickup", "open"};
  return names;
}

std::optional<GridAction> parse_grid_action(std::string_view s) {
  for (GridAction a : {GridAction::kNorth, GridAction::kSouth, GridAction::kEast,
                       GridAction::kWest, GridAction::kPickup, GridAction::kOpen}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

const std::vector<GridTask>& key_door_tasks() {
  static const std::vector<GridTask> tasks = {
      task("kd-01", {"#######",
                     "#A.K#G#",
                     "#...D.#",
                     "#######"}),
      task("kd-02", {"#######",
                     "#K..#G#",
                     "#.A.D.#",
                     "#######"}),
      task("kd-03", {"#####",
                     "#A.K#",
                     "#...#",
                     "##D##",
                     "#..G#",
                     "#####"}),
      task("kd-04", {"#####",
                     "#K.A#",
                     "#...#",
                     "#D###",
                     "#..G#",
                     "#####"}),
      task("kd-05", {"########",
                     "#A..K..#",
                     "###D####",
                     "#..G...#",
                     "########"}),
      task("kd-06", {"######",
                     "#G#K.#",
                     "#.D.A#",
                     "###..#",
                     "######"}),
      task("kd-07", {"#######",
                     "#K...A#",
                     "#.#####",
                     "#.D..G#",
                     "#######"}),
      task("kd-08", {"#####",
                     "#AK.#",
                     "#...#",
                     "###D#",
                     "#G..#",
                     "#####"}),
      task("kd-09", {"########",
                     "#K.A.DG#",
                     "########"}),
      task("kd-10", {"#######",
                     "#....A#",
                     "#.###.#",
                     "#.#G#.#",
                     "#.#D#K#",
                     "#.....#",
                     "#######"}),
  };
  return tasks;
}

std::vector<std::string> key_door_full_ids() {
  std::vector<std::string> ids;
  for (const auto& t : key_door_tasks()) ids.push_back(t.id);
  return ids;
}

std::vector<std::string> key_door_train_ids() {
  auto ids = key_door_full_ids();
  ids.resize(6);
  return ids;
}

const GridTask& find_key_door_task(const std::string& id) {
  for (const auto& t : key_door_tasks()) {
    if (t.id == id) return t;
  }
  throw NotFoundError("unknown key-door task: " + id);
}

KeyDoorEnv::KeyDoorEnv(const GridTask& task) : task_(task) {
  int seen[4] = {0, 0, 0, 0};
  if (task_.rows.empty()) throw InvalidArgumentError("empty map: " + task_.id);
  const std::size_t width = task_.rows[0].size();
  for (int r = 0; r < static_cast<int>(task_.rows.size()); ++r) {
    std::string& row = task_.rows[r];
    if (row.size() != width) {
      throw InvalidArgumentError("ragged map: " + task_.id);
    }
    for (int c = 0; c < static_cast<int>(row.size()); ++c) {
      switch (row[c]) {
        case 'A': pos_ = {r, c}; row[c] = '.'; ++seen[0]; break;
        case 'K': key_ = {r, c}; ++seen[1]; break;
        case 'D': door_ = {r, c}; ++seen[2]; break;
        case 'G': goal_ = {r, c}; ++seen[3]; break;
        case '#': case '.': break;
        default:
          throw InvalidArgumentError("bad map cell in " + task_.id);
      }
    }
  }
  for (int n : seen) {
    if (n != 1) throw InvalidArgumentError("map needs one each of A K D G: " + task_.id);
  }
}

bool KeyDoorEnv::walkable(GridPos p) const {
  if (p.row < 0 || p.row >= static_cast<int>(task_.rows.size())) return false;
  if (p.col < 0 || p.col >= static_cast<int>(task_.rows[p.row].size())) return false;
  const char c = task_.rows[p.row][p.col];
  if (c == '#') return false;
  if (p == door_) return door_open_;
  return true;
}

std::string KeyDoorEnv::step(GridAction a) {
  GridPos next = pos_;
  switch (a) {
    case GridAction::kNorth: --next.row; break;
    case GridAction::kSouth: ++next.row; break;
    case GridAction::kEast: ++next.col; break;
    case GridAction::kWest: --next.col; break;
    case GridAction::kPickup:
      if (!has_key_ && pos_ == key_) {
        has_key_ = true;
        task_.rows[key_.row][key_.col] = '.';
        last_event_ = "picked up the key";
      } else {
        last_event_ = "nothing to pick up here";
      }
      return last_event_;
    case GridAction::kOpen: {
      const bool adjacent =
          std::abs(pos_.row - door_.row) + std::abs(pos_.col - door_.col) == 1;
      if (door_open_) {
        last_event_ = "the door is already open";
      } else if (!adjacent) {
        last_event_ = "there is no door next to you";
      } else if (!has_key_) {
        last_event_ = "the door is locked and you have no key";
      } else {
        door_open_ = true;
        task_.rows[door_.row][door_.col] = '/';
        last_event_ = "opened the door";
      }
      return last_event_;
    }
  }
  if (next == door_ && !door_open_) {
    last_event_ = "bumped into the locked door";
  } else if (!walkable(next)) {
    last_event_ = "bumped into a wall";
  } else {
    pos_ = next;
    last_event_ = "moved " + std::string(to_string(a));
    if (success()) last_event_ += " and reached the goal";
  }
  return last_event_;
}

std::string KeyDoorEnv::observation() const {
  std::string out = "Map:\n";
  for (int r = 0; r < static_cast<int>(task_.rows.size()); ++r) {
    std::string row = task_.rows[r];
    if (r == pos_.row) row[pos_.col] = 'A';
    out += row + "\n";
  }
  out += "You are at row " + std::to_string(pos_.row) + ", column " +
         std::to_string(pos_.col) + ". ";
  out += has_key_ ? "You hold the key. " : "You do not hold the key. ";
  out += door_open_ ? "The door is open. " : "The door is locked. ";
  out += "Last event: " + last_event_ + ".";
  return out;
}

}  // namespace autolibra
