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

#include <gtest/gtest.h>

#include <fstream>

#include "autolibra/core/json_io.hpp"
#include "autolibra/ladder/ladder.hpp"
#include "test_support.hpp"

namespace autolibra {
namespace {

using testing::ScriptedBackend;

// Follows the shortest plan from whatever it observes.
std::shared_ptr<ScriptedBackend> planning_agent() {
  auto b = std::make_shared<ScriptedBackend>();
  b->on("agent_action", [](const Json& p, const ModelRequest&, int) {
    auto plan = testing::keydoor_plan_from_observation(p.at("observation"));
    return Json{{"action", plan && !plan->empty() ? plan->front() : "pickup"}};
  });
  return b;
}

TEST(KeyDoor, ShortestPlansMatchAndSolve) {
  const std::vector<std::size_t> expected = {8, 10, 9, 9, 8, 8, 12, 9, 9, 10};
  const auto& tasks = key_door_tasks();
  ASSERT_EQ(tasks.size(), 10u);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto plan = testing::keydoor_shortest_plan(tasks[i].rows);
    ASSERT_TRUE(plan) << tasks[i].id;
    EXPECT_EQ(plan->size(), expected[i]) << tasks[i].id;
    KeyDoorEnv env(tasks[i]);
    for (const auto& a : *plan) {
      EXPECT_FALSE(env.success());
      env.step(*parse_grid_action(a));
    }
    EXPECT_TRUE(env.success()) << tasks[i].id;
  }
  EXPECT_EQ(key_door_train_ids(),
            (std::vector<std::string>{"kd-01", "kd-02", "kd-03", "kd-04", "kd-05", "kd-06"}));
  EXPECT_THROW(find_key_door_task("kd-99"), NotFoundError);
}

TEST(KeyDoor, Events) {
  KeyDoorEnv env(find_key_door_task("kd-09"));  // #K.A.DG#
  EXPECT_EQ(env.step(GridAction::kNorth), "bumped into a wall");
  EXPECT_EQ(env.step(GridAction::kPickup), "nothing to pick up here");
  EXPECT_EQ(env.step(GridAction::kOpen), "there is no door next to you");
  EXPECT_EQ(env.step(GridAction::kEast), "moved east");
  EXPECT_EQ(env.step(GridAction::kOpen), "the door is locked and you have no key");
  EXPECT_EQ(env.step(GridAction::kEast), "bumped into the locked door");
  EXPECT_EQ(env.position(), (GridPos{1, 4}));
  env.step(GridAction::kWest);
  env.step(GridAction::kWest);
  env.step(GridAction::kWest);
  EXPECT_EQ(env.step(GridAction::kPickup), "picked up the key");
  EXPECT_TRUE(env.has_key());
  EXPECT_EQ(env.step(GridAction::kPickup), "nothing to pick up here");
  for (int i = 0; i < 3; ++i) env.step(GridAction::kEast);
  EXPECT_EQ(env.step(GridAction::kOpen), "opened the door");
  EXPECT_EQ(env.step(GridAction::kOpen), "the door is already open");
  EXPECT_NE(env.observation().find("#...A/G#"), std::string::npos);
  env.step(GridAction::kEast);
  EXPECT_EQ(env.step(GridAction::kEast), "moved east and reached the goal");
  EXPECT_TRUE(env.success());
  EXPECT_NE(env.observation().find("You hold the key. The door is open."),
            std::string::npos);
}

TEST(KeyDoor, RejectsMalformedMaps) {
  EXPECT_THROW(KeyDoorEnv(GridTask{"x", "", {}}), InvalidArgumentError);
  EXPECT_THROW(KeyDoorEnv(GridTask{"x", "", {"#AKDG#", "#"}}), InvalidArgumentError);
  EXPECT_THROW(KeyDoorEnv(GridTask{"x", "", {"#AKDGG#"}}), InvalidArgumentError);
  EXPECT_THROW(KeyDoorEnv(GridTask{"x", "", {"#AKD?G#"}}), InvalidArgumentError);
  EXPECT_FALSE(parse_grid_action("dance"));
  EXPECT_EQ(parse_grid_action("open"), GridAction::kOpen);
}

TEST(Spec, Validation) {
  AgentRunnerSpec spec;
  EXPECT_NO_THROW(validate_spec(spec));
  spec.train_tasks.push_back("kd-99");
  EXPECT_THROW(validate_spec(spec), InvalidArgumentError);
  spec = {};
  spec.step_cap = 0;
  EXPECT_THROW(validate_spec(spec), InvalidArgumentError);
  spec = {};
  spec.full_tasks.clear();
  EXPECT_THROW(validate_spec(spec), InvalidArgumentError);
}

TEST(Episode, PlanningAgentSolvesOptimally) {
  auto backend = planning_agent();
  auto gw = testing::live_gateway(backend);
  AgentRunnerSpec spec;
  Trajectory t = run_episode(*gw, spec, "kd-07", 2);
  EXPECT_EQ(t.success, true);
  EXPECT_EQ(t.steps.size(), 12u);
  EXPECT_EQ(episode_task_id(t), "kd-07");
  EXPECT_EQ(t.source, "key-door");
  EXPECT_EQ(t.steps[0].index, 0u);
  EXPECT_EQ(t.id.rfind("ep-kd-07-2-", 0), 0u);

  auto req = agent_action_request(spec, find_key_door_task("kd-01"), 3, "obs", {"east"}, 5);
  EXPECT_EQ(req.seed_hint, 5);
  EXPECT_EQ(req.messages[0].text, spec.prompt);
  EXPECT_EQ(extract_payload(req)->at("previous_actions"), Json::array({"east"}));

  spec.step_cap = 11;
  Trajectory capped = run_episode(*gw, spec, "kd-07", 0, "mine");
  EXPECT_EQ(capped.id, "mine");
  EXPECT_EQ(capped.success, false);
  EXPECT_EQ(capped.steps.size(), 11u);

  spec.full_tasks = {"kd-01"};
  spec.train_tasks = {"kd-01"};
  EXPECT_THROW(run_episode(*gw, spec, "kd-02"), InvalidArgumentError);
}

TEST(Episode, BadActionCarriesPartialTrajectory) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on("agent_action", [](const Json& p, const ModelRequest&, int) {
    return Json{{"action", p.at("step") == 2 ? "dance" : "east"}};
  });
  auto gw = testing::live_gateway(backend);
  try {
    run_episode(*gw, AgentRunnerSpec{}, "kd-01", 0, "e");
    FAIL() << "expected EpisodeError";
  } catch (const EpisodeError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEpisode);
    EXPECT_EQ(e.partial().steps.size(), 2u);
    EXPECT_EQ(e.partial().success, false);
  }
}

TEST(Improver, RequestAndEmptyAnswer) {
  MetricSet ms = testing::make_metric_set({"a"});
  Trajectory t = testing::make_trajectory("t", 1);
  t.success = true;
  std::vector<Rating> ratings = {{"t", "a", RatingValue::kMinusOne, "why"},
                                 {"other", "a", RatingValue::kPlusOne, ""}};
  auto req = improve_prompt_request("old", ms, {t}, ratings, {});
  auto p = extract_payload(req);
  EXPECT_EQ(p->at("current_prompt"), "old");
  EXPECT_EQ(p->at("trajectories")[0].at("ratings").size(), 1u);
  EXPECT_FALSE(p->at("trajectories")[0].contains("success"));

  auto backend = std::make_shared<ScriptedBackend>();
  backend->on("improved_prompt", [](const Json& p, const ModelRequest&, int) {
    return Json{{"prompt", p.at("current_prompt") == "old" ? "  new  " : " "}};
  });
  auto gw = testing::live_gateway(backend);
  EXPECT_EQ(improve_prompt(*gw, "old", ms, {t}, ratings), "new");
  EXPECT_EQ(improve_prompt(*gw, "keep", ms, {t}, ratings), "keep");
  EXPECT_EQ(prompt_digest("x").size(), 18u);
  EXPECT_EQ(prompt_digest("x"), prompt_digest("x"));
  EXPECT_NE(prompt_digest("x"), prompt_digest("y"));
}

TEST(Scores, MeanSkipsUndefined) {
  EXPECT_EQ(mean_metric_score({{"a", Fraction(1, 2)}, {"b", std::nullopt}, {"c", Fraction(1, 4)}}),
            Fraction(3, 8));
  EXPECT_EQ(mean_metric_score({{"a", std::nullopt}}), Fraction());
  EXPECT_EQ(mean_metric_score({}), Fraction());
}

TEST(Report, CsvFormat) {
  StageRecord s;
  s.stage = 2;
  IterationRecord it;
  it.iteration = 1;
  it.mean_score = Fraction(2, 3);
  it.running_max_mean = Fraction(1, 1);
  it.cumulative_avg_mean = Fraction(5, 8);
  it.success_rate = Fraction(7, 10);
  s.iterations.push_back(it);
  EXPECT_EQ(ladder_report({s}),
            "stage,iteration,mean_score,running_max,cumulative_avg,success_rate\n"
            "2,1,0.6667,1.0000,0.6250,0.7000\n");
}

TEST(Feedback, FileSourceWritesThenReads) {
  testing::TempDir dir;
  FileFeedbackSource src(dir / "fb");
  std::vector<Trajectory> sampled = {testing::make_trajectory("t1", 2)};
  EXPECT_TRUE(src.collect(1, sampled).empty());
  auto written = read_jsonl_as<Trajectory>(dir / "fb" / "stage1_trajectories.jsonl");
  ASSERT_EQ(written.size(), 1u);
  EXPECT_EQ(written[0], sampled[0]);
  write_jsonl(dir / "fb" / "stage1_feedback.jsonl",
              std::vector<Feedback>{testing::make_feedback("t1", "fine")});
  auto fb = src.collect(1, sampled);
  ASSERT_EQ(fb.size(), 1u);
  EXPECT_EQ(fb[0].text, "fine");
}

TEST(Feedback, SyntheticCommentsOnEvents) {
  auto gw = testing::live_gateway(planning_agent());
  Trajectory good = run_episode(*gw, AgentRunnerSpec{}, "kd-01", 0, "g");
  auto fb = SyntheticFeedbackSource().collect(1, {good});
  ASSERT_EQ(fb.size(), 1u);
  EXPECT_EQ(fb[0].trajectory_id, "g");
  EXPECT_NE(fb[0].text.find("picked up the key at step 2"), std::string::npos);
  EXPECT_NE(fb[0].text.find("opened the door at step 4"), std::string::npos);
  EXPECT_NE(fb[0].text.find("reached the goal in 8 steps"), std::string::npos);
  EXPECT_EQ(fb[0].text.find("walls"), std::string::npos);

  Trajectory bad = good;
  bad.id = "b";
  bad.success = false;
  bad.steps = {{0, "", "north"}, {1, "", "open"}};
  auto fb2 = SyntheticFeedbackSource().collect(1, {bad});
  EXPECT_NE(fb2[0].text.find("never picked up the key"), std::string::npos);
  EXPECT_NE(fb2[0].text.find("walked into walls or the locked door 1 times"),
            std::string::npos);
  EXPECT_NE(fb2[0].text.find("did not reach the goal"), std::string::npos);
}

}  // namespace
}  // namespace autolibra
