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

// Links only the shared library; nothing from the C++ headers.

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstring>
#include <filesystem>
#include <string>

#include "autolibra/autolibra.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Owned {
  char* p = nullptr;
  ~Owned() { al_string_free(p); }
  json parse() const { return json::parse(p); }
};

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() /
               ("al-capi-" + name + "-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::remove_all(p);
  return p;
}

std::string fixture(const std::string& rel) {
  return (fs::path(AUTOLIBRA_FIXTURE_DIR) / rel).string();
}

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STRNE(al_version(), "");
  EXPECT_STREQ(al_status_name(AL_OK), "ok");
  EXPECT_STREQ(al_status_name(AL_NOT_FOUND), "not_found");
  EXPECT_STREQ(al_status_name(AL_INTERNAL), "internal_error");
  EXPECT_EQ(al_set_log_level("off"), AL_OK);
  EXPECT_EQ(al_set_log_level("loud"), AL_INVALID_ARGUMENT);
}

TEST(CApi, TomlAndNullArguments) {
  Owned out;
  ASSERT_EQ(al_toml_to_json("a = 1\n[b]\nc = \"x\"\n", &out.p), AL_OK);
  EXPECT_EQ(out.parse(), (json{{"a", 1}, {"b", {{"c", "x"}}}}));
  Owned bad;
  EXPECT_EQ(al_toml_to_json("a = \n", &bad.p), AL_PARSE);
  EXPECT_EQ(bad.p, nullptr);
  EXPECT_NE(std::strlen(al_last_error_message()), 0u);
  EXPECT_EQ(al_toml_to_json(nullptr, &bad.p), AL_INVALID_ARGUMENT);
  EXPECT_EQ(al_session_open(nullptr, nullptr, nullptr), AL_INVALID_ARGUMENT);
  al_session_close(nullptr);
  al_server_free(nullptr);
}

TEST(CApi, SessionPipeline) {
  const fs::path ws = fresh_dir("ws");
  al_session* s = nullptr;
  ASSERT_EQ(al_session_open(ws.string().c_str(), nullptr, &s), AL_OK);
  al_set_log_level("off");
  ASSERT_EQ(al_session_set(s, "cassette_mode", "record"), AL_OK);
  ASSERT_EQ(al_session_set(s, "seed", "3"), AL_OK);
  EXPECT_EQ(al_session_set(s, "colour", "3"), AL_INVALID_ARGUMENT);
  EXPECT_EQ(al_session_set(s, "seed", "\"x\""), AL_INVALID_ARGUMENT);
  {
    Owned cfg;
    ASSERT_EQ(al_session_config_json(s, &cfg.p), AL_OK);
    EXPECT_EQ(cfg.parse()["seed"], 3);
    EXPECT_EQ(cfg.parse()["gateway"]["cassette_mode"], "record");
  }
  Owned o1, o2, o3, o4, o5, o6, o7;
  EXPECT_EQ(al_ground(s, "r", &o1.p), AL_STAGE_INPUT);
  ASSERT_EQ(al_ingest_trajectories(s, fixture("e2e/trajectories.jsonl").c_str(), &o1.p), AL_OK);
  EXPECT_EQ(o1.parse()["count"], 12);
  EXPECT_EQ(al_ingest_feedback(s, "/nonexistent.jsonl", &o2.p), AL_NOT_FOUND);
  ASSERT_EQ(al_ingest_feedback(s, fixture("e2e/feedback.jsonl").c_str(), &o2.p), AL_OK);
  ASSERT_EQ(al_split(s, 0, 3, &o3.p), AL_OK);
  EXPECT_EQ(o3.parse()["holdout"].size(), 2u);  // default fraction 0.2 of 12
  ASSERT_EQ(al_ground(s, "r", &o4.p), AL_OK);
  ASSERT_EQ(al_cluster(s, "r", 3, &o5.p), AL_OK);
  const std::string ms_id = o5.parse()["id"];
  const std::string first_metric = o5.parse()["metrics"][0]["id"];
  ASSERT_EQ(al_judge(s, "r", ms_id.c_str(), "train", &o6.p), AL_OK);
  EXPECT_TRUE(o6.parse()[first_metric].contains("score"));
  EXPECT_EQ(al_judge(s, "r", ms_id.c_str(), "sideways", &o7.p), AL_INVALID_ARGUMENT);
  EXPECT_EQ(al_judge(s, "r", "ms-missing", "train", &o7.p), AL_NOT_FOUND);
  ASSERT_EQ(al_report(s, "r", &o7.p), AL_OK);
  EXPECT_EQ(o7.parse()["run_id"], "r");

  al_server* srv = nullptr;
  ASSERT_EQ(al_server_start(s, "127.0.0.1", 0, &srv), AL_OK);
  EXPECT_GT(al_server_port(srv), 0);
  al_server_stop(srv);
  EXPECT_EQ(al_server_wait(srv), AL_OK);
  al_server_free(srv);

  al_session_close(s);
  fs::remove_all(ws);
}

}  // namespace
