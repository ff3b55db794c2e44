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
#include <httplib.h>

#include <fstream>

#include "autolibra/app/annotation_server.hpp"
#include "autolibra/core/errors.hpp"
#include "autolibra/core/json_io.hpp"
#include "test_support.hpp"

namespace autolibra {
namespace {

struct Fixture {
  testing::TempDir dir;
  std::unique_ptr<Workspace> ws;
  std::unique_ptr<AnnotationServer> server;
  std::unique_ptr<httplib::Client> client;

  explicit Fixture(bool strict = false, std::string static_dir = "") {
    ws = std::make_unique<Workspace>(dir / "ws");
    std::vector<Trajectory> ts;
    for (int i = 0; i < 10; ++i) ts.push_back(testing::make_trajectory("t" + std::to_string(i), 3));
    write_jsonl(dir / "t.jsonl", ts);
    ws->import_trajectories(dir / "t.jsonl");
    ServerConfig c;
    c.port = 0;
    c.strict_guidance = strict;
    c.static_dir = std::move(static_dir);
    server = std::make_unique<AnnotationServer>(*ws, c);
    const int port = server->start();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }
  ~Fixture() { server->stop(); }

  httplib::Result post(const Json& body) {
    return client->Post("/api/feedback", body.dump(), "application/json");
  }
};

Json body_of(const httplib::Result& r) { return Json::parse(r->body); }

TEST(Server, ListsAndFetchesTrajectories) {
  Fixture fx;
  auto r = fx.client->Get("/api/trajectories");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  Json list = body_of(r);
  ASSERT_EQ(list.size(), 10u);
  EXPECT_EQ(list[0]["step_count"], 3);
  EXPECT_EQ(list[0]["annotated"], false);
  EXPECT_TRUE(list[0]["split"].is_null());

  EXPECT_EQ(fx.client->Get("/api/trajectories?split=train")->status, 409);
  EXPECT_EQ(fx.client->Get("/api/trajectories?split=bogus")->status, 400);
  fx.ws->write_split(split_holdout({"t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9"},
                                   0.2, 1));
  EXPECT_EQ(body_of(fx.client->Get("/api/trajectories?split=holdout")).size(), 2u);
  EXPECT_EQ(body_of(fx.client->Get("/api/trajectories?split=train")).size(), 8u);

  auto one = fx.client->Get("/api/trajectories/t4");
  EXPECT_EQ(one->status, 200);
  EXPECT_EQ(body_of(one)["id"], "t4");
  EXPECT_EQ(body_of(one)["steps"].size(), 3u);
  EXPECT_EQ(fx.client->Get("/api/trajectories/zz")->status, 404);
}

TEST(Server, FeedbackAndProgress) {
  Fixture fx;
  for (const char* id : {"t1", "t2", "t3"}) {
    auto r = fx.post({{"trajectory_id", id}, {"annotator", "ann"},
                      {"text", "At step 1 it clicked the wrong link."}});
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 201);
    EXPECT_EQ(body_of(r)["replaced"], false);
  }
  auto again = fx.post({{"trajectory_id", "t1"}, {"annotator", "ann"}, {"text", "revised"}});
  EXPECT_EQ(again->status, 201);
  EXPECT_EQ(body_of(again)["replaced"], true);
  Json progress = body_of(fx.client->Get("/api/progress"));
  EXPECT_EQ(progress, (Json{{"annotated", 3}, {"total", 10}}));
  EXPECT_EQ(body_of(fx.client->Get("/api/trajectories"))[1]["annotated"], true);

  EXPECT_EQ(fx.post({{"trajectory_id", "nope"}, {"annotator", "a"}, {"text", "x"}})->status, 404);
  auto empty = fx.post({{"trajectory_id", "t1"}, {"annotator", "a"}, {"text", "  "}});
  EXPECT_EQ(empty->status, 422);
  EXPECT_TRUE(body_of(empty).contains("guidance"));
  EXPECT_EQ(fx.post({{"trajectory_id", "t1"}, {"annotator", ""}, {"text", "x"}})->status, 422);
  EXPECT_EQ(fx.client->Post("/api/feedback", "not json", "application/json")->status, 400);
  // Non-strict mode accepts generic verdicts.
  EXPECT_EQ(fx.post({{"trajectory_id", "t5"}, {"annotator", "a"}, {"text", "Good job!"}})->status,
            201);
}

TEST(Server, StrictGuidanceRejectsGenericVerdicts) {
  Fixture fx(true);
  auto r = fx.post({{"trajectory_id", "t1"}, {"annotator", "a"},
                    {"text", "Overall, the agent did a good job."}});
  EXPECT_EQ(r->status, 422);
  EXPECT_TRUE(body_of(r).contains("guidance"));
  EXPECT_EQ(fx.post({{"trajectory_id", "t1"}, {"annotator", "a"},
                     {"text", "Good: at step 2 it used the search filter."}})
                ->status,
            201);
  Json g = body_of(fx.client->Get("/api/guidance"));
  EXPECT_EQ(g["strict"], true);
  EXPECT_EQ(g["guidance"], annotation_guidance());
}

TEST(Server, GenericFeedbackDetection) {
  EXPECT_TRUE(is_generic_feedback("good"));
  EXPECT_TRUE(is_generic_feedback("  GOOD. "));
  EXPECT_FALSE(is_generic_feedback("Good: it found the filter at step 3."));
  EXPECT_FALSE(is_generic_feedback(""));
}

TEST(Server, StaticFilesOrPlaceholder) {
  {
    Fixture fx;
    auto r = fx.client->Get("/");
    EXPECT_EQ(r->status, 200);
    EXPECT_NE(r->get_header_value("Content-Type").find("text/html"), std::string::npos);
  }
  testing::TempDir assets;
  std::ofstream(assets / "index.html") << "<p>ui</p>";
  Fixture fx(false, assets.path().string());
  auto r = fx.client->Get("/index.html");
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->body, "<p>ui</p>");
}

TEST(Server, BindFailureIsIoError) {
  testing::TempDir dir;
  Workspace ws(dir.path());
  AnnotationServer a(ws, ServerConfig{"127.0.0.1", 0, "", false});
  const int port = a.start();
  AnnotationServer b(ws, ServerConfig{"127.0.0.1", port, "", false});
  EXPECT_THROW(b.start(), IoError);
  a.stop();
}

}  // namespace
}  // namespace autolibra
