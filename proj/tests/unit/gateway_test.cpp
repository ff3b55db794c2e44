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

#include <atomic>
#include <thread>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/json_io.hpp"
#include "autolibra/llm/backends.hpp"
#include "autolibra/llm/gateway.hpp"
#include "test_support.hpp"

namespace autolibra {
namespace {

using testing::ScriptedBackend;

const Json kSchema = Json::parse(R"({
  "type": "object",
  "properties": {
    "label": {"type": "string", "enum": ["yes", "no"]},
    "count": {"type": "integer"},
    "items": {"type": "array", "items": {"type": "number"}}
  },
  "required": ["label", "count"]
})");

ModelRequest structured_request(const std::string& text = "hi") {
  ModelRequest r;
  r.model_name = "m";
  r.messages = {{Role::kUser, with_payload(text, {{"x", 1}})}};
  r.output_schema = OutputSchema{"probe", kSchema};
  return r;
}

TEST(Schema, AcceptsAndRejects) {
  EXPECT_TRUE(validate_against_schema(Json::parse(R"({"label":"yes","count":2})"), kSchema)
                  .empty());
  EXPECT_FALSE(validate_against_schema(Json::parse(R"({"label":"maybe","count":2})"), kSchema)
                   .empty());
  EXPECT_FALSE(validate_against_schema(Json::parse(R"({"label":"yes"})"), kSchema).empty());
  EXPECT_FALSE(
      validate_against_schema(Json::parse(R"({"label":"yes","count":1.5})"), kSchema).empty());
  EXPECT_FALSE(validate_against_schema(
                   Json::parse(R"({"label":"yes","count":1,"items":["a"]})"), kSchema)
                   .empty());
}

TEST(Reply, ParsesFencedJson) {
  EXPECT_EQ(parse_json_reply("```json\n{\"a\": 1}\n```")->at("a"), 1);
  EXPECT_EQ(parse_json_reply(" {\"a\": 2} ")->at("a"), 2);
  EXPECT_FALSE(parse_json_reply("no json here").has_value());
}

TEST(Payload, ExtractsLastPayload) {
  ModelRequest r = structured_request();
  r.messages.push_back({Role::kAssistant, "bad"});
  r.messages.push_back({Role::kUser, "please fix"});
  auto p = extract_payload(r);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->at("x"), 1);
}

TEST(Digest, IgnoresSchemaKeyOrderButNotContent) {
  ModelRequest a = structured_request();
  ModelRequest b = a;
  b.output_schema->schema = Json::parse(kSchema.dump());  // same content
  EXPECT_EQ(request_digest(a), request_digest(b));
  b.temperature = 0.5;
  EXPECT_NE(request_digest(a), request_digest(b));
  ModelRequest c = a;
  c.seed_hint = 3;
  EXPECT_NE(request_digest(a), request_digest(c));
}

TEST(Gateway, StructuredOutputRepromptsThenSucceeds) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on_raw("probe", [](const Json&, const ModelRequest&, int attempt) {
    if (attempt == 0) return std::string("not json");
    if (attempt == 1) return std::string(R"({"label":"maybe","count":1})");
    return std::string(R"({"label":"yes","count":1})");
  });
  auto gw = testing::live_gateway(backend);
  auto resp = gw->complete(structured_request());
  ASSERT_TRUE(resp.structured);
  EXPECT_EQ(resp.structured->at("label"), "yes");
  EXPECT_EQ(backend->calls("probe"), 3u);
}

TEST(Gateway, StructuredOutputGivesUp) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on_raw("probe", [](const Json&, const ModelRequest&, int) {
    return std::string("{}");
  });
  auto gw = testing::live_gateway(backend, 2);
  EXPECT_THROW(gw->complete(structured_request()), StructuredOutputError);
  EXPECT_EQ(backend->calls("probe"), 2u);
}

class FlakyBackend : public ModelBackend {
 public:
  explicit FlakyBackend(int failures) : failures_(failures) {}
  RawCompletion complete(const ModelRequest&) override {
    if (calls_++ < failures_) throw TransientBackendError("503");
    return {R"({"label":"no","count":0})", {}, Json::object()};
  }
  int calls() const { return calls_; }

 private:
  int failures_;
  std::atomic<int> calls_{0};
};

TEST(Gateway, RetriesTransientFailures) {
  auto ok = std::make_shared<FlakyBackend>(2);
  EXPECT_EQ(testing::live_gateway(ok)->complete(structured_request()).structured->at("label"),
            "no");
  EXPECT_EQ(ok->calls(), 3);

  auto dead = std::make_shared<FlakyBackend>(100);
  EXPECT_THROW(testing::live_gateway(dead)->complete(structured_request()), TransportError);
  EXPECT_EQ(dead->calls(), 4);  // first try plus 3 retries
}

TEST(Gateway, RecordThenReplay) {
  testing::TempDir dir;
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on("probe", [](const Json& p, const ModelRequest&, int) {
    return Json{{"label", "yes"}, {"count", p.at("x")}};
  });
  GatewayOptions rec;
  rec.mode = CassetteMode::kRecord;
  rec.cassette_path = dir / "c.jsonl";
  {
    Gateway gw(backend, rec);
    gw.complete(structured_request("one"));
    gw.complete(structured_request("two"));
  }
  EXPECT_EQ(read_jsonl(dir / "c.jsonl").size(), 2u);

  GatewayOptions rep = rec;
  rep.mode = CassetteMode::kReplay;
  Gateway replay(nullptr, rep);
  EXPECT_EQ(replay.complete(structured_request("two")).structured->at("count"), 1);
  EXPECT_EQ(replay.backend_calls(), 0u);
  EXPECT_THROW(replay.complete(structured_request("three")), CassetteMissError);

  rep.cassette_path = dir / "missing.jsonl";
  EXPECT_THROW(Gateway(nullptr, rep), CassetteMissError);
  EXPECT_THROW(Gateway(nullptr, GatewayOptions{}), InvalidArgumentError);
}

TEST(Gateway, BatchKeepsOrderAndTagsFailures) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on_raw("probe", [](const Json&, const ModelRequest& r, int) {
    const std::string& text = r.messages[0].text;
    if (text.rfind("fail", 0) == 0) return std::string("nope");
    return Json{{"label", "yes"}, {"count", static_cast<int>(text.size())}}.dump();
  });
  auto gw = testing::live_gateway(backend, 1);
  std::vector<ModelRequest> reqs;
  for (int i = 0; i < 20; ++i) reqs.push_back(structured_request(std::string(i + 1, 'a')));
  auto out = gw->complete_batch(reqs, 6);
  ASSERT_EQ(out.size(), 20u);
  for (std::size_t i = 1; i < out.size(); ++i) {
    EXPECT_LT(out[i - 1].structured->at("count").get<int>(),
              out[i].structured->at("count").get<int>());
  }
  reqs[7] = structured_request("fail here");
  try {
    gw->complete_batch(reqs, 1);
    FAIL() << "expected BatchError";
  } catch (const BatchError& e) {
    EXPECT_EQ(e.index(), 7u);
    EXPECT_EQ(e.code(), ErrorCode::kStructuredOutput);
  }
}

TEST(CassetteMode, Names) {
  EXPECT_EQ(parse_cassette_mode("record"), CassetteMode::kRecord);
  EXPECT_STREQ(to_string(CassetteMode::kReplay), "replay");
  EXPECT_THROW(parse_cassette_mode("tape"), Error);
}

TEST(HttpBackend, RequestBody) {
  ModelRequest r = structured_request();
  r.model_name = "o3-mini@high";
  r.seed_hint = 5;
  Json body = HttpBackend::request_body(r);
  EXPECT_EQ(body["model"], "o3-mini");
  EXPECT_EQ(body["reasoning_effort"], "high");
  EXPECT_FALSE(body.contains("temperature"));
  EXPECT_EQ(body["seed"], 5);
  EXPECT_EQ(body["response_format"]["json_schema"]["name"], "probe");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  r.model_name = "gpt-4o";
  r.temperature = 0.7;
  EXPECT_DOUBLE_EQ(HttpBackend::request_body(r)["temperature"].get<double>(), 0.7);
}

TEST(HttpBackend, TalksToChatCompletionsEndpoint) {
  httplib::Server srv;
  std::atomic<int> hits{0};
  srv.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 429;
      return;
    }
    EXPECT_EQ(req.get_header_value("Authorization"), "Bearer k");
    Json body = Json::parse(req.body);
    Json reply = {{"id", "c1"},
                  {"model", body["model"]},
                  {"choices", {{{"message", {{"content", R"({"label":"yes","count":7})"}}}}}},
                  {"usage", {{"prompt_tokens", 3}, {"completion_tokens", 4}}}};
    res.set_content(reply.dump(), "application/json");
  });
  srv.Post("/bad/chat/completions",
           [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  const int port = srv.bind_to_any_port("127.0.0.1");
  std::thread th([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();

  HttpBackendOptions o;
  o.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  o.api_key = "k";
  auto gw = testing::live_gateway(std::make_shared<HttpBackend>(o));
  auto resp = gw->complete(structured_request());
  EXPECT_EQ(resp.structured->at("count"), 7);
  EXPECT_EQ(resp.usage.completion_tokens, 4);
  EXPECT_EQ(hits.load(), 2);

  o.base_url = "http://127.0.0.1:" + std::to_string(port) + "/bad";
  EXPECT_THROW(testing::live_gateway(std::make_shared<HttpBackend>(o))
                   ->complete(structured_request()),
               TransportError);
  srv.stop();
  th.join();
}

}  // namespace
}  // namespace autolibra
