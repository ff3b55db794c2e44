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

#include "autolibra/core/errors.hpp"
#include "autolibra/meta_eval.hpp"
#include "test_support.hpp"

namespace autolibra {
namespace {

using testing::make_aspect;
using testing::ScriptedBackend;

constexpr Polarity kPos = Polarity::kPositive;
constexpr Polarity kNeg = Polarity::kNegative;

Json matches(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  Json out = Json::array();
  for (const auto& [a, t] : pairs) out.push_back({{"aspect_id", a}, {"trait_id", t}});
  return {{"matches", out}};
}

TEST(Matching, RequestShape) {
  std::vector<Aspect> aspects = {make_aspect("a1", "t", kPos)};
  std::vector<Trait> traits = {{"t", "m1", kNeg}};
  MetricSet ms = testing::make_metric_set({"m1"});
  auto req = matching_request(aspects, traits, &ms, {});
  auto p = extract_payload(req);
  EXPECT_EQ(req.output_schema->name, "matches");
  EXPECT_EQ(p->at("aspects")[0].at("sign"), "positive");
  EXPECT_EQ(p->at("traits")[0].at("polarity"), "negative");
  EXPECT_EQ(p->at("traits")[0].at("definition"), ms.metrics[0].definition);
  EXPECT_EQ(p->at("traits")[0].at("good_examples"), Json(ms.metrics[0].good_examples));
  auto bare = extract_payload(matching_request(aspects, traits, nullptr, {}));
  EXPECT_FALSE(bare->at("traits")[0].contains("definition"));
}

TEST(Matching, DiscardsInconsistentProposals) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on("matches", [](const Json&, const ModelRequest&, int) {
    return matches({{"a1", "m1"},     // ok
                    {"a1", "m2"},     // second proposal for a1 ignored
                    {"a2", "m2"},     // sign mismatch
                    {"a3", "ghost"},  // unknown trait
                    {"a4", ""},       // explicit no match
                    {"zz", "m1"}});   // unknown aspect
  });
  auto gw = testing::live_gateway(backend);
  std::vector<Aspect> aspects = {make_aspect("a1", "t", kPos), make_aspect("a2", "t", kPos),
                                 make_aspect("a3", "t", kNeg), make_aspect("a4", "t", kNeg)};
  std::vector<Trait> traits = {{"t", "m1", kPos}, {"t", "m2", kNeg}, {"t", "m3", kPos}};
  MatchRecord rec = match_instance(*gw, "t", "f", aspects, traits);
  ASSERT_EQ(rec.pairs.size(), 4u);
  EXPECT_EQ(rec.matched_aspects(), 1u);
  EXPECT_EQ(rec.pairs[0].trait->metric_id, "m1");
  EXPECT_FALSE(rec.pairs[1].trait);
  ASSERT_EQ(rec.unmatched_traits.size(), 2u);
  EXPECT_EQ(rec.trait_count(), 3u);
}

TEST(Matching, NoCallWhenEitherSideEmpty) {
  auto backend = std::make_shared<ScriptedBackend>();
  auto gw = testing::live_gateway(backend);
  auto rec = match_instance(*gw, "t", "f", {make_aspect("a1", "t", kPos)}, {});
  EXPECT_EQ(rec.matched_aspects(), 0u);
  auto rec2 = match_instance(*gw, "t", "f", {}, {{"t", "m1", kPos}});
  EXPECT_EQ(rec2.unmatched_traits.size(), 1u);
  EXPECT_EQ(backend->total_calls(), 0u);
}

TEST(Oracle, PrefersMoreMatchesThenSmallestIds) {
  std::vector<Aspect> aspects = {make_aspect("a2", "t", kPos), make_aspect("a1", "t", kPos),
                                 make_aspect("a3", "t", kNeg)};
  std::vector<Trait> traits = {{"t", "m2", kPos}, {"t", "m1", kPos}, {"t", "m3", kPos}};
  SimilarityRelation rel = {{"a1", "m2"}, {"a1", "m1"}, {"a2", "m2"}, {"a3", "m3"}};
  auto rec = oracle_match("t", "f", aspects, traits, rel);
  // a3 relates only to a trait of the other polarity.
  EXPECT_EQ(rec.matched_aspects(), 2u);
  EXPECT_EQ(rec.pairs[0].aspect_id, "a2");  // input order kept
  EXPECT_EQ(rec.pairs[0].trait->metric_id, "m2");
  EXPECT_EQ(rec.pairs[1].trait->metric_id, "m1");
  EXPECT_FALSE(rec.pairs[2].trait);
  ASSERT_EQ(rec.unmatched_traits.size(), 1u);
  EXPECT_EQ(rec.unmatched_traits[0].metric_id, "m3");
}

MatchRecord record(std::size_t aspects, std::size_t matched, std::size_t traits,
                   std::size_t unmatched_traits, const std::string& id = "t") {
  MatchRecord r;
  r.trajectory_id = id;
  for (std::size_t i = 0; i < aspects; ++i) {
    MatchPair p{"a" + std::to_string(i), std::nullopt};
    if (i < matched) p.trait = Trait{id, "m" + std::to_string(i % (traits - unmatched_traits)), kPos};
    r.pairs.push_back(p);
  }
  for (std::size_t i = 0; i < unmatched_traits; ++i) {
    r.unmatched_traits.push_back({id, "u" + std::to_string(i), kNeg});
  }
  return r;
}

TEST(QualityReport, PoolsAcrossInstances) {
  // 3 of 4 aspects and 1 of 2 traits unmatched in the first; 1 of 2 in the second.
  std::vector<MatchRecord> recs = {record(4, 3, 3, 1, "t1"), record(2, 1, 2, 1, "t2")};
  ASSERT_EQ(recs[0].trait_count(), 3u);
  auto q = quality_report(recs, "ms", Split::kTrain);
  EXPECT_EQ(q.coverage, Fraction(4, 6));
  EXPECT_EQ(q.redundancy, Fraction(2, 5));
  EXPECT_EQ(q.counts, (QualityCounts{6, 4, 5, 2}));
  EXPECT_TRUE(q.flagged_instances.empty());
}

TEST(QualityReport, EdgeCases) {
  EXPECT_THROW(quality_report({}, "ms", Split::kAll), EmptyEvaluationError);
  MatchRecord no_traits;
  no_traits.pairs = {{"a", std::nullopt}};
  auto q = quality_report({no_traits}, "ms", Split::kAll);
  EXPECT_EQ(q.coverage, Fraction(0, 1));
  EXPECT_FALSE(q.redundancy.has_value());

  MatchRecord only_traits;
  only_traits.trajectory_id = "lonely";
  only_traits.unmatched_traits = {{"lonely", "m", kPos}};
  auto q2 = quality_report({no_traits, only_traits}, "ms", Split::kAll);
  EXPECT_EQ(q2.flagged_instances, std::vector<std::string>{"lonely"});
  EXPECT_EQ(q2.redundancy, Fraction(1, 1));
}

TEST(Evaluate, JudgesMatchesAndReports) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on("ratings", [](const Json& p, const ModelRequest&, int) {
    Json ratings = Json::array();
    for (const auto& m : p.at("metrics")) {
      ratings.push_back({{"metric_id", m.at("id")},
                         {"value", m.at("id") == "good" ? "+1" : "-1"},
                         {"rationale", ""}});
    }
    return Json{{"ratings", ratings}};
  });
  backend->on("matches", [](const Json& p, const ModelRequest&, int) {
    Json out = Json::array();
    for (const auto& a : p.at("aspects")) {
      out.push_back({{"aspect_id", a.at("id")},
                     {"trait_id", a.at("sign") == "positive" ? "good" : ""}});
    }
    return Json{{"matches", out}};
  });
  auto gw = testing::live_gateway(backend);
  std::vector<Instance> instances;
  for (int i = 0; i < 3; ++i) {
    const std::string id = "t" + std::to_string(i);
    Instance inst{testing::make_trajectory(id, 2), testing::make_feedback(id, "x"), {}};
    inst.aspects = {make_aspect(id + "-a", id, kPos), make_aspect(id + "-b", id, kNeg)};
    instances.push_back(inst);
  }
  EvaluationOptions o;
  o.max_parallel = 2;
  auto ev = evaluate_metric_set(*gw, instances, testing::make_metric_set({"good", "bad"}),
                                Split::kHoldout, o);
  EXPECT_EQ(ev.ratings.size(), 6u);
  EXPECT_EQ(ev.records.size(), 3u);
  EXPECT_EQ(ev.report.coverage, Fraction(1, 2));
  EXPECT_EQ(ev.report.redundancy, Fraction(1, 2));
  EXPECT_EQ(ev.report.split, Split::kHoldout);
  EXPECT_EQ(ev.report.metric_set_id, "ms-test");
  EXPECT_THROW(evaluate_metric_set(*gw, {}, testing::make_metric_set({"good"}), Split::kAll, o),
               EmptyEvaluationError);
}

}  // namespace
}  // namespace autolibra
