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

#include <set>

#include "autolibra/clustering.hpp"
#include "autolibra/core/errors.hpp"
#include "test_support.hpp"

namespace autolibra {
namespace {

using testing::ScriptedBackend;

std::vector<Aspect> sample_aspects(std::size_t n) {
  std::vector<Aspect> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(testing::make_aspect("asp" + std::to_string(i), "t",
                                       i % 2 ? Polarity::kNegative : Polarity::kPositive));
  }
  return out;
}

// Splits the presented aspects round-robin into `n` metrics.
Json round_robin(const Json& p, std::size_t n) {
  Json metrics = Json::array();
  for (std::size_t k = 0; k < n; ++k) {
    metrics.push_back({{"name", "Metric " + std::to_string(k)},
                       {"definition", "criteria " + std::to_string(k)},
                       {"good_examples", Json::array()},
                       {"bad_examples", Json::array()}});
  }
  const Json& aspects = p.at("aspects");
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    const bool pos = aspects[i].at("sign") == "positive";
    metrics[i % n][pos ? "good_examples" : "bad_examples"].push_back(aspects[i].at("key"));
  }
  return {{"metrics", metrics}};
}

TEST(Clustering, PresentAspectsIsSeededAndBalanced) {
  auto aspects = sample_aspects(10);
  auto a = present_aspects(aspects, 3, {});
  auto b = present_aspects(aspects, 3, {});
  ASSERT_EQ(a.aspects.size(), 10u);
  EXPECT_EQ(a.aspects, b.aspects);
  EXPECT_EQ(a.keys.front(), "a1");
  // Alternates signs while both remain.
  EXPECT_EQ(a.aspects[0]->sign, Polarity::kPositive);
  EXPECT_EQ(a.aspects[1]->sign, Polarity::kNegative);
}

TEST(Clustering, BudgetTruncatesOrRefuses) {
  auto aspects = sample_aspects(10);
  ClusteringOptions small;
  small.token_budget = 1;
  EXPECT_THROW(present_aspects(aspects, 0, small), InvalidArgumentError);
  const std::size_t per = present_aspects(sample_aspects(1), 0, {}).aspects.size();
  ASSERT_EQ(per, 1u);
  ClusteringOptions mid;
  mid.token_budget = 8 * 40;  // room for roughly 8 entries
  auto p = present_aspects(aspects, 0, mid);
  EXPECT_GE(p.aspects.size() * 2, p.total);
  EXPECT_LE(p.aspects.size(), 10u);
}

TEST(Clustering, RequestShape) {
  auto aspects = sample_aspects(4);
  ClusteringOptions o;
  o.scope_noun_a = "recipe";
  o.scope_noun_b = "ingredient";
  auto req = clustering_request(present_aspects(aspects, 1, o), 3, 1, o);
  EXPECT_EQ(req.output_schema->name, "metric_set");
  EXPECT_EQ(req.seed_hint, 1);
  EXPECT_NE(req.messages[0].text.find("recipe"), std::string::npos);
  EXPECT_NE(req.messages[0].text.find("exactly 3"), std::string::npos);
  auto p = extract_payload(req);
  EXPECT_EQ(p->at("n"), 3);
  EXPECT_EQ(p->at("aspects").size(), 4u);
}

TEST(Clustering, BuildsMetricSet) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on("metric_set", [](const Json& p, const ModelRequest&, int) {
    return round_robin(p, p.at("n").get<std::size_t>());
  });
  auto gw = testing::live_gateway(backend);
  auto aspects = sample_aspects(6);
  MetricSet ms = cluster_aspects(*gw, aspects, 3, 7, {}, 2);
  ASSERT_EQ(ms.metrics.size(), 3u);
  EXPECT_EQ(ms.requested_n, 3u);
  EXPECT_EQ(ms.metrics[0].id, "metric-0");
  EXPECT_EQ(ms.provenance.seed, 7);
  EXPECT_EQ(ms.provenance.candidate_index, 2);
  EXPECT_EQ(ms.id, compute_metric_set_id(ms));
  EXPECT_EQ(ms.id.rfind("ms-", 0), 0u);
  std::set<std::string> excerpts;
  for (const auto& a : aspects) excerpts.insert(a.behavior.excerpt);
  for (const auto& m : ms.metrics) {
    for (const auto& e : m.good_examples) EXPECT_TRUE(excerpts.count(e)) << e;
    for (const auto& e : m.bad_examples) EXPECT_TRUE(excerpts.count(e)) << e;
  }
  EXPECT_TRUE(validate_metric_set(ms).ok());
}

TEST(Clustering, CardinalityRepromptsThenFails) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on("metric_set", [](const Json& p, const ModelRequest&, int attempt) {
    const std::size_t n = p.at("n").get<std::size_t>();
    return round_robin(p, attempt < 2 ? n + 1 : n);
  });
  auto gw = testing::live_gateway(backend);
  EXPECT_EQ(cluster_aspects(*gw, sample_aspects(6), 2, 0).metrics.size(), 2u);
  EXPECT_EQ(backend->calls("metric_set"), 3u);

  auto stubborn = std::make_shared<ScriptedBackend>();
  stubborn->on("metric_set", [](const Json& p, const ModelRequest&, int) {
    return round_robin(p, 1);
  });
  auto gw2 = testing::live_gateway(stubborn);
  EXPECT_THROW(cluster_aspects(*gw2, sample_aspects(6), 2, 0), CardinalityError);
  EXPECT_EQ(stubborn->calls("metric_set"), 4u);  // first ask plus 3 re-prompts
}

TEST(Clustering, SchemaProblems) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on("metric_set", [](const Json& p, const ModelRequest&, int) {
    Json out = round_robin(p, 2);
    out["metrics"][1]["definition"] = "  ";
    return out;
  });
  auto gw = testing::live_gateway(backend);
  EXPECT_THROW(cluster_aspects(*gw, sample_aspects(4), 2, 0), SchemaError);

  auto unknown = std::make_shared<ScriptedBackend>();
  unknown->on("metric_set", [](const Json& p, const ModelRequest&, int) {
    Json out = round_robin(p, 2);
    out["metrics"][0]["good_examples"] = {"zz"};
    out["metrics"][0]["bad_examples"] = Json::array();
    return out;
  });
  auto gw2 = testing::live_gateway(unknown);
  EXPECT_THROW(cluster_aspects(*gw2, sample_aspects(4), 2, 0), SchemaError);
  EXPECT_THROW(cluster_aspects(*gw2, {}, 2, 0), InvalidArgumentError);
}

MetricSet parent_set() {
  MetricSet ms = testing::make_metric_set({"search", "cart"});
  ms.metrics[0].definition = "Looks  for items   precisely.";  // odd spacing kept
  ms.id = compute_metric_set_id(ms);
  return ms;
}

Json echo_existing(const Json& p, bool tamper) {
  Json metrics = Json::array();
  for (const auto& m : p.at("existing_metrics")) {
    Json copy = {{"id", m.at("id")},
                 {"name", m.at("name")},
                 {"definition", m.at("definition")},
                 {"good_examples", {p.at("aspects")[0].at("key")}},
                 {"bad_examples", Json::array()}};
    if (tamper) copy["definition"] = m.at("definition").get<std::string>() + " Also fast.";
    metrics.push_back(copy);
  }
  metrics.push_back({{"id", ""},
                     {"name", "Checkout"},
                     {"definition", "Completes payment."},
                     {"good_examples", Json::array()},
                     {"bad_examples", {p.at("aspects")[1].at("key")}}});
  return {{"metrics", metrics}};
}

TEST(Iterative, KeepsParentDefinitionsVerbatim) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->on("iterative_metric_set", [](const Json& p, const ModelRequest&, int) {
    return echo_existing(p, false);
  });
  auto gw = testing::live_gateway(backend);
  MetricSet parent = parent_set();
  MetricSet child = cluster_iterative(*gw, sample_aspects(4), parent, 5);
  ASSERT_EQ(child.metrics.size(), 3u);
  EXPECT_EQ(child.parent_id, parent.id);
  for (std::size_t i = 0; i < parent.metrics.size(); ++i) {
    EXPECT_EQ(child.metrics[i].id, parent.metrics[i].id);
    EXPECT_EQ(child.metrics[i].definition, parent.metrics[i].definition);
    EXPECT_EQ(child.metrics[i].name, parent.metrics[i].name);
    EXPECT_GT(child.metrics[i].good_examples.size(), parent.metrics[i].good_examples.size());
  }
  EXPECT_EQ(child.metrics[2].id, "checkout");
  EXPECT_NE(child.id, parent.id);
}

TEST(Iterative, TamperingIsCorrectedOrRejected) {
  auto once = std::make_shared<ScriptedBackend>();
  once->on("iterative_metric_set", [](const Json& p, const ModelRequest&, int attempt) {
    return echo_existing(p, attempt == 0);
  });
  auto gw = testing::live_gateway(once);
  MetricSet parent = parent_set();
  MetricSet child = cluster_iterative(*gw, sample_aspects(4), parent, 5);
  EXPECT_EQ(child.metrics[0].definition, parent.metrics[0].definition);
  EXPECT_EQ(once->calls("iterative_metric_set"), 2u);

  auto always = std::make_shared<ScriptedBackend>();
  always->on("iterative_metric_set", [](const Json& p, const ModelRequest&, int) {
    return echo_existing(p, true);
  });
  auto gw2 = testing::live_gateway(always);
  EXPECT_THROW(cluster_iterative(*gw2, sample_aspects(4), parent, 5), FrozenDefinitionError);

  auto dropper = std::make_shared<ScriptedBackend>();
  dropper->on("iterative_metric_set", [](const Json& p, const ModelRequest&, int) {
    Json out = echo_existing(p, false);
    out["metrics"].erase(0);
    return out;
  });
  auto gw3 = testing::live_gateway(dropper);
  EXPECT_THROW(cluster_iterative(*gw3, sample_aspects(4), parent, 5), FrozenDefinitionError);
}

TEST(StripExamples, IsIdempotentAndMarksAblation) {
  MetricSet ms = parent_set();
  MetricSet a = strip_examples(ms);
  EXPECT_TRUE(a.provenance.ablation);
  for (const auto& m : a.metrics) {
    EXPECT_TRUE(m.good_examples.empty());
    EXPECT_TRUE(m.bad_examples.empty());
  }
  EXPECT_EQ(strip_examples(a), a);
  EXPECT_EQ(a.metrics[0].definition, ms.metrics[0].definition);
  EXPECT_TRUE(validate_metric_set(a).ok());
  MetricSet bare = ms;
  bare.metrics[0].good_examples.clear();
  bare.metrics[0].bad_examples.clear();
  EXPECT_FALSE(validate_metric_set(bare).ok());
}

TEST(MetricSetId, DependsOnContent) {
  MetricSet a = parent_set();
  MetricSet b = a;
  b.id = "something else";
  EXPECT_EQ(compute_metric_set_id(a), compute_metric_set_id(b));
  b.metrics[1].definition += "!";
  EXPECT_NE(compute_metric_set_id(a), compute_metric_set_id(b));
}

}  // namespace
}  // namespace autolibra
