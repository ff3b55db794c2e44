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

#include <map>
#include <set>

#include "autolibra/core/errors.hpp"
#include "autolibra/optimizer.hpp"
#include "test_support.hpp"

namespace autolibra {
namespace {

using testing::ScriptedBackend;

MetricSet sized(std::size_t n, const std::string& id, std::int64_t index = 0) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("m" + std::to_string(i));
  MetricSet ms = testing::make_metric_set(ids, id);
  ms.provenance.candidate_index = index;
  return ms;
}

CandidateScore scored(std::size_t n, Fraction cov, OptFraction red,
                      const std::string& id, std::int64_t index = 0) {
  CandidateScore c;
  c.metric_set = sized(n, id, index);
  c.coverage = cov;
  c.redundancy = red;
  return c;
}

Evaluation eval_of(Fraction cov, OptFraction red) {
  Evaluation ev;
  ev.report.coverage = cov;
  ev.report.redundancy = red;
  return ev;
}

TEST(SelectBest, BandThenRedundancyThenSize) {
  std::vector<CandidateScore> v = {
      scored(5, Fraction(90, 100), Fraction(1, 2), "a"),
      scored(6, Fraction(895, 1000), Fraction(1, 5), "b"),  // inside band
      scored(4, Fraction(85, 100), Fraction(0, 1), "c"),    // outside band
  };
  EXPECT_EQ(select_best_index(v, 0.01), 1u);
  EXPECT_EQ(select_best_index(v, 0.0), 0u);
  EXPECT_EQ(select_best(v, 0.1).metric_set.id, "c");

  std::vector<CandidateScore> ties = {
      scored(5, Fraction(1, 2), std::nullopt, "x"),
      scored(5, Fraction(1, 2), Fraction(1, 3), "y", 3),
      scored(4, Fraction(1, 2), Fraction(1, 3), "z", 7),
      scored(4, Fraction(1, 2), Fraction(1, 3), "w", 2),
  };
  EXPECT_EQ(select_best(ties, 0.0).metric_set.id, "w");
  ties[3].metric_set.provenance.candidate_index = 7;
  EXPECT_EQ(select_best(ties, 0.0).metric_set.id, "w");  // id breaks the tie
  EXPECT_THROW(select_best_index({}, 0.01), InvalidArgumentError);
}

TEST(SelectBest, UndefinedRedundancyLosesToDefined) {
  std::vector<CandidateScore> v = {scored(2, Fraction(1, 1), std::nullopt, "a"),
                                   scored(9, Fraction(1, 1), Fraction(9, 10), "b")};
  EXPECT_EQ(select_best_index(v, 0.0), 1u);
}

TEST(Ranges, InitialAndRefined) {
  OptimizerConfig cfg;
  EXPECT_EQ(initial_range(cfg), (NRange{4, 13}));
  EXPECT_EQ(refined_range(cfg, 6), (NRange{4, 8}));
  EXPECT_EQ(refined_range(cfg, 2), (NRange{1, 4}));
  EXPECT_EQ(refined_range(cfg, 13), (NRange{11, 13}));
  cfg.refine_radius = 0;
  EXPECT_EQ(refined_range(cfg, 7), (NRange{7, 7}));
}

TEST(Config, Validation) {
  OptimizerConfig cfg;
  EXPECT_NO_THROW(validate_config(cfg));
  cfg.n_min = 0;
  EXPECT_THROW(validate_config(cfg), InvalidArgumentError);
  cfg = {};
  cfg.n_min = 9;
  cfg.n_max = 8;
  EXPECT_THROW(validate_config(cfg), InvalidArgumentError);
  cfg = {};
  cfg.sets_per_n = 0;
  EXPECT_THROW(validate_config(cfg), InvalidArgumentError);
  cfg = {};
  cfg.coverage_band = -0.1;
  EXPECT_THROW(validate_config(cfg), InvalidArgumentError);
  cfg = {};
  cfg.max_rounds = 0;
  EXPECT_THROW(validate_config(cfg), InvalidArgumentError);
}

TEST(CandidateSeed, DistinctAndStable) {
  OptimizerConfig cfg;
  cfg.seed = 11;
  std::set<std::int64_t> seen;
  for (std::size_t r = 1; r <= 3; ++r) {
    for (std::size_t n = 4; n <= 13; ++n) {
      for (std::size_t k = 0; k < 2; ++k) {
        auto s = candidate_seed(cfg, r, n, k);
        EXPECT_GE(s, 0);
        seen.insert(s);
      }
    }
  }
  EXPECT_EQ(seen.size(), 60u);
  EXPECT_EQ(candidate_seed(cfg, 1, 4, 0), candidate_seed(cfg, 1, 4, 0));
  OptimizerConfig other = cfg;
  other.seed = 12;
  EXPECT_NE(candidate_seed(cfg, 1, 4, 0), candidate_seed(other, 1, 4, 0));
}

// Returns the requested number of metrics, except for sizes in `broken`.
std::shared_ptr<ScriptedBackend> clusterer(std::set<std::size_t> broken) {
  auto b = std::make_shared<ScriptedBackend>();
  b->on("metric_set", [broken](const Json& p, const ModelRequest&, int) {
    std::size_t n = p.at("n").get<std::size_t>();
    if (broken.count(n)) n += 1;
    Json metrics = Json::array();
    for (std::size_t k = 0; k < n; ++k) {
      metrics.push_back({{"name", "Metric " + std::to_string(k)},
                         {"definition", "criteria " + std::to_string(k)},
                         {"good_examples", Json::array()},
                         {"bad_examples", Json::array()}});
    }
    const Json& aspects = p.at("aspects");
    for (std::size_t i = 0; i < aspects.size(); ++i) {
      metrics[i % n]["good_examples"].push_back(aspects[i].at("key"));
    }
    return Json{{"metrics", metrics}};
  });
  return b;
}

std::vector<Aspect> some_aspects() {
  std::vector<Aspect> out;
  for (int i = 0; i < 8; ++i) {
    out.push_back(testing::make_aspect("a" + std::to_string(i), "t", Polarity::kPositive));
  }
  return out;
}

TEST(GenerateCandidates, DropsFailuresUpToHalf) {
  OptimizerConfig cfg;
  cfg.sets_per_n = 2;
  auto gw = testing::live_gateway(clusterer({3}));
  auto out = generate_candidates(*gw, some_aspects(), cfg, {2, 3}, 1, {}, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].metrics.size(), 2u);
  EXPECT_EQ(out[0].provenance.seed, candidate_seed(cfg, 1, 2, 0));
  EXPECT_EQ(out[1].provenance.seed, candidate_seed(cfg, 1, 2, 1));
  EXPECT_NE(out[0].id, out[1].id);

  auto gw2 = testing::live_gateway(clusterer({3, 4}));
  EXPECT_THROW(generate_candidates(*gw2, some_aspects(), cfg, {2, 4}, 1, {}, 2),
               OptimizerError);
  EXPECT_THROW(generate_candidates(*gw, {}, cfg, {2, 3}, 1, {}, 2),
               InvalidArgumentError);
}

TEST(OptimizeLoop, StopsWhenSelectedSizeRepeats) {
  OptimizerConfig cfg;
  std::vector<NRange> ranges;
  auto gen = [&](std::size_t round, NRange r) {
    ranges.push_back(r);
    std::vector<MetricSet> out;
    for (std::size_t n = r.lo; n <= r.hi; ++n) {
      out.push_back(sized(n, "r" + std::to_string(round) + "n" + std::to_string(n)));
    }
    return out;
  };
  auto score = [](const MetricSet& ms) {
    const auto n = static_cast<std::int64_t>(ms.metrics.size());
    return eval_of(Fraction(std::min<std::int64_t>(n, 6), 6),
                   n == 6 ? Fraction(1, 10) : Fraction(1, 2));
  };
  auto res = optimize_loop(cfg, gen, score);
  ASSERT_EQ(ranges.size(), 2u);
  EXPECT_EQ(ranges[0], (NRange{4, 13}));
  EXPECT_EQ(ranges[1], (NRange{4, 8}));
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.stop_reason, "repeat-n");
  EXPECT_EQ(res.metric_set.id, "r2n6");

  Json h = optimize_history_json(res);
  EXPECT_EQ(h["rounds"].size(), 2u);
  EXPECT_EQ(h["rounds"][0]["range"], Json::array({4, 13}));
  EXPECT_EQ(h["rounds"][0]["candidates"].size(), 10u);
  EXPECT_EQ(h["rounds"][0]["candidates"][2]["selected"], true);
  EXPECT_EQ(h["rounds"][0]["candidates"][2]["redundancy"], 0.1);
  EXPECT_EQ(h["selected_metric_set_id"], "r2n6");
  EXPECT_EQ(h["stop_reason"], "repeat-n");
}

TEST(OptimizeLoop, ToleranceAndMaxRounds) {
  OptimizerConfig cfg;
  // Round k offers one candidate of size 10 - k.
  auto gen = [](std::size_t round, NRange) {
    return std::vector<MetricSet>{sized(10 - round, "r" + std::to_string(round))};
  };
  auto flat = [](const MetricSet&) { return eval_of(Fraction(1, 2), Fraction(1, 4)); };
  auto res = optimize_loop(cfg, gen, flat);
  EXPECT_EQ(res.stop_reason, "tolerance");
  EXPECT_EQ(res.history.size(), 2u);
  EXPECT_EQ(res.metric_set.id, "r2");

  // Coverage keeps moving by more than the tolerance.
  cfg.max_rounds = 3;
  auto drift = [](const MetricSet& ms) {
    const auto n = static_cast<std::int64_t>(ms.metrics.size());
    return eval_of(Fraction(n, 20), Fraction(1, 4));
  };
  res = optimize_loop(cfg, gen, drift);
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.stop_reason, "max-rounds");
  EXPECT_EQ(res.history.size(), 3u);
  EXPECT_EQ(res.metric_set.id, "r1");  // size 9, coverage 0.45

  auto none = [](std::size_t, NRange) { return std::vector<MetricSet>{}; };
  EXPECT_THROW(optimize_loop(cfg, none, flat), OptimizerError);
}

TEST(Optimize, RequiresAspectsAndHoldout) {
  auto gw = testing::live_gateway(clusterer({}));
  std::vector<Instance> train = {
      {testing::make_trajectory("t", 1), testing::make_feedback("t", "x"), {}}};
  EXPECT_THROW(optimize(*gw, train, {}), EmptyEvaluationError);
  EXPECT_THROW(evaluate_holdout(*gw, sized(2, "ms"), {}), EmptyEvaluationError);
}

}  // namespace
}  // namespace autolibra
