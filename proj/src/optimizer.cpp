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

#include "autolibra/optimizer.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

#include <spdlog/spdlog.h>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/util.hpp"

namespace autolibra {
namespace {

// a strictly preferred over b, both already inside the band.
bool preferred(const CandidateScore& a, const CandidateScore& b) {
  if (a.redundancy.has_value() != b.redundancy.has_value()) {
    return a.redundancy.has_value();
  }
  if (a.redundancy && *a.redundancy != *b.redundancy) {
    return *a.redundancy < *b.redundancy;
  }
  const auto& pa = a.metric_set;
  const auto& pb = b.metric_set;
  return std::make_tuple(pa.metrics.size(), pa.provenance.candidate_index,
                         std::cref(pa.id)) <
         std::make_tuple(pb.metrics.size(), pb.provenance.candidate_index,
                         std::cref(pb.id));
}

bool within_tolerance(const CandidateScore& a, const CandidateScore& b,
                      const Fraction& tol) {
  if (!(abs_diff(a.coverage, b.coverage) < tol)) return false;
  if (a.redundancy.has_value() != b.redundancy.has_value()) return false;
  return !a.redundancy || abs_diff(*a.redundancy, *b.redundancy) < tol;
}

}  // namespace

void validate_config(const OptimizerConfig& cfg) {
  if (cfg.n_min < 1) throw InvalidArgumentError("n_min must be >= 1");
  if (cfg.n_min > cfg.n_max) throw InvalidArgumentError("n_min > n_max");
  if (cfg.sets_per_n < 1) throw InvalidArgumentError("sets_per_n must be >= 1");
  if (cfg.coverage_band < 0) {
    throw InvalidArgumentError("coverage_band must be >= 0");
  }
  if (cfg.max_rounds < 1) throw InvalidArgumentError("max_rounds must be >= 1");
}

std::size_t select_best_index(const std::vector<CandidateScore>& scored,
                              double band) {
  if (scored.empty()) throw InvalidArgumentError("no candidates to select from");
  Fraction cmax = scored[0].coverage;
  for (const auto& c : scored) cmax = std::max(cmax, c.coverage);
  const Fraction floor = cmax - Fraction::from_double(band);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].coverage < floor) continue;
    if (!best || preferred(scored[i], scored[*best])) best = i;
  }
  return *best;
}

const CandidateScore& select_best(const std::vector<CandidateScore>& scored,
                                  double band) {
  return scored[select_best_index(scored, band)];
}

NRange initial_range(const OptimizerConfig& cfg) {
  return {cfg.n_min, cfg.n_max};
}

NRange refined_range(const OptimizerConfig& cfg, std::size_t selected_n) {
  NRange r;
  r.lo = selected_n > cfg.refine_radius ? selected_n - cfg.refine_radius : 1;
  r.lo = std::max<std::size_t>(r.lo, 1);
  r.hi = std::min(selected_n + cfg.refine_radius, cfg.n_max);
  r.lo = std::min(r.lo, r.hi);
  return r;
}

std::int64_t candidate_seed(const OptimizerConfig& cfg, std::size_t round,
                            std::size_t n, std::size_t k) {
  // Kept within int64 so it survives a JSON round trip unchanged.
  return static_cast<std::int64_t>(
      derive_seed(static_cast<std::uint64_t>(cfg.seed), {round, n, k}) >> 1);
}

std::vector<MetricSet> generate_candidates(
    const Gateway& gateway, const std::vector<Aspect>& aspects,
    const OptimizerConfig& cfg, NRange range, std::size_t round,
    const ClusteringOptions& clustering, std::size_t max_parallel) {
  if (aspects.empty()) throw InvalidArgumentError("no aspects to cluster");
  struct Job {
    std::size_t n, k;
  };
  std::vector<Job> jobs;
  for (std::size_t n = range.lo; n <= range.hi; ++n) {
    for (std::size_t k = 0; k < cfg.sets_per_n; ++k) jobs.push_back({n, k});
  }
  auto produced = parallel_map<std::optional<MetricSet>>(
      jobs.size(), max_parallel, [&](std::size_t i) -> std::optional<MetricSet> {
        const Job& j = jobs[i];
        try {
          return cluster_aspects(gateway, aspects, j.n,
                                 candidate_seed(cfg, round, j.n, j.k),
                                 clustering, static_cast<std::int64_t>(i));
        } catch (const CardinalityError& e) {
          spdlog::warn("candidate n={} k={} dropped: {}", j.n, j.k, e.what());
        } catch (const SchemaError& e) {
          spdlog::warn("candidate n={} k={} dropped: {}", j.n, j.k, e.what());
        } catch (const StructuredOutputError& e) {
          spdlog::warn("candidate n={} k={} dropped: {}", j.n, j.k, e.what());
        }
        return std::nullopt;
      });
  std::vector<MetricSet> out;
  for (auto& p : produced) {
    if (p) out.push_back(std::move(*p));
  }
  if (out.size() * 2 < jobs.size()) {
    throw OptimizerError("only " + std::to_string(out.size()) + " of " +
                         std::to_string(jobs.size()) +
                         " candidate metric sets survived clustering");
  }
  return out;
}

OptimizeResult optimize_loop(const OptimizerConfig& cfg,
                             const CandidateGenerator& generate,
                             const CandidateScorer& score) {
  validate_config(cfg);
  const Fraction tol = Fraction::from_double(cfg.convergence_tolerance);
  OptimizeResult result;
  NRange range = initial_range(cfg);
  for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
    OptimizerRound r;
    r.round = round;
    r.range = range;
    for (auto& ms : generate(round, range)) {
      CandidateScore c;
      Evaluation ev = score(ms);
      c.report = std::move(ev.report);
      c.ratings = std::move(ev.ratings);
      c.coverage = c.report.coverage;
      c.redundancy = c.report.redundancy;
      c.metric_set = std::move(ms);
      r.candidates.push_back(std::move(c));
    }
    if (r.candidates.empty()) {
      throw OptimizerError("round " + std::to_string(round) +
                           " produced no candidates");
    }
    r.selected = select_best_index(r.candidates, cfg.coverage_band);
    const CandidateScore& sel = r.candidates[r.selected];
    spdlog::info("round {}: N in [{}, {}], selected {} (N={}, coverage {})",
                 round, range.lo, range.hi, sel.metric_set.id,
                 sel.metric_set.metrics.size(), sel.coverage.to_decimal());
    result.history.push_back(std::move(r));

    if (result.history.size() >= 2) {
      const auto& prev = result.history[result.history.size() - 2];
      const auto& a = prev.candidates[prev.selected];
      const auto& b = result.history.back().candidates[result.history.back().selected];
      if (a.metric_set.metrics.size() == b.metric_set.metrics.size()) {
        result.stop_reason = "repeat-n";
      } else if (within_tolerance(a, b, tol)) {
        result.stop_reason = "tolerance";
      }
      if (!result.stop_reason.empty()) {
        result.converged = true;
        result.metric_set = b.metric_set;
        result.report = b.report;
        result.ratings = b.ratings;
        return result;
      }
    }
    const auto& last = result.history.back();
    range = refined_range(cfg, last.candidates[last.selected].metric_set.metrics.size());
  }

  // No convergence: best of the per-round selections.
  std::vector<CandidateScore> finalists;
  for (const auto& r : result.history) finalists.push_back(r.candidates[r.selected]);
  const CandidateScore& best = select_best(finalists, cfg.coverage_band);
  result.converged = false;
  result.stop_reason = "max-rounds";
  result.metric_set = best.metric_set;
  result.report = best.report;
  result.ratings = best.ratings;
  return result;
}

OptimizeResult optimize(const Gateway& gateway,
                        const std::vector<Instance>& train,
                        const OptimizerConfig& cfg,
                        const OptimizeOptions& options) {
  std::vector<Aspect> aspects;
  for (const auto& inst : train) {
    aspects.insert(aspects.end(), inst.aspects.begin(), inst.aspects.end());
  }
  if (aspects.empty()) throw EmptyEvaluationError("no aspects in the train split");
  const std::size_t par = options.evaluation.max_parallel;
  return optimize_loop(
      cfg,
      [&](std::size_t round, NRange range) {
        return generate_candidates(gateway, aspects, cfg, range, round,
                                   options.clustering, par);
      },
      [&](const MetricSet& ms) {
        return evaluate_metric_set(gateway, train, ms, Split::kTrain,
                                   options.evaluation);
      });
}

Json optimize_history_json(const OptimizeResult& result) {
  auto frac = [](const OptFraction& f) {
    return f ? Json(f->rounded(4)) : Json(nullptr);
  };
  Json rounds = Json::array();
  for (const auto& r : result.history) {
    Json cands = Json::array();
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      const auto& c = r.candidates[i];
      cands.push_back({{"metric_set_id", c.metric_set.id},
                       {"n", c.metric_set.metrics.size()},
                       {"coverage", c.coverage.rounded(4)},
                       {"redundancy", frac(c.redundancy)},
                       {"selected", i == r.selected}});
    }
    rounds.push_back({{"round", r.round},
                      {"range", {r.range.lo, r.range.hi}},
                      {"candidates", std::move(cands)}});
  }
  return {{"rounds", std::move(rounds)},
          {"selected_metric_set_id", result.metric_set.id},
          {"converged", result.converged},
          {"stop_reason", result.stop_reason}};
}

QualityReport evaluate_holdout(const Gateway& gateway, const MetricSet& ms,
                               const std::vector<Instance>& holdout,
                               const EvaluationOptions& options) {
  if (holdout.empty()) throw EmptyEvaluationError("holdout split is empty");
  return evaluate_metric_set(gateway, holdout, ms, Split::kHoldout, options)
      .report;
}

}  // namespace autolibra
