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

// Band-and-refine search over candidate metric sets.
//
// Each round clusters `sets_per_n` candidates for every N in the current
// range, scores them on the train split, and keeps the lowest-redundancy
// candidate among those within `coverage_band` of the best coverage. The
// next round searches selected_N +/- refine_radius.

#ifndef AUTOLIBRA_OPTIMIZER_HPP_
#define AUTOLIBRA_OPTIMIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "autolibra/clustering.hpp"
#include "autolibra/core/fraction.hpp"
#include "autolibra/core/model.hpp"
#include "autolibra/llm/gateway.hpp"
#include "autolibra/meta_eval.hpp"

namespace autolibra {

struct OptimizerConfig {
  std::size_t n_min = 4;
  std::size_t n_max = 13;
  std::size_t sets_per_n = 2;
  double coverage_band = 0.01;
  std::size_t refine_radius = 2;
  std::size_t max_rounds = 5;
  std::int64_t seed = 0;
  // Absolute change in both coverage and redundancy below which two
  // consecutive selections count as converged.
  double convergence_tolerance = 0.005;
};

// Throws InvalidArgumentError on a bad config.
void validate_config(const OptimizerConfig& cfg);

struct CandidateScore {
  MetricSet metric_set;
  Fraction coverage;
  OptFraction redundancy;  // nullopt: no traits at all
  QualityReport report;
  std::vector<Rating> ratings;
};

// Index of the selected candidate. Among candidates with
// coverage >= max_coverage - band: lowest redundancy (undefined last), then
// fewer metrics, then lower candidate index, then metric set id. The
// comparison is exact, so the result does not depend on input order.
std::size_t select_best_index(const std::vector<CandidateScore>& scored,
                              double band);
const CandidateScore& select_best(const std::vector<CandidateScore>& scored,
                                  double band);

// Inclusive N range searched in a round (1-based).
struct NRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool operator==(const NRange&) const = default;
};

NRange initial_range(const OptimizerConfig& cfg);
// selected_n +/- refine_radius, clamped to [1, n_max].
NRange refined_range(const OptimizerConfig& cfg, std::size_t selected_n);

// Seed of the k-th candidate with n metrics in a round.
std::int64_t candidate_seed(const OptimizerConfig& cfg, std::size_t round,
                            std::size_t n, std::size_t k);

// sets_per_n candidates for every n in `range`. A candidate whose clustering
// fails with a cardinality, schema or structured-output error is dropped;
// fewer than half surviving throws OptimizerError.
std::vector<MetricSet> generate_candidates(
    const Gateway& gateway, const std::vector<Aspect>& aspects,
    const OptimizerConfig& cfg, NRange range, std::size_t round,
    const ClusteringOptions& clustering, std::size_t max_parallel);

struct OptimizerRound {
  std::size_t round = 0;  // 1-based
  NRange range;
  std::vector<CandidateScore> candidates;
  std::size_t selected = 0;  // index into candidates
};

struct OptimizeResult {
  MetricSet metric_set;
  QualityReport report;
  std::vector<Rating> ratings;
  std::vector<OptimizerRound> history;
  bool converged = false;
  // "tolerance", "repeat-n" or "max-rounds".
  std::string stop_reason;
};

using CandidateGenerator = std::function<std::vector<MetricSet>(
    std::size_t round, NRange range)>;
using CandidateScorer = std::function<Evaluation(const MetricSet&)>;

// The round loop with generation and scoring supplied by the caller.
OptimizeResult optimize_loop(const OptimizerConfig& cfg,
                             const CandidateGenerator& generate,
                             const CandidateScorer& score);

struct OptimizeOptions {
  ClusteringOptions clustering;
  EvaluationOptions evaluation;
};

// Clusters the aspects of `train`, scores every candidate on `train`.
OptimizeResult optimize(const Gateway& gateway,
                        const std::vector<Instance>& train,
                        const OptimizerConfig& cfg,
                        const OptimizeOptions& options = {});

// optimize_history.json: {"rounds": [{"round", "range", "candidates":
// [{metric_set_id, n, coverage, redundancy, selected}]}], ...}.
Json optimize_history_json(const OptimizeResult& result);

// Standard report on the holdout split. Empty holdout throws
// EmptyEvaluationError.
QualityReport evaluate_holdout(const Gateway& gateway, const MetricSet& ms,
                               const std::vector<Instance>& holdout,
                               const EvaluationOptions& options = {});

}  // namespace autolibra

#endif  // AUTOLIBRA_OPTIMIZER_HPP_
