/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#pragma once

#include "qrsum/common.hpp"
#include "qrsum/data.hpp"
#include "qrsum/summarize.hpp"

#include <vector>

namespace qrsum {

struct TrainingPair {
  SummaryProblem problem;
  GroundTruth ground_truth;
};

struct WeightLearnConfig {
  int epochs = 15;
  double adagrad_base_rate = 0.1;
  double adagrad_epsilon = 1e-8;
  Vector4 init_weights = Vector4::Constant(0.25);
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct WeightLearnResult {
  Mixture mixture;
  std::vector<double> f1_history;  // mean training F1 per epoch
  int skipped_pairs = 0;           // pairs with no relevant frame
};

/// F1 of a summary against merged ground truth; empty selections score 0,
/// as do videos without a relevant cluster.
double summary_f1(const std::vector<int>& selected, const GroundTruth& gt);

/// Greedy F1-maximizing set of length k (ties: lowest index). Also the
/// construction behind the upper-bound evaluation row.
std::vector<int> target_summary(const SummaryProblem& problem,
                                const GroundTruth& gt);

/// Greedy maximization of weighted gain + loss delta, with
/// loss(S) = 1 - F1(S, gt) evaluated exactly on the current prefix.
std::vector<int> loss_augmented_select(const Mixture& mixture,
                                       const SummaryProblem& problem,
                                       const GroundTruth& gt);

/// g = f(loss-augmented selection) - f(target selection), where f is the
/// per-objective normalized value vector.
Vector4 subgradient(const Mixture& mixture, const TrainingPair& pair);

/// Per-pair projected AdaGrad subgradient descent; weights stay >= 0.
WeightLearnResult learn_weights(const std::vector<TrainingPair>& pairs,
                                const WeightLearnConfig& config);

}  // namespace qrsum
