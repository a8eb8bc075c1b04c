/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#include "qrsum/weightlearn.hpp"

#include "qrsum/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace qrsum {

namespace {

bool has_positive(const GroundTruth& gt) {
  return std::find(gt.binary_relevance.begin(), gt.binary_relevance.end(),
                   true) != gt.binary_relevance.end();
}

/// Greedy selection maximizing step_score(selected, candidate) for k steps,
/// ties broken by the lowest frame index.
template <class StepScore>
std::vector<int> greedy_by(const SummaryProblem& problem, StepScore&& score) {
  const int n = problem.size();
  const int k = problem.budget();
  std::vector<bool> taken(n, false);
  std::vector<int> selected;
  selected.reserve(k);
  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      if (taken[c]) continue;
      const double s = score(selected, c);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    taken[best] = true;
    selected.push_back(best);
  }
  return selected;
}

}  // namespace

void WeightLearnConfig::validate() const {
  require(epochs >= 0, "epochs must be non-negative");
  // Zero is allowed so a no-op rate provably returns init_weights unchanged.
  require(adagrad_base_rate >= 0.0, "adagrad_base_rate must be non-negative");
  require(adagrad_epsilon > 0.0, "adagrad_epsilon must be positive");
  for (int i = 0; i < kNumObjectives; ++i) {
    require(std::isfinite(init_weights[i]) && init_weights[i] >= 0.0,
            "init_weights must be finite and non-negative");
  }
}

double summary_f1(const std::vector<int>& selected, const GroundTruth& gt) {
  if (selected.empty()) return 0.0;
  bool any_positive = false;
  for (bool b : gt.binary_relevance) any_positive |= b;
  if (!any_positive) return 0.0;
  const double p = summary_precision(selected, gt.binary_relevance);
  const double cr =
      cluster_recall(selected, gt.binary_relevance, gt.prototype_clustering);
  return f1(p, cr);
}

std::vector<int> target_summary(const SummaryProblem& problem,
                                const GroundTruth& gt) {
  require(static_cast<int>(gt.binary_relevance.size()) == problem.size(),
          "target_summary: ground truth length mismatch");
  require(has_positive(gt), "target_summary: no relevant frames");
  return greedy_by(problem, [&](const std::vector<int>& selected, int c) {
    std::vector<int> next = selected;
    next.push_back(c);
    return summary_f1(next, gt);
  });
}

std::vector<int> loss_augmented_select(const Mixture& mixture,
                                       const SummaryProblem& problem,
                                       const GroundTruth& gt) {
  mixture.validate();
  require(static_cast<int>(gt.binary_relevance.size()) == problem.size(),
          "loss_augmented_select: ground truth length mismatch");
  const int n = problem.size();
  const int k = problem.budget();
  MarginalGains gains(problem);
  std::vector<int> result;
  result.reserve(k);
  std::vector<bool> taken(n, false);
  for (int step = 0; step < k; ++step) {
    const double f1_cur = summary_f1(result, gt);
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      if (taken[c]) continue;
      result.push_back(c);
      const double f1_next = summary_f1(result, gt);
      result.pop_back();
      // The F1 loss delta, loss(S u {c}) - loss(S) with loss = 1 - F1, is
      // evaluated exactly on the current prefix (locally modular surrogate).
      const double score = gains.mixture_gain(mixture, c) + (f1_cur - f1_next);
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    taken[best] = true;
    result.push_back(best);
    gains.add(best);
  }
  return result;
}

Vector4 subgradient(const Mixture& mixture, const TrainingPair& pair) {
  const std::vector<int> augmented =
      loss_augmented_select(mixture, pair.problem, pair.ground_truth);
  const std::vector<int> target =
      target_summary(pair.problem, pair.ground_truth);
  return per_objective_values(pair.problem, augmented) -
         per_objective_values(pair.problem, target);
}

WeightLearnResult learn_weights(const std::vector<TrainingPair>& pairs,
                                const WeightLearnConfig& config) {
  config.validate();
  std::vector<int> usable;
  int skipped = 0;
  for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
    require(static_cast<int>(pairs[i].ground_truth.binary_relevance.size()) ==
                pairs[i].problem.size(),
            "learn_weights: ground truth length mismatch");
    if (has_positive(pairs[i].ground_truth)) {
      usable.push_back(i);
    } else {
      std::cerr << "qrsum: warning: skipping training pair " << i
                << " (no relevant frames)\n";
      ++skipped;
    }
  }
  require(!usable.empty(), "learn_weights: no usable training pairs");

  WeightLearnResult result;
  result.skipped_pairs = skipped;
  Vector4& w = result.mixture.weights;
  w = config.init_weights;
  Vector4 accum = Vector4::Zero();
  Rng rng(config.rng_seed);

  std::vector<int> order = usable;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (int idx : order) {
      const Vector4 g = subgradient(result.mixture, pairs[idx]);
      for (int i = 0; i < kNumObjectives; ++i) {
        accum[i] += g[i] * g[i];
        w[i] -= config.adagrad_base_rate * g[i] /
                (std::sqrt(accum[i]) + config.adagrad_epsilon);
        if (w[i] < 0.0) w[i] = 0.0;  // projection onto the feasible orthant
      }
    }
    double f1_sum = 0.0;
    for (int idx : usable) {
      const Summary summary = greedy_select(result.mixture, pairs[idx].problem);
      f1_sum += summary_f1(summary.selected, pairs[idx].ground_truth);
    }
    result.f1_history.push_back(f1_sum / static_cast<double>(usable.size()));
  }
  return result;
}

}  // namespace qrsum
