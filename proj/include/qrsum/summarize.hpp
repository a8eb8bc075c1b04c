/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#pragma once

#include "qrsum/common.hpp"

#include <cstdint>
#include <vector>

namespace qrsum {

enum class ObjectiveKind : int {
  QuerySimilarity = 0,
  Quality = 1,
  Diversity = 2,
  Representativeness = 3,
};

constexpr int kNumObjectives = 4;

/// Non-negative weights over the four objectives, in ObjectiveKind order.
struct Mixture {
  Vector4 weights = Vector4::Constant(0.25);

  void validate() const;
};

/// One video's summarization instance. Pairwise Euclidean distances over
/// the diversity features and per-frame query similarities are precomputed
/// on construction; the object is immutable afterwards.
class SummaryProblem {
 public:
  SummaryProblem(Matrix frame_embeddings, Vector quality,
                 Matrix diversity_features, Vector query_embedding, int k);

  int size() const { return static_cast<int>(quality_.size()); }
  int budget() const { return k_; }
  const Matrix& frame_embeddings() const { return frame_embeddings_; }
  const Vector& quality() const { return quality_; }
  const Matrix& diversity_features() const { return diversity_features_; }
  const Vector& query_embedding() const { return query_embedding_; }
  const Matrix& pairwise_distance() const { return pairwise_distance_; }
  double distance(int i, int j) const { return pairwise_distance_(i, j); }
  double d_max() const { return d_max_; }
  /// Query-frame cosine similarity, clamped to [-1, 1]; frames (or a
  /// query) with zero-norm embeddings score a neutral 0.
  double similarity(int i) const { return similarity_[i]; }

 private:
  Matrix frame_embeddings_;
  Vector quality_;
  Matrix diversity_features_;
  Vector query_embedding_;
  Matrix pairwise_distance_;
  Vector similarity_;
  double d_max_ = 0.0;
  int k_ = 0;
};

struct Summary {
  std::vector<int> selected;  // greedy insertion order
  double objective_value = 0.0;
  Vector4 per_objective = Vector4::Zero();
};

struct LazyStats {
  std::int64_t evaluations = 0;     // gain computations, incl. initial pass
  std::int64_t pops = 0;            // heap pops
  std::int64_t re_evaluations = 0;  // stale entries refreshed
};

/// Incremental marginal-gain evaluator over a growing selected set. Every
/// selector uses this one implementation, so identical selected prefixes
/// produce bit-identical gains everywhere.
class MarginalGains {
 public:
  explicit MarginalGains(const SummaryProblem& problem);

  void add(int candidate);
  int selected_count() const { return n_selected_; }
  double gain(ObjectiveKind kind, int candidate) const;
  double mixture_gain(const Mixture& mixture, int candidate) const;

 private:
  const SummaryProblem* problem_;
  std::vector<double> min_dist_;  // +inf while nothing is selected
  int n_selected_ = 0;
};

/// Marginal gain of adding `candidate` to the ordered set `selected`.
/// All four objectives are normalized so every gain lies in [0, 1].
double objective_gain(ObjectiveKind kind, const SummaryProblem& problem,
                      const std::vector<int>& selected, int candidate);

/// Weighted total gain accumulated over the insertion order of `ordered`.
double evaluate_mixture(const Mixture& mixture, const SummaryProblem& problem,
                        const std::vector<int>& ordered);

/// Per-objective accumulated gains over the insertion order of `ordered`.
Vector4 per_objective_values(const SummaryProblem& problem,
                             const std::vector<int>& ordered);

/// Naive greedy: k steps, each picking the candidate with the largest
/// weighted marginal gain; ties go to the lowest frame index.
Summary greedy_select(const Mixture& mixture, const SummaryProblem& problem);

/// Lazy greedy; identical output to greedy_select on every input.
Summary lazy_greedy_select(const Mixture& mixture,
                           const SummaryProblem& problem,
                           LazyStats* stats = nullptr);

/// Maximal marginal relevance: the two-objective mixture
/// (lambda_sim, 0, 1 - lambda_sim, 0).
Summary mmr_select(const SummaryProblem& problem, double lambda_sim);

/// Cluster the diversity features with seeded k-means (k-means++ init),
/// order clusters by size descending (ties: lower minimum member index),
/// and take the highest-quality frame of each of the k largest clusters.
Summary hecate_select(const SummaryProblem& problem, int kmeans_iters,
                      std::uint64_t rng_seed);

}  // namespace qrsum
