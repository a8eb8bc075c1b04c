/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#pragma once

#include <vector>

namespace qrsum {

enum class Label { VeryGood, Good, NotGood, Trash };

using RelevanceLabels = std::vector<Label>;

/// Per-frame cluster ids; non-negative integers, one cluster per frame.
using Clustering = std::vector<int>;

struct SplitHalfResult {
  double rho_mean = 0.0;
  int splits_used = 0;
  int splits_skipped = 0;  // splits with a constant group-mean vector
};

struct ClusteringConsistency {
  double mean_nmi = 0.0;    // mean pairwise NMI over unordered pairs
  int prototype_index = 0;  // argmax of mean NMI to the others; tie: lowest
};

/// 1 iff the label of the top-ranked frame is in `accept`.
int hit_at_1(const std::vector<int>& ranking, const RelevanceLabels& labels,
             const std::vector<Label>& accept);

/// AP with descending-score order; ties broken by ascending index.
double average_precision(const std::vector<double>& scores,
                         const std::vector<bool>& binary_labels);

/// Spearman rank correlation: Pearson correlation of average ranks
/// (ties receive the mean of their rank span). Errors on constant input.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

double summary_precision(const std::vector<int>& selected,
                         const std::vector<bool>& gt_binary);

/// Fraction of relevant clusters (clusters holding at least one positive
/// frame) covered by a selected positive frame.
double cluster_recall(const std::vector<int>& selected,
                      const std::vector<bool>& gt_binary,
                      const Clustering& gt_clustering);

/// Harmonic mean of precision and cluster recall; 0 when both are 0.
double f1(double precision, double cluster_recall);

/// Normalized mutual information 2I/(H + H') with natural-log entropies;
/// 1 when both clusterings are single-cluster.
double nmi(const Clustering& c1, const Clustering& c2);

/// Mean Spearman correlation of group-mean scores over all 10 two-vs-three
/// splits of exactly 5 annotations; degenerate splits are skipped.
SplitHalfResult split_half_consistency(
    const std::vector<std::vector<double>>& annotations);

ClusteringConsistency clustering_consistency(
    const std::vector<Clustering>& clusterings);

}  // namespace qrsum
