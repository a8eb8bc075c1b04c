/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#include "qrsum/metrics.hpp"

#include "qrsum/common.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

namespace qrsum {

namespace {

bool is_constant(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(),
                     [&](double v) { return v == values.front(); });
}

/// Average ranks (1-based); ties share the mean rank of their span.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  std::vector<double> ranks(n, 0.0);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (int t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const int n = static_cast<int>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (int i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

double entropy_ratio_term(double count, double n) {
  // p * ln(n / count) is the -p*ln(p) entropy term written so that the
  // identical-clustering mutual-information terms match it bit for bit.
  return (count / n) * std::log(n / count);
}

}  // namespace

int hit_at_1(const std::vector<int>& ranking, const RelevanceLabels& labels,
             const std::vector<Label>& accept) {
  require(!ranking.empty(), "hit_at_1: empty ranking");
  const int top = ranking.front();
  require(top >= 0 && top < static_cast<int>(labels.size()),
          "hit_at_1: ranked index out of range");
  return std::find(accept.begin(), accept.end(), labels[top]) != accept.end()
             ? 1
             : 0;
}

double average_precision(const std::vector<double>& scores,
                         const std::vector<bool>& binary_labels) {
  require(scores.size() == binary_labels.size(),
          "average_precision: length mismatch");
  const int n = static_cast<int>(scores.size());
  require(n >= 1, "average_precision: empty input");
  for (double s : scores) {
    require(std::isfinite(s), "average_precision: scores must be finite");
  }
  const int positives =
      static_cast<int>(std::count(binary_labels.begin(), binary_labels.end(),
                                  true));
  require(positives >= 1, "average_precision: no positive labels");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  double sum = 0.0;
  int hits = 0;
  for (int rank = 1; rank <= n; ++rank) {
    if (binary_labels[order[rank - 1]]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(positives);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), "spearman: length mismatch");
  require(a.size() >= 2, "spearman: need at least two observations");
  require(!is_constant(a) && !is_constant(b),
          "spearman: undefined for constant input");
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  if (ra == rb) return 1.0;  // identical orderings correlate exactly
  return pearson(ra, rb);
}

double summary_precision(const std::vector<int>& selected,
                         const std::vector<bool>& gt_binary) {
  require(!selected.empty(), "summary_precision: empty selection");
  std::set<int> seen;
  int positive = 0;
  for (int idx : selected) {
    require(idx >= 0 && idx < static_cast<int>(gt_binary.size()),
            "summary_precision: index out of range");
    require(seen.insert(idx).second, "summary_precision: duplicate index");
    if (gt_binary[idx]) ++positive;
  }
  return static_cast<double>(positive) / static_cast<double>(selected.size());
}

double cluster_recall(const std::vector<int>& selected,
                      const std::vector<bool>& gt_binary,
                      const Clustering& gt_clustering) {
  require(gt_binary.size() == gt_clustering.size(),
          "cluster_recall: clustering length mismatch");
  std::set<int> relevant;
  for (int i = 0; i < static_cast<int>(gt_binary.size()); ++i) {
    if (gt_binary[i]) relevant.insert(gt_clustering[i]);
  }
  require(!relevant.empty(), "cluster_recall: no relevant clusters");
  std::set<int> covered;
  for (int idx : selected) {
    require(idx >= 0 && idx < static_cast<int>(gt_binary.size()),
            "cluster_recall: index out of range");
    if (gt_binary[idx]) covered.insert(gt_clustering[idx]);
  }
  return static_cast<double>(covered.size()) /
         static_cast<double>(relevant.size());
}

double f1(double precision, double cluster_recall) {
  require(precision >= 0.0 && precision <= 1.0 && cluster_recall >= 0.0 &&
              cluster_recall <= 1.0,
          "f1: inputs must lie in [0, 1]");
  const double denom = precision + cluster_recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * precision * cluster_recall / denom;
}

namespace {

// Relabel cluster ids as 0, 1, 2, ... in order of first occurrence. NMI is
// mathematically invariant to relabeling; canonicalizing makes it bitwise
// invariant too (the accumulation order no longer depends on the label
// values), so relabeled-but-identical partitions compare as exact ties.
Clustering canonical_labels(const Clustering& c) {
  Clustering out(c.size());
  std::map<int, int> remap;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto [it, inserted] =
        remap.emplace(c[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

}  // namespace

double nmi(const Clustering& raw1, const Clustering& raw2) {
  require(raw1.size() == raw2.size(), "nmi: length mismatch");
  const int n = static_cast<int>(raw1.size());
  require(n >= 1, "nmi: empty clusterings");
  for (int i = 0; i < n; ++i) {
    require(raw1[i] >= 0 && raw2[i] >= 0,
            "nmi: cluster ids must be non-negative");
  }
  const Clustering c1 = canonical_labels(raw1);
  const Clustering c2 = canonical_labels(raw2);
  std::map<int, int> count1, count2;
  std::map<std::pair<int, int>, int> joint;
  for (int i = 0; i < n; ++i) {
    ++count1[c1[i]];
    ++count2[c2[i]];
    ++joint[{c1[i], c2[i]}];
  }
  const double dn = static_cast<double>(n);
  double h1 = 0.0, h2 = 0.0, mi = 0.0;
  for (const auto& [id, count] : count1) {
    h1 += entropy_ratio_term(static_cast<double>(count), dn);
  }
  for (const auto& [id, count] : count2) {
    h2 += entropy_ratio_term(static_cast<double>(count), dn);
  }
  for (const auto& [cell, count] : joint) {
    const double nij = static_cast<double>(count);
    const double ai = static_cast<double>(count1[cell.first]);
    const double bj = static_cast<double>(count2[cell.second]);
    mi += (nij / dn) * std::log((nij * dn) / (ai * bj));
  }
  if (h1 + h2 == 0.0) return 1.0;  // both single-cluster
  if (mi < 0.0) mi = 0.0;          // guard rounding below the I >= 0 bound
  return 2.0 * mi / (h1 + h2);
}

SplitHalfResult split_half_consistency(
    const std::vector<std::vector<double>>& annotations) {
  require(annotations.size() == 5,
          "split_half_consistency: exactly 5 annotations required");
  const std::size_t n = annotations.front().size();
  require(n >= 2, "split_half_consistency: need at least two frames");
  for (const auto& scores : annotations) {
    require(scores.size() == n,
            "split_half_consistency: annotation length mismatch");
  }

  SplitHalfResult result;
  double total = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      std::vector<double> group_a(n, 0.0), group_b(n, 0.0);
      for (std::size_t f = 0; f < n; ++f) {
        group_a[f] = 0.5 * (annotations[i][f] + annotations[j][f]);
        double rest = 0.0;
        for (int r = 0; r < 5; ++r) {
          if (r != i && r != j) rest += annotations[r][f];
        }
        group_b[f] = rest / 3.0;
      }
      if (is_constant(group_a) || is_constant(group_b)) {
        ++result.splits_skipped;
        continue;
      }
      total += spearman(group_a, group_b);
      ++result.splits_used;
    }
  }
  require(result.splits_used > 0,
          "split_half_consistency: all splits degenerate");
  result.rho_mean = total / static_cast<double>(result.splits_used);
  return result;
}

ClusteringConsistency clustering_consistency(
    const std::vector<Clustering>& clusterings) {
  const int m = static_cast<int>(clusterings.size());
  require(m >= 2, "clustering_consistency: need at least two clusterings");

  Matrix pairwise = Matrix::Zero(m, m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double value = nmi(clusterings[i], clusterings[j]);
      pairwise(i, j) = value;
      pairwise(j, i) = value;
      total += value;
    }
  }
  ClusteringConsistency result;
  result.mean_nmi = total / (0.5 * m * (m - 1));
  double best_mean = -1.0;
  std::vector<double> row(m - 1);
  for (int i = 0; i < m; ++i) {
    int count = 0;
    for (int j = 0; j < m; ++j) {
      if (j != i) row[count++] = pairwise(i, j);
    }
    // Summing in sorted order makes rows with the same value multiset
    // bitwise equal, so the lowest-index tie-break fires on true ties
    // instead of last-ulp accumulation noise.
    std::sort(row.begin(), row.end());
    double sum_i = 0.0;
    for (double value : row) sum_i += value;
    const double mean_i = sum_i / static_cast<double>(m - 1);
    if (mean_i > best_mean) {
      best_mean = mean_i;
      result.prototype_index = i;
    }
  }
  return result;
}

}  // namespace qrsum
