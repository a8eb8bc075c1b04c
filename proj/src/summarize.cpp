/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#include "qrsum/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_set>

namespace qrsum {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_indices(const SummaryProblem& problem,
                   const std::vector<int>& ordered) {
  std::unordered_set<int> seen;
  for (int idx : ordered) {
    require(idx >= 0 && idx < problem.size(), "frame index out of range");
    require(seen.insert(idx).second, "duplicate frame index");
  }
}

}  // namespace

MarginalGains::MarginalGains(const SummaryProblem& problem)
    : problem_(&problem),
      min_dist_(problem.size(), std::numeric_limits<double>::infinity()) {}

void MarginalGains::add(int candidate) {
  const int n = problem_->size();
  require(candidate >= 0 && candidate < n, "candidate index out of range");
  for (int v = 0; v < n; ++v) {
    min_dist_[v] = std::min(min_dist_[v], problem_->distance(v, candidate));
  }
  ++n_selected_;
}

double MarginalGains::gain(ObjectiveKind kind, int candidate) const {
  const SummaryProblem& p = *problem_;
  const int c = candidate;
  require(c >= 0 && c < p.size(), "candidate index out of range");
  const double k = static_cast<double>(p.budget());
  switch (kind) {
    case ObjectiveKind::QuerySimilarity:
      return (p.similarity(c) + 1.0) / (2.0 * k);
    case ObjectiveKind::Quality:
      return logistic(p.quality()[c]) / k;
    case ObjectiveKind::Diversity: {
      if (n_selected_ == 0) return 1.0;
      if (p.d_max() == 0.0) return 0.0;
      return min_dist_[c] / p.d_max();
    }
    case ObjectiveKind::Representativeness: {
      const double dmax2 = p.d_max() * p.d_max();
      // All-identical frames: by convention the first pick covers
      // everything (gain 1, the limit value); later picks add nothing.
      if (dmax2 == 0.0) return n_selected_ == 0 ? 1.0 : 0.0;
      const int n = p.size();
      const double denom = static_cast<double>(n) * dmax2;
      double total = 0.0;
      if (n_selected_ == 0) {
        // f_rep(empty) = 0, so the gain is f_rep({c}) itself.
        for (int v = 0; v < n; ++v) {
          const double d = p.distance(v, c);
          total += dmax2 - d * d;
        }
      } else {
        for (int v = 0; v < n; ++v) {
          const double cur = min_dist_[v];
          const double next = std::min(cur, p.distance(v, c));
          total += cur * cur - next * next;
        }
      }
      return total / denom;
    }
  }
  throw std::invalid_argument("unknown objective kind");
}

double MarginalGains::mixture_gain(const Mixture& mixture,
                                   int candidate) const {
  double total = 0.0;
  for (int i = 0; i < kNumObjectives; ++i) {
    total +=
        mixture.weights[i] * gain(static_cast<ObjectiveKind>(i), candidate);
  }
  return total;
}

void Mixture::validate() const {
  for (int i = 0; i < kNumObjectives; ++i) {
    require(std::isfinite(weights[i]) && weights[i] >= 0.0,
            "mixture weights must be finite and non-negative");
  }
}

SummaryProblem::SummaryProblem(Matrix frame_embeddings, Vector quality,
                               Matrix diversity_features,
                               Vector query_embedding, int k)
    : frame_embeddings_(std::move(frame_embeddings)),
      quality_(std::move(quality)),
      diversity_features_(std::move(diversity_features)),
      query_embedding_(std::move(query_embedding)),
      k_(k) {
  const int n = static_cast<int>(quality_.size());
  require(n >= 1, "problem must contain at least one frame");
  require(frame_embeddings_.rows() == n,
          "embedding row count must match frame count");
  require(diversity_features_.rows() == n,
          "diversity feature row count must match frame count");
  require(query_embedding_.size() == frame_embeddings_.cols(),
          "query embedding dimension must match frame embeddings");
  require(k_ >= 1 && k_ <= n, "budget k must satisfy 1 <= k <= n");
  require(all_finite(frame_embeddings_) && all_finite(quality_) &&
              all_finite(diversity_features_) && all_finite(query_embedding_),
          "problem inputs must be finite");

  pairwise_distance_ = Matrix::Zero(n, n);
  d_max_ = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d =
          (diversity_features_.row(i) - diversity_features_.row(j)).norm();
      pairwise_distance_(i, j) = d;
      pairwise_distance_(j, i) = d;
      d_max_ = std::max(d_max_, d);
    }
  }

  similarity_ = Vector::Zero(n);
  const double qn = query_embedding_.norm();
  for (int i = 0; i < n; ++i) {
    const double fn = frame_embeddings_.row(i).norm();
    if (qn == 0.0 || fn == 0.0) {
      // A degenerate (all-zero) embedding gets the neutral similarity 0
      // rather than poisoning the whole problem.
      similarity_[i] = 0.0;
    } else {
      const double s =
          frame_embeddings_.row(i).dot(query_embedding_) / (fn * qn);
      similarity_[i] = std::clamp(s, -1.0, 1.0);
    }
  }
}

double objective_gain(ObjectiveKind kind, const SummaryProblem& problem,
                      const std::vector<int>& selected, int candidate) {
  check_indices(problem, selected);
  require(candidate >= 0 && candidate < problem.size(),
          "candidate index out of range");
  require(std::find(selected.begin(), selected.end(), candidate) ==
              selected.end(),
          "candidate already selected");
  MarginalGains state(problem);
  for (int idx : selected) state.add(idx);
  return state.gain(kind, candidate);
}

Vector4 per_objective_values(const SummaryProblem& problem,
                             const std::vector<int>& ordered) {
  check_indices(problem, ordered);
  MarginalGains state(problem);
  Vector4 totals = Vector4::Zero();
  for (int idx : ordered) {
    for (int i = 0; i < kNumObjectives; ++i) {
      totals[i] += state.gain(static_cast<ObjectiveKind>(i), idx);
    }
    state.add(idx);
  }
  return totals;
}

double evaluate_mixture(const Mixture& mixture, const SummaryProblem& problem,
                        const std::vector<int>& ordered) {
  mixture.validate();
  check_indices(problem, ordered);
  MarginalGains state(problem);
  double total = 0.0;
  for (int idx : ordered) {
    total += state.mixture_gain(mixture, idx);
    state.add(idx);
  }
  return total;
}

Summary greedy_select(const Mixture& mixture, const SummaryProblem& problem) {
  mixture.validate();
  const int n = problem.size();
  const int k = problem.budget();
  MarginalGains state(problem);
  std::vector<bool> taken(n, false);
  std::vector<int> selected;
  selected.reserve(k);
  double total = 0.0;
  Vector4 per_objective = Vector4::Zero();

  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      if (taken[c]) continue;
      const double gain = state.mixture_gain(mixture, c);
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    taken[best] = true;
    selected.push_back(best);
    total += best_gain;
    for (int i = 0; i < kNumObjectives; ++i) {
      per_objective[i] += state.gain(static_cast<ObjectiveKind>(i), best);
    }
    state.add(best);
  }
  return Summary{std::move(selected), total, per_objective};
}

Summary lazy_greedy_select(const Mixture& mixture,
                           const SummaryProblem& problem, LazyStats* stats) {
  mixture.validate();
  const int n = problem.size();
  const int k = problem.budget();
  MarginalGains state(problem);
  LazyStats local;
  LazyStats& st = stats ? *stats : local;
  st = LazyStats{};

  // Gains of a purely modular mixture never change, so entries never
  // go stale and no re-evaluation is ever needed.
  const bool modular =
      mixture.weights[static_cast<int>(ObjectiveKind::Diversity)] == 0.0 &&
      mixture.weights[static_cast<int>(ObjectiveKind::Representativeness)] ==
          0.0;

  struct Entry {
    double gain;
    int index;
    int stamp;  // number of selected frames when the gain was computed
  };
  // Max-heap by gain, then by lowest index, matching naive tie-breaking.
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.index > b.index;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (int c = 0; c < n; ++c) {
    heap.push({state.mixture_gain(mixture, c), c, 0});
    ++st.evaluations;
  }

  std::vector<int> selected;
  selected.reserve(k);
  double total = 0.0;
  Vector4 per_objective = Vector4::Zero();

  while (static_cast<int>(selected.size()) < k) {
    Entry top = heap.top();
    heap.pop();
    ++st.pops;
    if (!modular && top.stamp != static_cast<int>(selected.size())) {
      // Stale upper bound: refresh against the current selection and
      // re-insert; diminishing returns keep every other key an upper bound.
      top.gain = state.mixture_gain(mixture, top.index);
      top.stamp = static_cast<int>(selected.size());
      heap.push(top);
      ++st.evaluations;
      ++st.re_evaluations;
      continue;
    }
    selected.push_back(top.index);
    total += top.gain;
    for (int i = 0; i < kNumObjectives; ++i) {
      per_objective[i] +=
          state.gain(static_cast<ObjectiveKind>(i), top.index);
    }
    state.add(top.index);
  }
  return Summary{std::move(selected), total, per_objective};
}

Summary mmr_select(const SummaryProblem& problem, double lambda_sim) {
  require(std::isfinite(lambda_sim) && lambda_sim >= 0.0 && lambda_sim <= 1.0,
          "mmr lambda must lie in [0, 1]");
  Mixture mixture;
  mixture.weights << lambda_sim, 0.0, 1.0 - lambda_sim, 0.0;
  return greedy_select(mixture, problem);
}

Summary hecate_select(const SummaryProblem& problem, int kmeans_iters,
                      std::uint64_t rng_seed) {
  require(kmeans_iters >= 1, "kmeans_iters must be positive");
  const int n = problem.size();
  const int k = problem.budget();
  const Matrix& points = problem.diversity_features();
  Rng rng(rng_seed);

  auto sq_dist_to = [&](int v, const Matrix& centers, int c) {
    return (points.row(v) - centers.row(c)).squaredNorm();
  };

  // k-means++ seeding.
  Matrix centers(k, points.cols());
  centers.row(0) = points.row(static_cast<int>(rng.uniform_int(n)));
  std::vector<double> best_sq(n, 0.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
      double best = sq_dist_to(v, centers, 0);
      for (int j = 1; j < c; ++j) best = std::min(best, sq_dist_to(v, centers, j));
      best_sq[v] = best;
      total += best;
    }
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.uniform_int(n));
    } else {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      pick = n - 1;
      for (int v = 0; v < n; ++v) {
        cum += best_sq[v];
        if (cum > target) {
          pick = v;
          break;
        }
      }
    }
    centers.row(c) = points.row(pick);
  }

  // Lloyd iterations with farthest-point reseeding of empty clusters.
  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < kmeans_iters; ++iter) {
    bool changed = false;
    for (int v = 0; v < n; ++v) {
      int best_c = 0;
      double best = sq_dist_to(v, centers, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist_to(v, centers, c);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (assign[v] != best_c) {
        assign[v] = best_c;
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<int> counts(k, 0);
    for (int v = 0; v < n; ++v) {
      sums.row(assign[v]) += points.row(v);
      ++counts[assign[v]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      } else {
        // Reseed to the point farthest from its own center.
        int far_v = 0;
        double far_d = -1.0;
        for (int v = 0; v < n; ++v) {
          const double d = sq_dist_to(v, centers, assign[v]);
          if (d > far_d) {
            far_d = d;
            far_v = v;
          }
        }
        centers.row(c) = points.row(far_v);
        assign[far_v] = c;
        ++counts[c];
        changed = true;
      }
    }
    if (!changed) break;
  }

  // Order clusters by size descending; ties by lower minimum member index.
  std::vector<int> counts(k, 0), min_member(k, n);
  for (int v = 0; v < n; ++v) {
    ++counts[assign[v]];
    min_member[assign[v]] = std::min(min_member[assign[v]], v);
  }
  std::vector<int> cluster_order;
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) cluster_order.push_back(c);
  }
  std::sort(cluster_order.begin(), cluster_order.end(), [&](int a, int b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return min_member[a] < min_member[b];
  });

  std::vector<int> selected;
  std::vector<bool> taken(n, false);
  for (int c : cluster_order) {
    if (static_cast<int>(selected.size()) == k) break;
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (assign[v] != c || taken[v]) continue;
      if (best < 0 || problem.quality()[v] > problem.quality()[best]) best = v;
    }
    if (best >= 0) {
      selected.push_back(best);
      taken[best] = true;
    }
  }
  // Shortfall (fewer non-empty clusters than k): take the globally best
  // remaining quality, lowest index first on ties.
  while (static_cast<int>(selected.size()) < k) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (taken[v]) continue;
      if (best < 0 || problem.quality()[v] > problem.quality()[best]) best = v;
    }
    selected.push_back(best);
    taken[best] = true;
  }

  Summary summary;
  summary.selected = std::move(selected);
  summary.per_objective = per_objective_values(problem, summary.selected);
  // Baselines have no mixture; report the unit-weight objective total.
  summary.objective_value = summary.per_objective.sum();
  return summary;
}

}  // namespace qrsum
