/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#include "qrsum/metrics.hpp"

#include "qrsum/common.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace qrsum;

namespace {

std::vector<double> random_scores(Rng& rng, int n, bool with_ties) {
  std::vector<double> scores(n);
  for (int i = 0; i < n; ++i) {
    scores[i] = with_ties ? static_cast<double>(rng.uniform_int(4))
                          : rng.normal();
  }
  return scores;
}

std::vector<int> random_clustering(Rng& rng, int n, int n_clusters) {
  std::vector<int> assignment(n);
  for (int i = 0; i < n; ++i) assignment[i] = rng.uniform_int(n_clusters);
  return assignment;
}

}  // namespace

TEST_CASE("hit at 1 column semantics") {
  const RelevanceLabels labels = {Label::Good, Label::VeryGood, Label::Trash};
  CHECK(hit_at_1({1, 0, 2}, labels, {Label::VeryGood}) == 1);
  CHECK(hit_at_1({0, 1, 2}, labels, {Label::VeryGood}) == 0);
  CHECK(hit_at_1({0, 1, 2}, labels, {Label::VeryGood, Label::Good}) == 1);
  CHECK(hit_at_1({2, 1, 0}, labels, {Label::VeryGood, Label::Good}) == 0);
  // Corpus HIT@1 is a plain mean over videos.
  const double corpus = (1 + 0 + 1) / 3.0;
  CHECK(corpus == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS((void)hit_at_1({}, labels, {Label::VeryGood}),
                  std::invalid_argument);
}

TEST_CASE("average precision closed forms") {
  CHECK(average_precision({0.9, 0.8, 0.2, 0.1}, {true, true, false, false}) ==
        doctest::Approx(1.0));
  // Single positive at rank 3 of 5.
  CHECK(average_precision({0.9, 0.8, 0.7, 0.6, 0.5},
                          {false, false, true, false, false}) ==
        doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(
      (void)average_precision({0.5, 0.4}, {false, false}),
      std::invalid_argument);
}

TEST_CASE("average precision matches the brute-force oracle") {
  Rng rng(808);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + rng.uniform_int(12);
    const std::vector<double> scores = random_scores(rng, n, trial % 2 == 0);
    std::vector<bool> relevant(n);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      relevant[i] = rng.uniform() < 0.4;
      any = any || relevant[i];
    }
    if (!any) relevant[rng.uniform_int(n)] = true;
    CHECK(average_precision(scores, relevant) ==
          doctest::Approx(oracle::average_precision(scores, relevant))
              .epsilon(1e-9));
  }
}

TEST_CASE("average precision is invariant under monotone transforms") {
  Rng rng(809);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + rng.uniform_int(10);
    const std::vector<double> scores = random_scores(rng, n, true);
    std::vector<bool> relevant(n);
    for (int i = 0; i < n; ++i) relevant[i] = rng.uniform() < 0.5;
    relevant[0] = true;
    std::vector<double> warped(n);
    for (int i = 0; i < n; ++i) warped[i] = std::exp(scores[i]);
    CHECK(average_precision(scores, relevant) ==
          average_precision(warped, relevant));
  }
}

TEST_CASE("spearman endpoints and hand-ranked example") {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  std::vector<double> b = a;
  CHECK(spearman(a, b) == 1.0);
  for (double& x : b) x = -x;
  CHECK(spearman(a, b) == doctest::Approx(-1.0));

  const std::vector<double> t1 = {1, 2, 2, 4};
  const std::vector<double> t2 = {1, 3, 2, 4};
  CHECK(spearman(t1, t2) ==
        doctest::Approx(oracle::spearman(t1, t2)).epsilon(1e-12));

  CHECK_THROWS_AS((void)spearman({1, 1, 1}, {1, 2, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)spearman({1}, {2}), std::invalid_argument);
}

TEST_CASE("spearman matches the counting-rank oracle") {
  Rng rng(811);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + rng.uniform_int(14);
    std::vector<double> a = random_scores(rng, n, trial % 3 == 0);
    std::vector<double> b = random_scores(rng, n, trial % 2 == 0);
    const auto constant = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(),
                         [&](double x) { return x == v.front(); });
    };
    if (constant(a)) a[0] += 1.0;
    if (constant(b)) b[0] += 1.0;
    CHECK(spearman(a, b) ==
          doctest::Approx(oracle::spearman(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("spearman is invariant under monotone transforms") {
  Rng rng(812);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + rng.uniform_int(10);
    std::vector<double> a = random_scores(rng, n, true);
    a[0] = 7;  // guarantee non-constant
    const std::vector<double> b = random_scores(rng, n, false);
    std::vector<double> warped(n);
    for (int i = 0; i < n; ++i) warped[i] = std::exp(a[i]);
    CHECK(spearman(a, b) == spearman(warped, b));
  }
}

TEST_CASE("summary precision ratios") {
  const std::vector<bool> gt = {true, true, false, true, false,
                                true, false, false, true, false};
  CHECK(summary_precision({0, 1, 3}, gt) == doctest::Approx(1.0));
  CHECK(summary_precision({2, 4, 6}, gt) == doctest::Approx(0.0));
  CHECK(summary_precision({0, 1, 2, 4, 5}, gt) == doctest::Approx(0.6));
  CHECK_THROWS_AS((void)summary_precision({}, gt), std::invalid_argument);
  CHECK_THROWS_AS((void)summary_precision({1, 1}, gt), std::invalid_argument);
}

TEST_CASE("cluster recall counts covered relevant clusters") {
  const std::vector<bool> gt = {true, true, false, true, false, true};
  const std::vector<int> clustering = {0, 0, 1, 1, 2, 2};
  // Relevant clusters: 0 (frames 0,1), 1 (frame 3), 2 (frame 5).
  CHECK(cluster_recall({0, 3, 5}, gt, clustering) == doctest::Approx(1.0));
  CHECK(cluster_recall({0, 1}, gt, clustering) == doctest::Approx(1.0 / 3.0));
  // Selected negatives contribute nothing.
  CHECK(cluster_recall({0, 2}, gt, clustering) ==
        cluster_recall({0, 4}, gt, clustering));
  CHECK_THROWS_AS(
      (void)cluster_recall({0}, {false, false}, std::vector<int>{0, 1}),
      std::invalid_argument);
}

TEST_CASE("cluster recall matches the brute-force oracle") {
  Rng rng(813);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 4 + rng.uniform_int(12);
    std::vector<bool> relevant(n);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      relevant[i] = rng.uniform() < 0.5;
      any = any || relevant[i];
    }
    if (!any) relevant[0] = true;
    const std::vector<int> clustering =
        random_clustering(rng, n, 2 + rng.uniform_int(4));
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    rng.shuffle(pool);
    const std::vector<int> selected(pool.begin(),
                                    pool.begin() + 1 + rng.uniform_int(n - 1));
    CHECK(cluster_recall(selected, relevant, clustering) ==
          doctest::Approx(
              oracle::cluster_recall(selected, relevant, clustering))
              .epsilon(1e-9));
  }
}

TEST_CASE("f1 harmonic mean") {
  CHECK(f1(1.0, 1.0) == 1.0);
  CHECK(f1(0.0, 0.7) == 0.0);
  CHECK(f1(0.0, 0.0) == 0.0);
  const double expected = 2.0 * 0.704 * 0.825 / (0.704 + 0.825);
  CHECK(f1(0.704, 0.825) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(f1(0.704, 0.825) == doctest::Approx(0.7597).epsilon(1e-4));
  CHECK_THROWS_AS((void)f1(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)f1(0.5, 1.2), std::invalid_argument);

  Rng rng(814);
  for (int trial = 0; trial < 100; ++trial) {
    const double p = rng.uniform();
    const double r = rng.uniform();
    const double score = f1(p, r);
    CHECK(score <= 2.0 * std::min(p, r) + 1e-12);
    CHECK(f1(p, p) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("nmi identities and independence") {
  const std::vector<int> base = {0, 0, 1, 1, 2, 2};
  CHECK(nmi(base, base) == 1.0);
  const std::vector<int> relabeled = {5, 5, 9, 9, 7, 7};
  CHECK(nmi(base, relabeled) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nmi({0, 0, 1, 1}, {0, 1, 0, 1}) == 0.0);
  // Both single-cluster: identical structure by convention.
  CHECK(nmi({3, 3, 3}, {1, 1, 1}) == 1.0);
  CHECK_THROWS_AS((void)nmi({0, 1}, {0, 1, 2}), std::invalid_argument);
}

TEST_CASE("nmi symmetry, range, and oracle agreement") {
  Rng rng(815);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + rng.uniform_int(14);
    const std::vector<int> a = random_clustering(rng, n, 1 + rng.uniform_int(4));
    const std::vector<int> b = random_clustering(rng, n, 1 + rng.uniform_int(4));
    const double ab = nmi(a, b);
    CHECK(ab == doctest::Approx(nmi(b, a)).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);
    CHECK(ab == doctest::Approx(oracle::nmi(a, b)).epsilon(1e-9));
    // Invariant under a permutation of cluster ids.
    std::vector<int> shifted = a;
    for (int& id : shifted) id = (id + 3) * 7;
    CHECK(nmi(shifted, b) == doctest::Approx(ab).epsilon(1e-12));
  }
}

TEST_CASE("split-half consistency on perfect agreement") {
  const std::vector<double> scores = {1.0, 0.5, 0.0, 1.0, 0.5};
  const std::vector<std::vector<double>> raters(5, scores);
  const SplitHalfResult result = split_half_consistency(raters);
  CHECK(result.rho_mean == 1.0);
  CHECK(result.splits_used == 10);
  CHECK(result.splits_skipped == 0);
}

TEST_CASE("split-half consistency input validation") {
  const std::vector<double> scores = {1.0, 0.5, 0.0};
  CHECK_THROWS_AS(
      (void)split_half_consistency(std::vector<std::vector<double>>(4, scores)),
      std::invalid_argument);
  // Constant annotations make every split degenerate.
  const std::vector<std::vector<double>> flat(5,
                                              std::vector<double>(4, 0.5));
  CHECK_THROWS_AS((void)split_half_consistency(flat), std::invalid_argument);
}

TEST_CASE("split-half consistency matches the enumeration oracle") {
  Rng rng(816);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + rng.uniform_int(10);
    std::vector<double> base(n);
    for (double& x : base) x = rng.normal();
    std::vector<std::vector<double>> raters(5, base);
    for (auto& r : raters) {
      for (double& x : r) x += 0.3 * rng.normal();
    }
    const SplitHalfResult result = split_half_consistency(raters);

    double sum = 0.0;
    int used = 0;
    for (const auto& [i, j] : oracle::rater_pairs()) {
      std::vector<double> group_a(n), group_b(n);
      for (int f = 0; f < n; ++f) {
        group_a[f] = (raters[i][f] + raters[j][f]) / 2.0;
        double rest = 0.0;
        for (int r = 0; r < 5; ++r) {
          if (r != i && r != j) rest += raters[r][f];
        }
        group_b[f] = rest / 3.0;
      }
      const auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(),
                           [&](double x) { return x == v.front(); });
      };
      if (constant(group_a) || constant(group_b)) continue;
      sum += oracle::spearman(group_a, group_b);
      ++used;
    }
    REQUIRE(used > 0);
    CHECK(result.splits_used == used);
    CHECK(result.rho_mean == doctest::Approx(sum / used).epsilon(1e-9));
  }
}

TEST_CASE("clustering consistency basics") {
  const std::vector<int> c = {0, 0, 1, 1, 2};
  const ClusteringConsistency same =
      clustering_consistency(std::vector<Clustering>(5, c));
  CHECK(same.mean_nmi == 1.0);
  CHECK(same.prototype_index == 0);

  const Clustering other = {0, 1, 1, 0, 2};
  const ClusteringConsistency pair = clustering_consistency({c, other});
  CHECK(pair.mean_nmi == doctest::Approx(nmi(c, other)).epsilon(1e-12));
  CHECK(pair.prototype_index == 0);

  CHECK_THROWS_AS((void)clustering_consistency({c}), std::invalid_argument);
}

TEST_CASE("clustering consistency matches the pairwise oracle") {
  Rng rng(817);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + rng.uniform_int(10);
    std::vector<Clustering> clusterings;
    for (int r = 0; r < 5; ++r) {
      clusterings.push_back(random_clustering(rng, n, 2 + rng.uniform_int(3)));
    }
    const ClusteringConsistency result = clustering_consistency(clusterings);

    double total = 0.0;
    std::vector<double> mean_to_others(5, 0.0);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (i == j) continue;
        const double value = oracle::nmi(clusterings[i], clusterings[j]);
        mean_to_others[i] += value / 4.0;
        if (i < j) total += value;
      }
    }
    CHECK(result.mean_nmi == doctest::Approx(total / 10.0).epsilon(1e-9));
    const int argmax =
        static_cast<int>(std::max_element(mean_to_others.begin(),
                                          mean_to_others.end()) -
                         mean_to_others.begin());
    CHECK(result.prototype_index == argmax);
  }
}
