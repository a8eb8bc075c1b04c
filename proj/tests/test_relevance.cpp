/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#include "qrsum/relevance.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace qrsum;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

EmbeddingModel identity_model(int n) {
  EmbeddingModel model = EmbeddingModel::zero(n, n - 1);
  model.weight = Matrix::Identity(n, n);
  return model;
}

std::vector<Triplet> random_triplets(int count, int feature_dim, int embed_dim,
                                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triplet> out;
  for (int i = 0; i < count; ++i) {
    Triplet t;
    const int words = 1 + rng.uniform_int(4);
    for (int w = 0; w < words; ++w) {
      t.query_words.push_back(rng.normal_vector(embed_dim));
    }
    t.pos_feature = rng.normal_vector(feature_dim);
    t.neg_feature = rng.normal_vector(feature_dim);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

TEST_CASE("cosine similarity basics") {
  CHECK(cosine_similarity(vec({1, 0}), vec({1, 0})) == doctest::Approx(1.0));
  CHECK(cosine_similarity(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0));
  CHECK(cosine_similarity(vec({1, 2, 3}), vec({4, 5, 6})) ==
        doctest::Approx(0.974631846).epsilon(1e-6));
}

TEST_CASE("cosine similarity errors") {
  CHECK_THROWS_AS((void)cosine_similarity(vec({1, 0}), vec({1, 0, 0})),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)cosine_similarity(vec({0, 0}), vec({1, 0})),
                  std::invalid_argument);
}

TEST_CASE("cosine similarity properties") {
  Rng rng(91);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + rng.uniform_int(6);
    const Vector a = rng.normal_vector(n);
    const Vector b = rng.normal_vector(n);
    const double ab = cosine_similarity(a, b);
    CHECK(ab == cosine_similarity(b, a));
    CHECK(std::abs(ab) <= 1.0 + 1e-12);
    const double scale = 0.1 + 10.0 * rng.uniform();
    CHECK(cosine_similarity(Vector(scale * a), b) ==
          doctest::Approx(ab).epsilon(1e-12));
  }
}

TEST_CASE("project frame identity and zero maps") {
  const EmbeddingModel model = identity_model(3);
  const Projection p = project_frame(model, vec({2, 3, 5}));
  CHECK(p.embedding == vec({2, 3}));
  CHECK(p.quality == 5.0);

  const EmbeddingModel zero = EmbeddingModel::zero(3, 2);
  const Projection pz = project_frame(zero, vec({2, 3, 5}));
  CHECK(pz.embedding.isZero(0.0));
  CHECK(pz.quality == 0.0);

  CHECK_THROWS_AS((void)project_frame(model, vec({1, 2})),
                  std::invalid_argument);
}

TEST_CASE("project frame matches a naive matrix-vector product") {
  Rng rng(17);
  const EmbeddingModel model = EmbeddingModel::random_init(7, 4, 99);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector feature = rng.normal_vector(7);
    const Projection p = project_frame(model, feature);
    for (int c = 0; c < 5; ++c) {
      double sum = model.bias[c];
      for (int r = 0; r < 7; ++r) sum += feature[r] * model.weight(r, c);
      const double got = c < 4 ? p.embedding[c] : p.quality;
      CHECK(got == doctest::Approx(sum).epsilon(1e-12));
    }
  }
}

TEST_CASE("encode query mean pooling and truncation") {
  const EmbeddingModel model = identity_model(3);
  CHECK(encode_query(model, {vec({1, 2})}) == vec({1, 2}));
  const Vector mean = encode_query(model, {vec({1, 0}), vec({0, 1})});
  CHECK(mean == vec({0.5, 0.5}));

  const Vector w = vec({0.25, -1.5});
  std::vector<Vector> many(20, w);
  CHECK(encode_query(model, many) == w);

  CHECK_THROWS_AS((void)encode_query(model, {}), std::invalid_argument);
  CHECK_THROWS_AS((void)encode_query(model, {vec({1, 2, 3})}),
                  std::invalid_argument);
}

TEST_CASE("encode query truncates at max_tokens") {
  EmbeddingModel model = identity_model(3);
  model.encoder.max_tokens = 2;
  // Mean of only the first two words: ([2,0] + [0,2]) / 2.
  const Vector enc =
      encode_query(model, {vec({2, 0}), vec({0, 2}), vec({100, 100})});
  CHECK(enc == vec({1, 1}));
}

TEST_CASE("relevance score composes similarity and quality") {
  const EmbeddingModel model = identity_model(3);
  // Projected embedding equals the encoded query, quality = 0.
  CHECK(relevance_score(model, {vec({1, 2})}, vec({1, 2, 0})) ==
        doctest::Approx(1.0));
  // Orthogonal embedding, quality 0.3.
  CHECK(relevance_score(model, {vec({1, 0})}, vec({0, 1, 0.3})) ==
        doctest::Approx(0.3));
}

TEST_CASE("relevance score matches its compositional oracle") {
  const EmbeddingModel model = EmbeddingModel::random_init(6, 3, 5);
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Vector> query = {rng.normal_vector(3), rng.normal_vector(3)};
    const Vector feature = rng.normal_vector(6);
    const Projection p = project_frame(model, feature);
    const double expected =
        cosine_similarity(encode_query(model, query), p.embedding) + p.quality;
    CHECK(relevance_score(model, query, feature) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("huber values and branch boundary") {
  CHECK(huber(0.0, 1.5) == 0.0);
  CHECK(huber(1.0, 1.5) == doctest::Approx(0.5));
  CHECK(huber(3.0, 1.5) == doctest::Approx(3.375));
  CHECK_THROWS_AS((void)huber(-0.1, 1.5), std::invalid_argument);

  // Continuity at delta and monotonicity on a grid.
  for (double delta : {0.5, 1.0, 1.5, 2.0}) {
    CHECK(huber(delta, delta) ==
          doctest::Approx(delta * delta / 2.0).epsilon(1e-12));
    double prev = 0.0;
    for (double x = 0.0; x <= 4.0; x += 0.01) {
      const double y = huber(x, delta);
      CHECK(y >= prev - 1e-15);
      prev = y;
    }
  }
}

TEST_CASE("triplet loss closed-form cases") {
  const EmbeddingModel model = identity_model(3);
  TrainConfig config;  // margin 1, delta 1.5

  SUBCASE("both margins satisfied gives zero loss") {
    // pos: embedding [4,0] (cos 1), quality 5;  neg: [-4,0] (cos -1), -5.
    Triplet t{{vec({1, 0})}, vec({4, 0, 5}), vec({-4, 0, -5})};
    CHECK(triplet_loss(model, t, config, LossMode::Explicit) == 0.0);
    CHECK(triplet_loss(model, t, config, LossMode::Implicit) == 0.0);
    CHECK(triplet_loss(model, t, config, LossMode::NoQuality) == 0.0);
  }

  SUBCASE("coincident scores land every hinge exactly at the margin") {
    Triplet t{{vec({1, 0})}, vec({2, 0, 0.7}), vec({2, 0, 0.7})};
    CHECK(triplet_loss(model, t, config, LossMode::Explicit) ==
          doctest::Approx(1.0));
    CHECK(triplet_loss(model, t, config, LossMode::NoQuality) ==
          doctest::Approx(0.5));
    CHECK(triplet_loss(model, t, config, LossMode::Implicit) ==
          doctest::Approx(0.5));
  }
}

TEST_CASE("triplet loss is non-negative") {
  const EmbeddingModel model = EmbeddingModel::random_init(5, 3, 3);
  TrainConfig config;
  for (const Triplet& t : random_triplets(100, 5, 3, 31)) {
    for (LossMode mode :
         {LossMode::Explicit, LossMode::Implicit, LossMode::NoQuality}) {
      CHECK(triplet_loss(model, t, config, mode) >= 0.0);
    }
  }
}

TEST_CASE("loss gradient flat and decay-only regions") {
  const EmbeddingModel model = identity_model(3);
  std::vector<Triplet> zero_loss = {
      Triplet{{vec({1, 0})}, vec({4, 0, 5}), vec({-4, 0, -5})}};
  TrainConfig config;
  config.l2_lambda = 0.0;
  const Gradient flat =
      loss_gradient(model, zero_loss, config, LossMode::Explicit);
  CHECK(flat.weight.isZero(0.0));
  CHECK(flat.bias.isZero(0.0));

  config.l2_lambda = 0.01;
  const Gradient decay =
      loss_gradient(model, zero_loss, config, LossMode::Explicit);
  CHECK(decay.weight.isApprox(0.01 * model.weight, 1e-15));
  CHECK(decay.bias.isZero(0.0));

  CHECK_THROWS_AS((void)loss_gradient(model, {}, config, LossMode::Explicit),
                  std::invalid_argument);
}

TEST_CASE("loss gradient matches central finite differences") {
  TrainConfig config;
  for (LossMode mode :
       {LossMode::Explicit, LossMode::Implicit, LossMode::NoQuality}) {
    const EmbeddingModel model =
        EmbeddingModel::random_init(6, 3, 40 + static_cast<int>(mode));
    const std::vector<Triplet> batch =
        random_triplets(3, 6, 3, 700 + static_cast<int>(mode));
    const Gradient analytic = loss_gradient(model, batch, config, mode);
    const Gradient numeric = oracle::fd_gradient(model, batch, config, mode,
                                                 1e-5);
    for (int r = 0; r < analytic.weight.rows(); ++r) {
      for (int c = 0; c < analytic.weight.cols(); ++c) {
        if (std::abs(analytic.weight(r, c)) < 1e-8) continue;
        const double rel =
            std::abs(analytic.weight(r, c) - numeric.weight(r, c)) /
            std::abs(analytic.weight(r, c));
        CHECK(rel < 1e-4);
      }
    }
    for (int i = 0; i < analytic.bias.size(); ++i) {
      if (std::abs(analytic.bias[i]) < 1e-8) continue;
      CHECK(std::abs(analytic.bias[i] - numeric.bias[i]) /
                std::abs(analytic.bias[i]) <
            1e-4);
    }
  }
}

TEST_CASE("training is deterministic and zero epochs is a no-op") {
  const std::vector<Triplet> triplets = random_triplets(64, 6, 3, 8);
  const EmbeddingModel init = EmbeddingModel::random_init(6, 3, 9);
  TrainConfig config;
  config.epochs = 0;
  const TrainResult frozen =
      train_relevance(init, triplets, config, LossMode::Implicit);
  CHECK(frozen.model.weight == init.weight);
  CHECK(frozen.model.bias == init.bias);
  CHECK(frozen.loss_history.empty());

  config.epochs = 5;
  config.rng_seed = 123;
  const TrainResult a =
      train_relevance(init, triplets, config, LossMode::Implicit);
  const TrainResult b =
      train_relevance(init, triplets, config, LossMode::Implicit);
  CHECK(a.loss_history == b.loss_history);
  CHECK(a.model.weight == b.model.weight);
  CHECK(a.model.bias == b.model.bias);
}

TEST_CASE("full-batch training at a tiny rate never increases the loss") {
  const std::vector<Triplet> triplets = random_triplets(48, 5, 3, 77);
  const EmbeddingModel init = EmbeddingModel::random_init(5, 3, 78);
  TrainConfig config;
  config.batch_size = static_cast<int>(triplets.size());
  config.adagrad_base_rate = 1e-4;
  config.epochs = 15;
  const TrainResult result =
      train_relevance(init, triplets, config, LossMode::Implicit);
  REQUIRE(result.loss_history.size() == 15);
  for (std::size_t e = 1; e < result.loss_history.size(); ++e) {
    CHECK(result.loss_history[e] <= result.loss_history[e - 1] + 1e-9);
  }
}

TEST_CASE("rank frames ordering rules") {
  const EmbeddingModel model = identity_model(3);
  const std::vector<Vector> one = {vec({1, 2, 0})};
  const auto single = rank_frames(model, {vec({1, 2})}, one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].index == 0);
  CHECK(single[0].score == doctest::Approx(1.0));

  // Equal scores: the lower index wins.
  const std::vector<Vector> twins = {vec({3, 3, 0.5}), vec({3, 3, 0.5})};
  const auto tied = rank_frames(model, {vec({1, 1})}, twins);
  CHECK(tied[0].index == 0);
  CHECK(tied[1].index == 1);

  CHECK_THROWS_AS((void)rank_frames(model, {vec({1, 1})}, {}),
                  std::invalid_argument);
}

TEST_CASE("rank frames matches a score-then-sort oracle") {
  const EmbeddingModel model = EmbeddingModel::random_init(6, 3, 55);
  Rng rng(56);
  std::vector<Vector> query = {rng.normal_vector(3)};
  std::vector<Vector> features;
  for (int i = 0; i < 25; ++i) features.push_back(rng.normal_vector(6));

  const auto ranked = rank_frames(model, query, features, LossMode::Implicit);
  std::vector<std::pair<double, int>> expect;
  for (int i = 0; i < 25; ++i) {
    expect.emplace_back(relevance_score(model, query, features[i]), i);
  }
  std::sort(expect.begin(), expect.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  REQUIRE(ranked.size() == expect.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    CHECK(ranked[i].index == expect[i].second);
    CHECK(ranked[i].score == expect[i].first);
  }
}

TEST_CASE("rank frames ordering ignores a uniform quality shift") {
  EmbeddingModel model = EmbeddingModel::random_init(6, 3, 60);
  Rng rng(61);
  std::vector<Vector> query = {rng.normal_vector(3)};
  std::vector<Vector> features;
  for (int i = 0; i < 20; ++i) features.push_back(rng.normal_vector(6));

  EmbeddingModel shifted = model;
  shifted.bias[3] += 3.25;  // adds the same constant to every frame's quality

  for (LossMode mode : {LossMode::Implicit, LossMode::NoQuality}) {
    const auto base = rank_frames(model, query, features, mode);
    const auto moved = rank_frames(shifted, query, features, mode);
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(base[i].index == moved[i].index);
    }
  }
}

TEST_CASE("model save/load round trip is exact") {
  const EmbeddingModel model = EmbeddingModel::random_init(5, 3, 404);
  const std::string path =
      (std::filesystem::temp_directory_path() / "qrsum_model_rt.txt").string();
  save_model(path, model);
  const EmbeddingModel loaded = load_model(path);
  CHECK(loaded.feature_dim == model.feature_dim);
  CHECK(loaded.embed_dim == model.embed_dim);
  CHECK(loaded.weight == model.weight);
  CHECK(loaded.bias == model.bias);
  std::filesystem::remove(path);
}

TEST_CASE("model loader reports malformed files") {
  const auto tmp = std::filesystem::temp_directory_path();
  const std::string bad_header = (tmp / "qrsum_bad_header.txt").string();
  {
    std::ofstream out(bad_header);
    out << "not-a-model 1 2\n";
  }
  CHECK_THROWS_AS((void)load_model(bad_header), std::runtime_error);

  const std::string truncated = (tmp / "qrsum_truncated.txt").string();
  {
    std::ofstream out(truncated);
    out << "qrsum-model v1 3 2\n1 0 0\n";
  }
  try {
    (void)load_model(truncated);
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(truncated) != std::string::npos);
  }
  std::filesystem::remove(bad_header);
  std::filesystem::remove(truncated);
}
