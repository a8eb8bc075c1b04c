/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#pragma once

#include "qrsum/common.hpp"

#include <string>
#include <vector>

namespace qrsum {

enum class LossMode { Explicit, Implicit, NoQuality };

enum class QueryEncoderVariant { MeanPool };

struct QueryEncoderKind {
  QueryEncoderVariant variant = QueryEncoderVariant::MeanPool;
  int max_tokens = 14;
};

/// Linear projection from frame features into a joint embedding space.
/// The first embed_dim output dimensions are the embedding; the final
/// dimension is a query-independent quality score.
struct EmbeddingModel {
  Matrix weight;  // feature_dim x (embed_dim + 1)
  Vector bias;    // embed_dim + 1
  int feature_dim = 0;
  int embed_dim = 0;
  QueryEncoderKind encoder;

  static EmbeddingModel zero(int feature_dim, int embed_dim);
  /// I.i.d. uniform entries in [-1/sqrt(F), +1/sqrt(F)], zero bias.
  static EmbeddingModel random_init(int feature_dim, int embed_dim,
                                    std::uint64_t seed);
  void validate() const;
};

struct Triplet {
  std::vector<Vector> query_words;
  Vector pos_feature;
  Vector neg_feature;
};

struct TrainConfig {
  double margin = 1.0;
  double huber_delta = 1.5;
  double l2_lambda = 1e-3;
  int epochs = 20;
  int batch_size = 128;
  double adagrad_base_rate = 0.1;
  double adagrad_epsilon = 1e-8;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct Projection {
  Vector embedding;  // length embed_dim
  double quality = 0.0;
};

struct Gradient {
  Matrix weight;
  Vector bias;
};

struct TrainResult {
  EmbeddingModel model;
  std::vector<double> loss_history;  // mean triplet loss per epoch
};

struct RankedFrame {
  int index = 0;
  double score = 0.0;
};

double cosine_similarity(const Vector& a, const Vector& b);

Projection project_frame(const EmbeddingModel& model, const Vector& feature);

/// Mean of the first encoder.max_tokens word vectors.
Vector encode_query(const EmbeddingModel& model,
                    const std::vector<Vector>& query_words);

/// Similarity of the encoded query to the projected frame, plus quality.
double relevance_score(const EmbeddingModel& model,
                       const std::vector<Vector>& query_words,
                       const Vector& feature);

/// Quadratic for x <= delta, linear beyond; defined for x >= 0.
double huber(double x, double delta);

double triplet_loss(const EmbeddingModel& model, const Triplet& triplet,
                    const TrainConfig& config, LossMode mode);

/// Mean analytic gradient of triplet_loss over the batch, plus
/// l2_lambda * weight decay on the matrix (the bias is not penalized).
Gradient loss_gradient(const EmbeddingModel& model,
                       const std::vector<Triplet>& batch,
                       const TrainConfig& config, LossMode mode);

/// Minibatch AdaGrad training; deterministic given config.rng_seed.
TrainResult train_relevance(const EmbeddingModel& init,
                            const std::vector<Triplet>& triplets,
                            const TrainConfig& config, LossMode mode);

/// Frames sorted by descending score; ties broken by ascending index.
/// NoQuality ranks by similarity alone; other modes add the quality term.
std::vector<RankedFrame> rank_frames(const EmbeddingModel& model,
                                     const std::vector<Vector>& query_words,
                                     const std::vector<Vector>& features,
                                     LossMode mode = LossMode::Implicit);

/// Text format: header `qrsum-model v1 F d`, then F matrix rows of d+1
/// values, then the bias row, all at full decimal precision.
void save_model(const std::string& path, const EmbeddingModel& model);
EmbeddingModel load_model(const std::string& path);

}  // namespace qrsum
