/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#include "qrsum/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace qrsum {

namespace {

struct TripletForward {
  Vector t;          // encoded query
  Projection pos;
  Projection neg;
  double s_pos = 0.0;
  double s_neg = 0.0;
};

double hinge(double x) { return x > 0.0 ? x : 0.0; }

/// d/dx huber(x, delta); 0 at x = 0, so hinge kinks carry no gradient.
double huber_grad(double x, double delta) {
  return x <= delta ? x : delta;
}

/// d cos(t, v) / d v for fixed t.
Vector cosine_grad_wrt_v(const Vector& t, const Vector& v) {
  const double nt = t.norm();
  const double nv = v.norm();
  require(nt > 0.0 && nv > 0.0,
          "cosine gradient undefined for zero-norm input");
  const double dot = t.dot(v);
  return (t - (dot / (nv * nv)) * v) / (nt * nv);
}

TripletForward forward(const EmbeddingModel& model, const Triplet& triplet) {
  TripletForward f;
  f.t = encode_query(model, triplet.query_words);
  f.pos = project_frame(model, triplet.pos_feature);
  f.neg = project_frame(model, triplet.neg_feature);
  f.s_pos = cosine_similarity(f.t, f.pos.embedding);
  f.s_neg = cosine_similarity(f.t, f.neg.embedding);
  return f;
}

double loss_from_forward(const TripletForward& f, const TrainConfig& config,
                         LossMode mode) {
  const double g = config.margin;
  const double d = config.huber_delta;
  switch (mode) {
    case LossMode::Explicit:
      return huber(hinge(g - f.s_pos + f.s_neg), d) +
             huber(hinge(g - f.pos.quality + f.neg.quality), d);
    case LossMode::Implicit: {
      const double r_pos = f.s_pos + f.pos.quality;
      const double r_neg = f.s_neg + f.neg.quality;
      return huber(hinge(g - r_pos + r_neg), d);
    }
    case LossMode::NoQuality:
      return huber(hinge(g - f.s_pos + f.s_neg), d);
  }
  throw std::invalid_argument("unknown loss mode");
}

/// Accumulates d loss / d weight and d loss / d bias for one triplet.
void accumulate_gradient(const EmbeddingModel& model, const Triplet& triplet,
                         const TrainConfig& config, LossMode mode,
                         Matrix& grad_w, Vector& grad_b) {
  const TripletForward f = forward(model, triplet);
  const int d = model.embed_dim;
  const double gamma = config.margin;
  const double delta = config.huber_delta;

  // Upstream derivatives of the loss w.r.t. (s+, s-, q+, q-).
  double ds_pos = 0.0, ds_neg = 0.0, dq_pos = 0.0, dq_neg = 0.0;
  switch (mode) {
    case LossMode::Explicit: {
      const double hs = hinge(gamma - f.s_pos + f.s_neg);
      const double hq = hinge(gamma - f.pos.quality + f.neg.quality);
      const double gs = huber_grad(hs, delta);
      const double gq = huber_grad(hq, delta);
      ds_pos = -gs;
      ds_neg = gs;
      dq_pos = -gq;
      dq_neg = gq;
      break;
    }
    case LossMode::Implicit: {
      const double hr = hinge(gamma - (f.s_pos + f.pos.quality) +
                              (f.s_neg + f.neg.quality));
      const double gr = huber_grad(hr, delta);
      ds_pos = -gr;
      ds_neg = gr;
      dq_pos = -gr;
      dq_neg = gr;
      break;
    }
    case LossMode::NoQuality: {
      const double hs = hinge(gamma - f.s_pos + f.s_neg);
      const double gs = huber_grad(hs, delta);
      ds_pos = -gs;
      ds_neg = gs;
      break;
    }
  }

  // d loss / d projection output, for each frame of the triplet.
  Vector dout_pos = Vector::Zero(d + 1);
  Vector dout_neg = Vector::Zero(d + 1);
  if (ds_pos != 0.0) {
    dout_pos.head(d) = ds_pos * cosine_grad_wrt_v(f.t, f.pos.embedding);
  }
  if (ds_neg != 0.0) {
    dout_neg.head(d) = ds_neg * cosine_grad_wrt_v(f.t, f.neg.embedding);
  }
  dout_pos[d] = dq_pos;
  dout_neg[d] = dq_neg;

  // output = weight^T * feature + bias.
  grad_w.noalias() += triplet.pos_feature * dout_pos.transpose();
  grad_w.noalias() += triplet.neg_feature * dout_neg.transpose();
  grad_b += dout_pos + dout_neg;
}

struct BatchGrad {
  Gradient gradient;
  double mean_loss = 0.0;
};

BatchGrad batch_gradient(const EmbeddingModel& model,
                         const std::vector<Triplet>& batch,
                         const TrainConfig& config, LossMode mode) {
  require(!batch.empty(), "loss_gradient: batch must be non-empty");
  BatchGrad out;
  out.gradient.weight = Matrix::Zero(model.feature_dim, model.embed_dim + 1);
  out.gradient.bias = Vector::Zero(model.embed_dim + 1);
  double loss_sum = 0.0;
  for (const Triplet& triplet : batch) {
    loss_sum += triplet_loss(model, triplet, config, mode);
    accumulate_gradient(model, triplet, config, mode, out.gradient.weight,
                        out.gradient.bias);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.gradient.weight *= inv;
  out.gradient.bias *= inv;
  if (config.l2_lambda != 0.0) {
    out.gradient.weight += config.l2_lambda * model.weight;
  }
  out.mean_loss = loss_sum * inv;
  return out;
}

}  // namespace

EmbeddingModel EmbeddingModel::zero(int feature_dim, int embed_dim) {
  require(feature_dim >= 1 && embed_dim >= 1,
          "model dimensions must be positive");
  EmbeddingModel m;
  m.feature_dim = feature_dim;
  m.embed_dim = embed_dim;
  m.weight = Matrix::Zero(feature_dim, embed_dim + 1);
  m.bias = Vector::Zero(embed_dim + 1);
  return m;
}

EmbeddingModel EmbeddingModel::random_init(int feature_dim, int embed_dim,
                                           std::uint64_t seed) {
  EmbeddingModel m = zero(feature_dim, embed_dim);
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  for (int i = 0; i < feature_dim; ++i) {
    for (int j = 0; j < embed_dim + 1; ++j) {
      m.weight(i, j) = rng.uniform(-bound, bound);
    }
  }
  return m;
}

void EmbeddingModel::validate() const {
  require(feature_dim >= 1 && embed_dim >= 1,
          "model dimensions must be positive");
  require(weight.rows() == feature_dim && weight.cols() == embed_dim + 1,
          "weight matrix shape mismatch");
  require(bias.size() == embed_dim + 1, "bias length mismatch");
  require(encoder.max_tokens >= 1, "encoder max_tokens must be positive");
  require(all_finite(weight) && all_finite(bias),
          "model parameters must be finite");
}

void TrainConfig::validate() const {
  require(margin > 0.0, "margin must be positive");
  require(huber_delta > 0.0, "huber_delta must be positive");
  require(l2_lambda >= 0.0, "l2_lambda must be non-negative");
  require(epochs >= 0, "epochs must be non-negative");
  require(batch_size >= 1, "batch_size must be positive");
  require(adagrad_base_rate > 0.0, "adagrad_base_rate must be positive");
  require(adagrad_epsilon > 0.0, "adagrad_epsilon must be positive");
}

double cosine_similarity(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "cosine_similarity: dimension mismatch");
  require(a.size() > 0, "cosine_similarity: empty input");
  const double na = a.norm();
  const double nb = b.norm();
  require(na > 0.0 && nb > 0.0, "cosine_similarity: zero-norm input");
  return a.dot(b) / (na * nb);
}

Projection project_frame(const EmbeddingModel& model, const Vector& feature) {
  require(feature.size() == model.feature_dim,
          "project_frame: feature dimension mismatch");
  require(all_finite(feature), "project_frame: feature must be finite");
  const Vector out = model.weight.transpose() * feature + model.bias;
  Projection p;
  p.embedding = out.head(model.embed_dim);
  p.quality = out[model.embed_dim];
  return p;
}

Vector encode_query(const EmbeddingModel& model,
                    const std::vector<Vector>& query_words) {
  require(!query_words.empty(), "encode_query: empty query");
  const int used = std::min<int>(static_cast<int>(query_words.size()),
                                 model.encoder.max_tokens);
  Vector sum = Vector::Zero(model.embed_dim);
  for (int i = 0; i < used; ++i) {
    require(query_words[i].size() == model.embed_dim,
            "encode_query: word dimension mismatch");
    require(all_finite(query_words[i]),
            "encode_query: word vector must be finite");
    sum += query_words[i];
  }
  return sum / static_cast<double>(used);
}

double relevance_score(const EmbeddingModel& model,
                       const std::vector<Vector>& query_words,
                       const Vector& feature) {
  const Vector t = encode_query(model, query_words);
  const Projection p = project_frame(model, feature);
  return cosine_similarity(t, p.embedding) + p.quality;
}

double huber(double x, double delta) {
  require(delta > 0.0, "huber: delta must be positive");
  require(x >= 0.0, "huber: input must be non-negative");
  if (x <= delta) return 0.5 * x * x;
  return delta * (x - 0.5 * delta);
}

double triplet_loss(const EmbeddingModel& model, const Triplet& triplet,
                    const TrainConfig& config, LossMode mode) {
  return loss_from_forward(forward(model, triplet), config, mode);
}

Gradient loss_gradient(const EmbeddingModel& model,
                       const std::vector<Triplet>& batch,
                       const TrainConfig& config, LossMode mode) {
  return batch_gradient(model, batch, config, mode).gradient;
}

TrainResult train_relevance(const EmbeddingModel& init,
                            const std::vector<Triplet>& triplets,
                            const TrainConfig& config, LossMode mode) {
  init.validate();
  config.validate();
  require(!triplets.empty(), "train_relevance: empty triplet set");

  TrainResult result;
  result.model = init;
  EmbeddingModel& model = result.model;
  Matrix accum_w = Matrix::Zero(model.feature_dim, model.embed_dim + 1);
  Vector accum_b = Vector::Zero(model.embed_dim + 1);
  Rng rng(config.rng_seed);

  const int n = static_cast<int>(triplets.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Triplet> batch;
  batch.reserve(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (int start = 0; start < n; start += config.batch_size) {
      const int end = std::min(n, start + config.batch_size);
      batch.clear();
      for (int i = start; i < end; ++i) batch.push_back(triplets[order[i]]);
      const BatchGrad bg = batch_gradient(model, batch, config, mode);
      epoch_loss += bg.mean_loss * static_cast<double>(end - start);

      accum_w.array() += bg.gradient.weight.array().square();
      model.weight.array() -=
          config.adagrad_base_rate * bg.gradient.weight.array() /
          (accum_w.array().sqrt() + config.adagrad_epsilon);
      accum_b.array() += bg.gradient.bias.array().square();
      model.bias.array() -=
          config.adagrad_base_rate * bg.gradient.bias.array() /
          (accum_b.array().sqrt() + config.adagrad_epsilon);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(n));
  }
  return result;
}

std::vector<RankedFrame> rank_frames(const EmbeddingModel& model,
                                     const std::vector<Vector>& query_words,
                                     const std::vector<Vector>& features,
                                     LossMode mode) {
  require(!features.empty(), "rank_frames: empty frame list");
  const Vector t = encode_query(model, query_words);
  std::vector<RankedFrame> ranked;
  ranked.reserve(features.size());
  for (int i = 0; i < static_cast<int>(features.size()); ++i) {
    const Projection p = project_frame(model, features[i]);
    double score = cosine_similarity(t, p.embedding);
    if (mode != LossMode::NoQuality) score += p.quality;
    ranked.push_back({i, score});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedFrame& a, const RankedFrame& b) {
                     return a.score > b.score;
                   });
  return ranked;
}

void save_model(const std::string& path, const EmbeddingModel& model) {
  model.validate();
  std::ostringstream out;
  out << "qrsum-model v1 " << model.feature_dim << ' ' << model.embed_dim
      << '\n';
  char buf[64];
  auto write_row = [&](const auto& row) {
    for (int j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  };
  for (int i = 0; i < model.feature_dim; ++i) {
    write_row(model.weight.row(i));
  }
  write_row(model.bias);

  std::ofstream file(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file << out.str();
  if (!file) throw std::runtime_error("write failed: " + path);
}

EmbeddingModel load_model(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open model file: " + path);
  std::string line;
  if (!std::getline(file, line)) {
    throw std::runtime_error(path + ": empty model file");
  }
  std::istringstream header(line);
  std::string magic, version;
  int feature_dim = 0, embed_dim = 0;
  if (!(header >> magic >> version >> feature_dim >> embed_dim) ||
      magic != "qrsum-model" || version != "v1") {
    throw std::runtime_error(path + ": bad model header");
  }
  if (feature_dim < 1 || embed_dim < 1) {
    throw std::runtime_error(path + ": bad model dimensions");
  }
  EmbeddingModel model = EmbeddingModel::zero(feature_dim, embed_dim);
  auto read_row = [&](int line_no, auto&& assign) {
    if (!std::getline(file, line)) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": unexpected end of file");
    }
    std::istringstream row(line);
    for (int j = 0; j < embed_dim + 1; ++j) {
      double value = 0.0;
      if (!(row >> value) || !std::isfinite(value)) {
        throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                 ": expected " + std::to_string(embed_dim + 1) +
                                 " finite values");
      }
      assign(j, value);
    }
  };
  for (int i = 0; i < feature_dim; ++i) {
    read_row(i + 2, [&](int j, double v) { model.weight(i, j) = v; });
  }
  read_row(feature_dim + 2, [&](int j, double v) { model.bias[j] = v; });
  model.validate();
  return model;
}

}  // namespace qrsum
