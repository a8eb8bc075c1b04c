/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#include "qrsum/data.hpp"

#include "json_util.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qrsum {

using jsonio::json;

// ---- Annotation merging -------------------------------------------------

void AnnotationSet::validate() const {
  require(rater_labels.size() == 5, "annotation set must have 5 raters");
  require(rater_clusterings.size() == 5,
          "annotation set must have 5 clusterings");
  const std::size_t n = rater_labels.front().size();
  require(n >= 1, "annotation set must cover at least one frame");
  for (const auto& labels : rater_labels) {
    require(labels.size() == n, "rater label lengths differ");
  }
  for (const auto& clustering : rater_clusterings) {
    require(clustering.size() == n, "rater clustering lengths differ");
    for (int id : clustering) {
      require(id >= 0, "cluster ids must be non-negative");
    }
  }
}

int AnnotationSet::frame_count() const {
  return static_cast<int>(rater_labels.front().size());
}

Label label_from_string(const std::string& s) {
  if (s == "VeryGood") return Label::VeryGood;
  if (s == "Good") return Label::Good;
  if (s == "NotGood") return Label::NotGood;
  if (s == "Trash") return Label::Trash;
  throw std::invalid_argument("unknown relevance label: '" + s + "'");
}

std::string label_to_string(Label label) {
  switch (label) {
    case Label::VeryGood: return "VeryGood";
    case Label::Good: return "Good";
    case Label::NotGood: return "NotGood";
    case Label::Trash: return "Trash";
  }
  throw std::invalid_argument("unknown relevance label");
}

double map_label(Label label) {
  switch (label) {
    case Label::VeryGood: return 1.0;
    case Label::Good: return 0.5;
    case Label::NotGood: return 0.0;
    case Label::Trash: return 0.0;
  }
  throw std::invalid_argument("unknown relevance label");
}

std::vector<bool> merge_relevance(
    const std::vector<RelevanceLabels>& rater_labels) {
  require(rater_labels.size() == 5, "merge_relevance: exactly 5 raters");
  const std::size_t n = rater_labels.front().size();
  for (const auto& labels : rater_labels) {
    require(labels.size() == n, "merge_relevance: label lengths differ");
  }
  std::vector<bool> merged(n, false);
  for (std::size_t f = 0; f < n; ++f) {
    double sum = 0.0;
    for (const auto& labels : rater_labels) sum += map_label(labels[f]);
    merged[f] = (sum / 5.0) >= 0.5;
  }
  return merged;
}

Clustering merge_clusterings(
    const std::vector<Clustering>& rater_clusterings) {
  const ClusteringConsistency consistency =
      clustering_consistency(rater_clusterings);
  return rater_clusterings[consistency.prototype_index];
}

GroundTruth merge_annotations(const AnnotationSet& annotations) {
  annotations.validate();
  GroundTruth gt;
  gt.binary_relevance = merge_relevance(annotations.rater_labels);
  gt.prototype_clustering = merge_clusterings(annotations.rater_clusterings);
  return gt;
}

RelevanceLabels consensus_labels(const AnnotationSet& annotations) {
  annotations.validate();
  const int n = annotations.frame_count();
  RelevanceLabels consensus(n, Label::Trash);
  for (int f = 0; f < n; ++f) {
    double sum = 0.0;
    for (const auto& labels : annotations.rater_labels) {
      sum += map_label(labels[f]);
    }
    const double mean = sum / 5.0;
    if (mean >= 0.75) {
      consensus[f] = Label::VeryGood;
    } else if (mean >= 0.5) {
      consensus[f] = Label::Good;
    } else if (mean >= 0.25) {
      consensus[f] = Label::NotGood;
    } else {
      consensus[f] = Label::Trash;
    }
  }
  return consensus;
}

std::vector<Triplet> sample_triplets(const GroundTruth& gt,
                                     const std::vector<Vector>& frame_features,
                                     const std::vector<Vector>& query_words,
                                     int per_video, std::uint64_t rng_seed) {
  require(per_video >= 0, "sample_triplets: per_video must be non-negative");
  require(gt.binary_relevance.size() == frame_features.size(),
          "sample_triplets: ground truth length mismatch");
  require(!query_words.empty(), "sample_triplets: empty query");
  std::vector<int> positives, negatives;
  for (int i = 0; i < static_cast<int>(gt.binary_relevance.size()); ++i) {
    (gt.binary_relevance[i] ? positives : negatives).push_back(i);
  }
  require(!positives.empty(), "sample_triplets: no positive frames");
  require(!negatives.empty(), "sample_triplets: no negative frames");

  Rng rng(rng_seed);
  std::vector<Triplet> triplets;
  triplets.reserve(per_video);
  for (int t = 0; t < per_video; ++t) {
    const int pos = positives[rng.uniform_int(positives.size())];
    const int neg = negatives[rng.uniform_int(negatives.size())];
    triplets.push_back({query_words, frame_features[pos], frame_features[neg]});
  }
  return triplets;
}

// ---- Synthetic corpus ---------------------------------------------------

void SyntheticConfig::validate() const {
  require(n_videos >= 1, "n_videos must be positive");
  require(frames_per_video >= 2, "frames_per_video must be at least 2");
  require(n_clusters_min >= 2, "n_clusters_min must be at least 2");
  require(n_clusters_max >= n_clusters_min,
          "n_clusters_max must be >= n_clusters_min");
  require(n_clusters_max <= frames_per_video,
          "n_clusters_max cannot exceed frames_per_video");
  require(feature_dim >= 1, "feature_dim must be positive");
  require(embed_dim >= 2, "embed_dim must be at least 2");
  require(word_dim == embed_dim,
          "word_dim must equal embed_dim for the MeanPool encoder");
  require(feature_dim >= embed_dim + 1,
          "feature_dim must be at least embed_dim + 1");
  require(div_dim >= 1, "div_dim must be positive");
  require(vocab_size >= 8, "vocab_size must be at least 8");
  require(summary_budget >= 1 && summary_budget <= frames_per_video,
          "summary_budget must satisfy 1 <= k <= frames_per_video");
  require(triplets_per_video >= 0, "triplets_per_video must be non-negative");
  require(noise_sigma >= 0.0, "noise_sigma must be non-negative");
  require(quality_relevance_gain >= 0.0,
          "quality_relevance_gain must be non-negative");
  require(relevant_cos_lo >= 0.5 && relevant_cos_hi <= 1.0 &&
              relevant_cos_lo <= relevant_cos_hi,
          "relevant cosine band must lie in [0.5, 1]");
  require(irrelevant_cos_lo >= -1.0 && irrelevant_cos_hi < 0.5 &&
              irrelevant_cos_lo <= irrelevant_cos_hi,
          "irrelevant cosine band must lie in [-1, 0.5)");
}

namespace {

/// A unit vector at the given cosine to unit vector `axis`.
Vector vector_at_cosine(Rng& rng, const Vector& axis, double cosine) {
  const int d = static_cast<int>(axis.size());
  Vector ortho;
  double norm = 0.0;
  do {
    ortho = rng.normal_vector(d);
    ortho -= ortho.dot(axis) * axis;
    norm = ortho.norm();
  } while (norm < 1e-9);
  ortho /= norm;
  return cosine * axis + std::sqrt(1.0 - cosine * cosine) * ortho;
}

Label positive_label(Rng& rng) {
  return rng.uniform() < 0.6 ? Label::VeryGood : Label::Good;
}

Label negative_label(Rng& rng) {
  return rng.uniform() < 0.6 ? Label::NotGood : Label::Trash;
}

struct VideoDraft {
  SyntheticVideo video;
  bool usable = false;
};

VideoDraft draw_video(const SyntheticConfig& cfg,
                      const EmbeddingModel& planted,
                      const Eigen::LDLT<Matrix>& gram,
                      const std::vector<Vector>& vocab, int index,
                      std::uint64_t seed) {
  Rng rng(seed);
  const int n = cfg.frames_per_video;
  const int d = cfg.embed_dim;

  VideoDraft draft;
  SyntheticVideo& video = draft.video;
  char id[32];
  std::snprintf(id, sizeof(id), "v%04d", index);
  video.id = id;
  video.k = cfg.summary_budget;

  // Query: a small bag of vocabulary words with a usable mean direction.
  Vector query_mean;
  do {
    const int q_len = 3 + static_cast<int>(rng.uniform_int(5));
    video.query_words.clear();
    for (int w = 0; w < q_len; ++w) {
      video.query_words.push_back(vocab[rng.uniform_int(vocab.size())]);
    }
    query_mean = Vector::Zero(d);
    for (const Vector& w : video.query_words) query_mean += w;
    query_mean /= static_cast<double>(video.query_words.size());
  } while (query_mean.norm() < 0.2);
  const Vector query_axis = query_mean / query_mean.norm();

  // Cluster centers: at least one relevant and one irrelevant cluster.
  const int n_clusters =
      cfg.n_clusters_min +
      static_cast<int>(rng.uniform_int(cfg.n_clusters_max - cfg.n_clusters_min + 1));
  const int n_relevant = 1 + static_cast<int>(rng.uniform_int(n_clusters - 1));
  std::vector<Vector> centers(n_clusters);
  std::vector<Vector> div_anchors(n_clusters);
  for (int c = 0; c < n_clusters; ++c) {
    const bool relevant = c < n_relevant;
    const double cosine =
        relevant ? rng.uniform(cfg.relevant_cos_lo, cfg.relevant_cos_hi)
                 : rng.uniform(cfg.irrelevant_cos_lo, cfg.irrelevant_cos_hi);
    centers[c] = rng.uniform(0.9, 1.1) * vector_at_cosine(rng, query_axis, cosine);
    div_anchors[c] = 3.0 * rng.normal_vector(cfg.div_dim);
  }

  // Frame assignment: every cluster non-empty, remainder uniform.
  video.planted_clustering.resize(n);
  for (int i = 0; i < n; ++i) {
    video.planted_clustering[i] =
        i < n_clusters ? i : static_cast<int>(rng.uniform_int(n_clusters));
  }

  video.features = Matrix::Zero(n, cfg.feature_dim);
  video.div_features = Matrix::Zero(n, cfg.div_dim);
  video.planted_quality = Vector::Zero(n);
  video.planted_relevance.assign(n, false);
  const double sigma = cfg.noise_sigma;
  for (int i = 0; i < n; ++i) {
    const int c = video.planted_clustering[i];
    const Vector embedding = centers[c] + 0.3 * sigma * rng.normal_vector(d);
    const bool relevant =
        embedding.norm() > 0.0 &&
        cosine_similarity(embedding, query_mean) >= 0.5;
    video.planted_relevance[i] = relevant;
    video.planted_quality[i] =
        cfg.quality_relevance_gain * (relevant ? 0.5 : -0.5) +
        sigma * rng.normal();
    video.div_features.row(i) =
        (div_anchors[c] + sigma * rng.normal_vector(cfg.div_dim)).transpose();

    // Rotate the planted (embedding, quality) target back into feature
    // space through the pseudo-inverse of the planted projection.
    Vector target(d + 1);
    target.head(d) = embedding;
    target[d] = video.planted_quality[i];
    const Vector feature =
        planted.weight * gram.solve(target) + sigma * rng.normal_vector(cfg.feature_dim);
    video.features.row(i) = feature.transpose();
  }

  bool any_pos = false, any_neg = false;
  for (bool r : video.planted_relevance) (r ? any_pos : any_neg) = true;
  draft.usable = any_pos && any_neg;
  if (!draft.usable) return draft;

  // Five raters: per-frame base labels, cross-class flips with probability
  // p_cross, within-class redraws with probability p_within; both vanish
  // with noise_sigma so the noiseless corpus is exactly recoverable.
  const double p_cross = std::min(0.4, 0.5 * sigma);
  const double p_within = std::min(0.5, sigma);
  RelevanceLabels base(n, Label::Trash);
  for (int i = 0; i < n; ++i) {
    base[i] = video.planted_relevance[i] ? positive_label(rng)
                                         : negative_label(rng);
  }
  video.annotations.rater_labels.assign(5, base);
  video.annotations.rater_clusterings.assign(5, video.planted_clustering);
  for (int r = 0; r < 5; ++r) {
    for (int i = 0; i < n; ++i) {
      const bool relevant = video.planted_relevance[i];
      if (rng.uniform() < p_cross) {
        video.annotations.rater_labels[r][i] =
            relevant ? negative_label(rng) : positive_label(rng);
      } else if (rng.uniform() < p_within) {
        video.annotations.rater_labels[r][i] =
            relevant ? positive_label(rng) : negative_label(rng);
      }
      if (rng.uniform() < p_cross) {
        video.annotations.rater_clusterings[r][i] =
            static_cast<int>(rng.uniform_int(n_clusters));
      }
    }
  }
  return draft;
}

}  // namespace

SyntheticCorpus gen_synthetic(const SyntheticConfig& config) {
  config.validate();
  SyntheticCorpus corpus;
  corpus.planted_model = EmbeddingModel::random_init(
      config.feature_dim, config.embed_dim, derive_seed(config.rng_seed, 7));

  // Gram factorization for the right pseudo-inverse of weight^T.
  const Matrix gram_matrix =
      corpus.planted_model.weight.transpose() * corpus.planted_model.weight;
  const Eigen::LDLT<Matrix> gram(gram_matrix);
  require(gram.info() == Eigen::Success,
          "gen_synthetic: planted projection is degenerate");

  Rng vocab_rng(derive_seed(config.rng_seed, 11));
  std::vector<Vector> vocab(config.vocab_size);
  for (int w = 0; w < config.vocab_size; ++w) {
    Vector v = vocab_rng.normal_vector(config.word_dim);
    while (v.norm() < 1e-9) v = vocab_rng.normal_vector(config.word_dim);
    vocab[w] = v / v.norm();
  }

  for (int v = 0; v < config.n_videos; ++v) {
    VideoDraft draft;
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
      draft = draw_video(config, corpus.planted_model, gram, vocab, v,
                         derive_seed(config.rng_seed,
                                     1000 + static_cast<std::uint64_t>(v) +
                                         100000 * attempt));
      if (draft.usable) break;
    }
    require(draft.usable,
            "gen_synthetic: could not realize a balanced video; "
            "check the cosine bands and noise settings");

    GroundTruth planted_gt;
    planted_gt.binary_relevance = draft.video.planted_relevance;
    planted_gt.prototype_clustering = draft.video.planted_clustering;
    std::vector<Vector> features(config.frames_per_video);
    for (int i = 0; i < config.frames_per_video; ++i) {
      features[i] = draft.video.features.row(i).transpose();
    }
    std::vector<Triplet> video_triplets = sample_triplets(
        planted_gt, features, draft.video.query_words,
        config.triplets_per_video,
        derive_seed(config.rng_seed, 500000 + static_cast<std::uint64_t>(v)));
    corpus.triplets.insert(corpus.triplets.end(), video_triplets.begin(),
                           video_triplets.end());
    corpus.videos.push_back(std::move(draft.video));
  }
  return corpus;
}

SummaryProblem make_problem(const SyntheticVideo& video,
                            const EmbeddingModel& model) {
  const int n = static_cast<int>(video.features.rows());
  Matrix embeddings(n, model.embed_dim);
  Vector quality(n);
  for (int i = 0; i < n; ++i) {
    const Projection p =
        project_frame(model, video.features.row(i).transpose());
    embeddings.row(i) = p.embedding.transpose();
    quality[i] = p.quality;
  }
  const Vector query = encode_query(model, video.query_words);
  return SummaryProblem(std::move(embeddings), std::move(quality),
                        video.div_features, query, video.k);
}

// ---- File IO ------------------------------------------------------------

std::vector<Triplet> load_triplets(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open file: " + path);
  std::vector<Triplet> triplets;
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context = path + " line " + std::to_string(line_no);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(context + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("query") || !doc.contains("pos") ||
        !doc.contains("neg")) {
      throw std::runtime_error(context +
                               ": expected fields 'query', 'pos', 'neg'");
    }
    Triplet t;
    if (!doc["query"].is_array() || doc["query"].empty()) {
      throw std::runtime_error(context + ": 'query' must be a non-empty "
                               "array of word vectors");
    }
    for (const auto& word : doc["query"]) {
      t.query_words.push_back(jsonio::to_vector(word, context + " query"));
    }
    t.pos_feature = jsonio::to_vector(doc["pos"], context + " pos");
    t.neg_feature = jsonio::to_vector(doc["neg"], context + " neg");
    triplets.push_back(std::move(t));
  }
  return triplets;
}

void save_triplets(const std::string& path,
                   const std::vector<Triplet>& triplets) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  for (const Triplet& t : triplets) {
    json doc;
    doc["query"] = json::array();
    for (const Vector& w : t.query_words) {
      doc["query"].push_back(jsonio::from_vector(w));
    }
    doc["pos"] = jsonio::from_vector(t.pos_feature);
    doc["neg"] = jsonio::from_vector(t.neg_feature);
    file << doc.dump() << '\n';
  }
  if (!file) throw std::runtime_error("write failed: " + path);
}

std::vector<AnnotatedVideo> load_annotations(const std::string& path) {
  const json doc = jsonio::read_file(path);
  const json items = jsonio::payload(doc, "annotations", path);
  std::vector<AnnotatedVideo> videos;
  for (const auto& item : items) {
    AnnotatedVideo video;
    video.id = item.value("id", "");
    const std::string context = path + " video '" + video.id + "'";
    if (!item.contains("labels") || !item.contains("clusterings")) {
      throw std::runtime_error(context +
                               ": expected fields 'labels' and 'clusterings'");
    }
    if (!item["labels"].is_array() || item["labels"].size() != 5) {
      throw std::runtime_error(context + ": expected 5 rater label lists");
    }
    if (!item["clusterings"].is_array() || item["clusterings"].size() != 5) {
      throw std::runtime_error(context + ": expected 5 rater clusterings");
    }
    for (const auto& rater : item["labels"]) {
      RelevanceLabels labels;
      for (const auto& value : rater) {
        if (!value.is_string()) {
          throw std::runtime_error(context + ": labels must be strings");
        }
        try {
          labels.push_back(label_from_string(value.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          throw std::runtime_error(context + ": " + e.what());
        }
      }
      video.annotations.rater_labels.push_back(std::move(labels));
    }
    for (const auto& rater : item["clusterings"]) {
      Clustering clustering;
      for (const auto& value : rater) {
        if (!value.is_number_integer() || value.get<int>() < 0) {
          throw std::runtime_error(
              context + ": cluster ids must be non-negative integers");
        }
        clustering.push_back(value.get<int>());
      }
      video.annotations.rater_clusterings.push_back(std::move(clustering));
    }
    try {
      video.annotations.validate();
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(context + ": " + e.what());
    }
    videos.push_back(std::move(video));
  }
  return videos;
}

void save_annotations(const std::string& path,
                      const std::vector<AnnotatedVideo>& videos) {
  json items = json::array();
  for (const AnnotatedVideo& video : videos) {
    video.annotations.validate();
    json item;
    item["id"] = video.id;
    item["labels"] = json::array();
    for (const auto& rater : video.annotations.rater_labels) {
      json labels = json::array();
      for (Label label : rater) labels.push_back(label_to_string(label));
      item["labels"].push_back(std::move(labels));
    }
    item["clusterings"] = json::array();
    for (const auto& rater : video.annotations.rater_clusterings) {
      item["clusterings"].push_back(rater);
    }
    items.push_back(std::move(item));
  }
  jsonio::write_file(path, json{{"annotations", std::move(items)}});
}

SummaryProblem ProblemRecord::to_problem() const {
  return SummaryProblem(embeddings, quality, div_features, query_embedding, k);
}

std::vector<ProblemRecord> load_problems(const std::string& path) {
  const json doc = jsonio::read_file(path);
  const json items = jsonio::payload(doc, "problems", path);
  std::vector<ProblemRecord> problems;
  for (const auto& item : items) {
    ProblemRecord record;
    record.id = item.value("id", "");
    const std::string context = path + " problem '" + record.id + "'";
    for (const char* field :
         {"embeddings", "quality", "div_features", "query_embedding", "k"}) {
      if (!item.contains(field)) {
        throw std::runtime_error(context + ": missing field '" +
                                 std::string(field) + "'");
      }
    }
    record.embeddings = jsonio::to_matrix(item["embeddings"],
                                          context + " embeddings");
    record.quality = jsonio::to_vector(item["quality"], context + " quality");
    record.div_features =
        jsonio::to_matrix(item["div_features"], context + " div_features");
    record.query_embedding = jsonio::to_vector(item["query_embedding"],
                                               context + " query_embedding");
    if (!item["k"].is_number_integer() || item["k"].get<int>() < 1) {
      throw std::runtime_error(context + ": 'k' must be a positive integer");
    }
    record.k = item["k"].get<int>();
    problems.push_back(std::move(record));
  }
  return problems;
}

void save_problems(const std::string& path,
                   const std::vector<ProblemRecord>& problems) {
  json items = json::array();
  for (const ProblemRecord& record : problems) {
    json item;
    item["id"] = record.id;
    item["embeddings"] = jsonio::from_matrix(record.embeddings);
    item["quality"] = jsonio::from_vector(record.quality);
    item["div_features"] = jsonio::from_matrix(record.div_features);
    item["query_embedding"] = jsonio::from_vector(record.query_embedding);
    item["k"] = record.k;
    items.push_back(std::move(item));
  }
  jsonio::write_file(path, json{{"problems", std::move(items)}});
}

SummaryProblem VideoRecord::to_problem(const EmbeddingModel& model) const {
  const int n = static_cast<int>(features.rows());
  Matrix embeddings(n, model.embed_dim);
  Vector quality(n);
  for (int i = 0; i < n; ++i) {
    const Projection p = project_frame(model, features.row(i).transpose());
    embeddings.row(i) = p.embedding.transpose();
    quality[i] = p.quality;
  }
  const Vector query = encode_query(model, query_words);
  return SummaryProblem(std::move(embeddings), std::move(quality),
                        div_features, query, k);
}

std::vector<VideoRecord> load_videos(const std::string& path) {
  const json doc = jsonio::read_file(path);
  const json items = jsonio::payload(doc, "videos", path);
  std::vector<VideoRecord> videos;
  for (const auto& item : items) {
    VideoRecord record;
    record.id = item.value("id", "");
    const std::string context = path + " video '" + record.id + "'";
    for (const char* field : {"features", "div_features", "query_words", "k"}) {
      if (!item.contains(field)) {
        throw std::runtime_error(context + ": missing field '" +
                                 std::string(field) + "'");
      }
    }
    record.features = jsonio::to_matrix(item["features"],
                                        context + " features");
    record.div_features =
        jsonio::to_matrix(item["div_features"], context + " div_features");
    if (!item["query_words"].is_array() || item["query_words"].empty()) {
      throw std::runtime_error(context +
                               ": 'query_words' must be a non-empty array");
    }
    for (const auto& word : item["query_words"]) {
      record.query_words.push_back(
          jsonio::to_vector(word, context + " query_words"));
    }
    if (!item["k"].is_number_integer() || item["k"].get<int>() < 1) {
      throw std::runtime_error(context + ": 'k' must be a positive integer");
    }
    record.k = item["k"].get<int>();
    videos.push_back(std::move(record));
  }
  return videos;
}

void save_videos(const std::string& path,
                 const std::vector<VideoRecord>& videos) {
  json items = json::array();
  for (const VideoRecord& record : videos) {
    json item;
    item["id"] = record.id;
    item["features"] = jsonio::from_matrix(record.features);
    item["div_features"] = jsonio::from_matrix(record.div_features);
    item["query_words"] = json::array();
    for (const Vector& w : record.query_words) {
      item["query_words"].push_back(jsonio::from_vector(w));
    }
    item["k"] = record.k;
    items.push_back(std::move(item));
  }
  jsonio::write_file(path, json{{"videos", std::move(items)}});
}

std::vector<GroundTruthRecord> load_ground_truth(const std::string& path) {
  const json doc = jsonio::read_file(path);
  const json items = jsonio::payload(doc, "ground_truth", path);
  std::vector<GroundTruthRecord> records;
  for (const auto& item : items) {
    GroundTruthRecord record;
    record.id = item.value("id", "");
    const std::string context = path + " ground truth '" + record.id + "'";
    if (!item.contains("binary_relevance") ||
        !item.contains("prototype_clustering")) {
      throw std::runtime_error(
          context +
          ": expected fields 'binary_relevance' and 'prototype_clustering'");
    }
    for (const auto& value : item["binary_relevance"]) {
      if (!value.is_boolean()) {
        throw std::runtime_error(context +
                                 ": 'binary_relevance' must hold booleans");
      }
      record.ground_truth.binary_relevance.push_back(value.get<bool>());
    }
    for (const auto& value : item["prototype_clustering"]) {
      if (!value.is_number_integer() || value.get<int>() < 0) {
        throw std::runtime_error(
            context + ": cluster ids must be non-negative integers");
      }
      record.ground_truth.prototype_clustering.push_back(value.get<int>());
    }
    if (record.ground_truth.binary_relevance.size() !=
        record.ground_truth.prototype_clustering.size()) {
      throw std::runtime_error(context + ": field lengths differ");
    }
    records.push_back(std::move(record));
  }
  return records;
}

void save_ground_truth(const std::string& path,
                       const std::vector<GroundTruthRecord>& records) {
  json items = json::array();
  for (const GroundTruthRecord& record : records) {
    json item;
    item["id"] = record.id;
    json rel = json::array();
    for (bool b : record.ground_truth.binary_relevance) rel.push_back(b);
    item["binary_relevance"] = std::move(rel);
    item["prototype_clustering"] = record.ground_truth.prototype_clustering;
    items.push_back(std::move(item));
  }
  jsonio::write_file(path, json{{"ground_truth", std::move(items)}});
}

std::vector<SummaryRecord> load_summaries(const std::string& path) {
  const json doc = jsonio::read_file(path);
  const json items = jsonio::payload(doc, "summaries", path);
  std::vector<SummaryRecord> records;
  for (const auto& item : items) {
    SummaryRecord record;
    record.id = item.value("id", "");
    const std::string context = path + " summary '" + record.id + "'";
    for (const char* field : {"selected", "objective_value", "per_objective"}) {
      if (!item.contains(field)) {
        throw std::runtime_error(context + ": missing field '" +
                                 std::string(field) + "'");
      }
    }
    for (const auto& value : item["selected"]) {
      if (!value.is_number_integer() || value.get<int>() < 0) {
        throw std::runtime_error(context +
                                 ": 'selected' must hold non-negative ints");
      }
      record.summary.selected.push_back(value.get<int>());
    }
    record.summary.objective_value =
        jsonio::as_finite(item["objective_value"], context);
    const Vector per = jsonio::to_vector(item["per_objective"],
                                         context + " per_objective");
    if (per.size() != kNumObjectives) {
      throw std::runtime_error(context + ": 'per_objective' must have " +
                               std::to_string(kNumObjectives) + " entries");
    }
    record.summary.per_objective = per;
    records.push_back(std::move(record));
  }
  return records;
}

void save_summaries(const std::string& path,
                    const std::vector<SummaryRecord>& records) {
  json items = json::array();
  for (const SummaryRecord& record : records) {
    json item;
    item["id"] = record.id;
    item["selected"] = record.summary.selected;
    item["objective_value"] = record.summary.objective_value;
    item["per_objective"] = jsonio::from_vector(record.summary.per_objective);
    items.push_back(std::move(item));
  }
  jsonio::write_file(path, json{{"summaries", std::move(items)}});
}

std::vector<RankingRecord> load_rankings(const std::string& path) {
  const json doc = jsonio::read_file(path);
  const json items = jsonio::payload(doc, "rankings", path);
  std::vector<RankingRecord> records;
  for (const auto& item : items) {
    RankingRecord record;
    record.id = item.value("id", "");
    const std::string context = path + " ranking '" + record.id + "'";
    if (!item.contains("ranking") || !item.contains("scores")) {
      throw std::runtime_error(context +
                               ": expected fields 'ranking' and 'scores'");
    }
    if (item["ranking"].size() != item["scores"].size()) {
      throw std::runtime_error(context + ": field lengths differ");
    }
    for (std::size_t i = 0; i < item["ranking"].size(); ++i) {
      if (!item["ranking"][i].is_number_integer() ||
          item["ranking"][i].get<int>() < 0) {
        throw std::runtime_error(context +
                                 ": 'ranking' must hold non-negative ints");
      }
      record.ranking.push_back(
          {item["ranking"][i].get<int>(),
           jsonio::as_finite(item["scores"][i], context + " scores")});
    }
    records.push_back(std::move(record));
  }
  return records;
}

void save_rankings(const std::string& path,
                   const std::vector<RankingRecord>& records) {
  json items = json::array();
  for (const RankingRecord& record : records) {
    json item;
    item["id"] = record.id;
    json ranking = json::array();
    json scores = json::array();
    for (const RankedFrame& frame : record.ranking) {
      ranking.push_back(frame.index);
      scores.push_back(frame.score);
    }
    item["ranking"] = std::move(ranking);
    item["scores"] = std::move(scores);
    items.push_back(std::move(item));
  }
  jsonio::write_file(path, json{{"rankings", std::move(items)}});
}

Vector4 load_weights(const std::string& path) {
  const json doc = jsonio::read_file(path);
  if (!doc.is_object() || !doc.contains("weights")) {
    throw std::runtime_error(path + ": expected an object with 'weights'");
  }
  const Vector w = jsonio::to_vector(doc["weights"], path + " weights");
  if (w.size() != kNumObjectives) {
    throw std::runtime_error(path + ": 'weights' must have " +
                             std::to_string(kNumObjectives) + " entries");
  }
  Vector4 weights = w;
  for (int i = 0; i < kNumObjectives; ++i) {
    if (weights[i] < 0.0) {
      throw std::runtime_error(path + ": weights must be non-negative");
    }
  }
  return weights;
}

void save_weights(const std::string& path, const Vector4& weights) {
  json doc;
  doc["weights"] = json::array();
  for (int i = 0; i < kNumObjectives; ++i) {
    doc["weights"].push_back(weights[i]);
  }
  jsonio::write_file(path, doc);
}

}  // namespace qrsum
