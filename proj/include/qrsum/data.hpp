/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#pragma once

#include "qrsum/common.hpp"
#include "qrsum/metrics.hpp"
#include "qrsum/relevance.hpp"
#include "qrsum/summarize.hpp"

#include <string>
#include <vector>

namespace qrsum {

/// Five raters' relevance labels and frame clusterings for one video.
struct AnnotationSet {
  std::vector<RelevanceLabels> rater_labels;  // 5 x n
  std::vector<Clustering> rater_clusterings;  // 5 x n

  void validate() const;
  int frame_count() const;
};

struct AnnotatedVideo {
  std::string id;
  AnnotationSet annotations;
};

/// Merged multi-rater ground truth for one video.
struct GroundTruth {
  std::vector<bool> binary_relevance;
  Clustering prototype_clustering;
};

Label label_from_string(const std::string& s);
std::string label_to_string(Label label);

/// VeryGood -> 1.0, Good -> 0.5, NotGood -> 0.0, Trash -> 0.0.
double map_label(Label label);

/// Positive iff the mean mapped label over the 5 raters is >= 0.5.
std::vector<bool> merge_relevance(
    const std::vector<RelevanceLabels>& rater_labels);

/// The rater clustering with the highest mean NMI to the others
/// (ties: lowest rater index).
Clustering merge_clusterings(const std::vector<Clustering>& rater_clusterings);

GroundTruth merge_annotations(const AnnotationSet& annotations);

/// Per-frame consensus label from the mean mapped rater score:
/// >= 0.75 VeryGood, >= 0.5 Good, >= 0.25 NotGood, else Trash.
/// The Good boundary coincides with the merge_relevance positive rule.
RelevanceLabels consensus_labels(const AnnotationSet& annotations);

/// Balanced triplets pairing a uniform positive with a uniform negative
/// frame of the same video; deterministic given the seed.
std::vector<Triplet> sample_triplets(const GroundTruth& gt,
                                     const std::vector<Vector>& frame_features,
                                     const std::vector<Vector>& query_words,
                                     int per_video, std::uint64_t rng_seed);

struct SyntheticConfig {
  int n_videos = 60;
  int frames_per_video = 40;
  int n_clusters_min = 3;
  int n_clusters_max = 6;
  int feature_dim = 32;
  int embed_dim = 8;
  int word_dim = 8;  // must equal embed_dim for the MeanPool encoder
  int div_dim = 4;
  int vocab_size = 200;
  int summary_budget = 5;
  int triplets_per_video = 70;
  double noise_sigma = 0.05;
  /// Separation of planted quality between relevant and irrelevant frames.
  double quality_relevance_gain = 1.5;
  /// Cosine band of relevant cluster centers to the query embedding; the
  /// irrelevant band is below; relevance threshold is cosine >= 0.5.
  double relevant_cos_lo = 0.75;
  double relevant_cos_hi = 0.95;
  double irrelevant_cos_lo = -0.5;
  double irrelevant_cos_hi = 0.25;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct SyntheticVideo {
  std::string id;
  Matrix features;       // n x F raw frame features
  Matrix div_features;   // n x div_dim
  Vector planted_quality;
  std::vector<Vector> query_words;
  std::vector<bool> planted_relevance;  // cosine(planted embedding, query) >= 0.5
  Clustering planted_clustering;
  AnnotationSet annotations;  // noisy 5-rater copies of the planted truth
  int k = 0;
};

struct SyntheticCorpus {
  std::vector<SyntheticVideo> videos;
  std::vector<Triplet> triplets;
  EmbeddingModel planted_model;
};

/// Plants a projection and per-video cluster structure, then emits noisy
/// features, annotations, and balanced triplets. Deterministic per seed;
/// per-video substreams make generation order-independent.
SyntheticCorpus gen_synthetic(const SyntheticConfig& config);

/// Builds a SummaryProblem by projecting the video's features and encoding
/// its query with the given model.
SummaryProblem make_problem(const SyntheticVideo& video,
                            const EmbeddingModel& model);

// ---- File formats (JSON / JSON-lines) ----------------------------------

struct ProblemRecord {
  std::string id;
  Matrix embeddings;
  Vector quality;
  Matrix div_features;
  Vector query_embedding;
  int k = 0;

  SummaryProblem to_problem() const;
};

struct VideoRecord {
  std::string id;
  Matrix features;
  Matrix div_features;
  std::vector<Vector> query_words;
  int k = 0;

  /// Projects the features and encodes the query with `model`.
  SummaryProblem to_problem(const EmbeddingModel& model) const;
};

struct GroundTruthRecord {
  std::string id;
  GroundTruth ground_truth;
};

struct SummaryRecord {
  std::string id;
  Summary summary;
};

struct RankingRecord {
  std::string id;
  std::vector<RankedFrame> ranking;
};

std::vector<Triplet> load_triplets(const std::string& path);
void save_triplets(const std::string& path,
                   const std::vector<Triplet>& triplets);

std::vector<AnnotatedVideo> load_annotations(const std::string& path);
void save_annotations(const std::string& path,
                      const std::vector<AnnotatedVideo>& videos);

std::vector<ProblemRecord> load_problems(const std::string& path);
void save_problems(const std::string& path,
                   const std::vector<ProblemRecord>& problems);

std::vector<VideoRecord> load_videos(const std::string& path);
void save_videos(const std::string& path,
                 const std::vector<VideoRecord>& videos);

std::vector<GroundTruthRecord> load_ground_truth(const std::string& path);
void save_ground_truth(const std::string& path,
                       const std::vector<GroundTruthRecord>& records);

std::vector<SummaryRecord> load_summaries(const std::string& path);
void save_summaries(const std::string& path,
                    const std::vector<SummaryRecord>& records);

std::vector<RankingRecord> load_rankings(const std::string& path);
void save_rankings(const std::string& path,
                   const std::vector<RankingRecord>& records);

Vector4 load_weights(const std::string& path);
void save_weights(const std::string& path, const Vector4& weights);

}  // namespace qrsum
