/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#include "qrsum/data.hpp"
#include "qrsum/metrics.hpp"
#include "qrsum/relevance.hpp"
#include "qrsum/summarize.hpp"
#include "qrsum/weightlearn.hpp"

#include "json_util.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using qrsum::jsonio::json;

// ---- Shared helpers -----------------------------------------------------

/// All outputs are written to a temporary file and renamed into place.
void write_atomic(const std::string& path,
                  const std::function<void(const std::string&)>& writer) {
  const std::string tmp = path + ".tmp";
  writer(tmp);
  std::filesystem::rename(tmp, path);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  write_atomic(path, [&](const std::string& tmp) {
    std::ofstream file(tmp, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open for writing: " + tmp);
    file << content;
    if (!file) throw std::runtime_error("write failed: " + tmp);
  });
}

void write_json_atomic(const std::string& path, const json& doc) {
  write_text_atomic(path, doc.dump(2) + "\n");
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

qrsum::LossMode parse_mode(const std::string& mode) {
  if (mode == "expli") return qrsum::LossMode::Explicit;
  if (mode == "impli") return qrsum::LossMode::Implicit;
  if (mode == "noq") return qrsum::LossMode::NoQuality;
  throw std::runtime_error("unknown mode '" + mode +
                           "' (expected expli, impli, or noq)");
}

json mixture_to_json(const qrsum::Vector4& weights) {
  json out = json::array();
  for (int i = 0; i < qrsum::kNumObjectives; ++i) out.push_back(weights[i]);
  return out;
}

/// Table-4-style normalized percentage split of the learned weights.
std::string percentage_line(const qrsum::Vector4& weights) {
  const double total = weights.sum();
  if (total <= 0.0) return "learned weights: all zero";
  static const char* names[] = {"similarity", "quality", "diversity",
                                "representativeness"};
  std::ostringstream out;
  out << "learned weights:";
  for (int i = 0; i < qrsum::kNumObjectives; ++i) {
    const double pct = 100.0 * weights[i] / total;
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %s %.0f%%", names[i], pct);
    out << buf << (i + 1 < qrsum::kNumObjectives ? " |" : "");
  }
  return out.str();
}

// ---- gen-synthetic ------------------------------------------------------

qrsum::SyntheticConfig config_from_json(const json& doc) {
  qrsum::SyntheticConfig cfg;
  if (!doc.is_object()) {
    throw std::runtime_error("synthetic config must be a JSON object");
  }
  std::map<std::string, std::function<void(const json&)>> fields;
  auto int_field = [](int& target) {
    return [&target](const json& v) {
      if (!v.is_number_integer()) throw std::runtime_error("expected integer");
      target = v.get<int>();
    };
  };
  auto real_field = [](double& target) {
    return [&target](const json& v) {
      if (!v.is_number()) throw std::runtime_error("expected number");
      target = v.get<double>();
    };
  };
  fields["n_videos"] = int_field(cfg.n_videos);
  fields["frames_per_video"] = int_field(cfg.frames_per_video);
  fields["n_clusters_min"] = int_field(cfg.n_clusters_min);
  fields["n_clusters_max"] = int_field(cfg.n_clusters_max);
  fields["feature_dim"] = int_field(cfg.feature_dim);
  fields["embed_dim"] = int_field(cfg.embed_dim);
  fields["word_dim"] = int_field(cfg.word_dim);
  fields["div_dim"] = int_field(cfg.div_dim);
  fields["vocab_size"] = int_field(cfg.vocab_size);
  fields["summary_budget"] = int_field(cfg.summary_budget);
  fields["triplets_per_video"] = int_field(cfg.triplets_per_video);
  fields["noise_sigma"] = real_field(cfg.noise_sigma);
  fields["quality_relevance_gain"] = real_field(cfg.quality_relevance_gain);
  fields["relevant_cos_lo"] = real_field(cfg.relevant_cos_lo);
  fields["relevant_cos_hi"] = real_field(cfg.relevant_cos_hi);
  fields["irrelevant_cos_lo"] = real_field(cfg.irrelevant_cos_lo);
  fields["irrelevant_cos_hi"] = real_field(cfg.irrelevant_cos_hi);
  fields["rng_seed"] = [&cfg](const json& v) {
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      throw std::runtime_error("expected integer");
    }
    cfg.rng_seed = v.get<std::uint64_t>();
  };
  for (const auto& [key, value] : doc.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw std::runtime_error("unknown config field '" + key + "'");
    }
    try {
      it->second(value);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("config field '" + key + "': " + e.what());
    }
  }
  return cfg;
}

json config_to_json(const qrsum::SyntheticConfig& cfg) {
  return json{{"n_videos", cfg.n_videos},
              {"frames_per_video", cfg.frames_per_video},
              {"n_clusters_min", cfg.n_clusters_min},
              {"n_clusters_max", cfg.n_clusters_max},
              {"feature_dim", cfg.feature_dim},
              {"embed_dim", cfg.embed_dim},
              {"word_dim", cfg.word_dim},
              {"div_dim", cfg.div_dim},
              {"vocab_size", cfg.vocab_size},
              {"summary_budget", cfg.summary_budget},
              {"triplets_per_video", cfg.triplets_per_video},
              {"noise_sigma", cfg.noise_sigma},
              {"quality_relevance_gain", cfg.quality_relevance_gain},
              {"relevant_cos_lo", cfg.relevant_cos_lo},
              {"relevant_cos_hi", cfg.relevant_cos_hi},
              {"irrelevant_cos_lo", cfg.irrelevant_cos_lo},
              {"irrelevant_cos_hi", cfg.irrelevant_cos_hi},
              {"rng_seed", cfg.rng_seed}};
}

struct GenArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

int run_gen_synthetic(const GenArgs& args) {
  qrsum::SyntheticConfig cfg;
  if (!args.config_path.empty()) {
    cfg = config_from_json(qrsum::jsonio::read_file(args.config_path));
  }
  if (args.seed) cfg.rng_seed = *args.seed;
  cfg.validate();

  const qrsum::SyntheticCorpus corpus = qrsum::gen_synthetic(cfg);
  std::filesystem::create_directories(args.out_dir);
  const auto out = [&](const char* name) {
    return (std::filesystem::path(args.out_dir) / name).string();
  };

  write_atomic(out("triplets.jsonl"), [&](const std::string& p) {
    qrsum::save_triplets(p, corpus.triplets);
  });
  write_atomic(out("planted_model.txt"), [&](const std::string& p) {
    qrsum::save_model(p, corpus.planted_model);
  });

  const json config_header = config_to_json(cfg);
  std::vector<qrsum::AnnotatedVideo> annotated;
  std::vector<qrsum::ProblemRecord> problems;
  std::vector<qrsum::VideoRecord> videos;
  std::vector<qrsum::GroundTruthRecord> ground_truth;
  for (const qrsum::SyntheticVideo& video : corpus.videos) {
    annotated.push_back({video.id, video.annotations});
    const qrsum::SummaryProblem problem =
        qrsum::make_problem(video, corpus.planted_model);
    problems.push_back({video.id, problem.frame_embeddings(),
                        problem.quality(), video.div_features,
                        problem.query_embedding(), video.k});
    videos.push_back(
        {video.id, video.features, video.div_features, video.query_words,
         video.k});
    ground_truth.push_back({video.id,
                            qrsum::merge_annotations(video.annotations)});
  }
  write_atomic(out("annotations.json"), [&](const std::string& p) {
    qrsum::save_annotations(p, annotated);
  });
  write_atomic(out("problems.json"), [&](const std::string& p) {
    qrsum::save_problems(p, problems);
  });
  write_atomic(out("videos.json"), [&](const std::string& p) {
    qrsum::save_videos(p, videos);
  });
  write_atomic(out("ground_truth.json"), [&](const std::string& p) {
    qrsum::save_ground_truth(p, ground_truth);
  });

  json manifest;
  manifest["config"] = config_header;
  manifest["files"] = json::array({"annotations.json", "ground_truth.json",
                                   "planted_model.txt", "problems.json",
                                   "triplets.jsonl", "videos.json"});
  manifest["n_triplets"] = corpus.triplets.size();
  write_json_atomic(out("manifest.json"), manifest);

  std::cout << "wrote synthetic corpus (" << corpus.videos.size()
            << " videos, " << corpus.triplets.size() << " triplets) to "
            << args.out_dir << "\n";
  return 0;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string triplets_path;
  std::string out_path;
  std::string loss_log_path;
  std::string init_path;
  std::string mode = "impli";
  qrsum::TrainConfig config;
  int max_tokens = 14;
};

int run_train(const TrainArgs& args) {
  const qrsum::LossMode mode = parse_mode(args.mode);
  const std::vector<qrsum::Triplet> triplets =
      qrsum::load_triplets(args.triplets_path);
  if (triplets.empty()) {
    throw std::runtime_error(args.triplets_path + ": no triplets to train on");
  }

  qrsum::EmbeddingModel init;
  if (!args.init_path.empty()) {
    init = qrsum::load_model(args.init_path);
  } else {
    const int embed_dim = static_cast<int>(triplets[0].query_words[0].size());
    const int feature_dim = static_cast<int>(triplets[0].pos_feature.size());
    init = qrsum::EmbeddingModel::random_init(feature_dim, embed_dim,
                                              args.config.rng_seed);
  }
  init.encoder.max_tokens = args.max_tokens;

  const qrsum::TrainResult result =
      qrsum::train_relevance(init, triplets, args.config, mode);
  write_atomic(args.out_path, [&](const std::string& p) {
    qrsum::save_model(p, result.model);
  });

  const json config_header = {
      {"mode", args.mode},
      {"triplets", args.triplets_path},
      {"init", args.init_path.empty() ? "random" : args.init_path},
      {"margin", args.config.margin},
      {"huber_delta", args.config.huber_delta},
      {"l2_lambda", args.config.l2_lambda},
      {"epochs", args.config.epochs},
      {"batch_size", args.config.batch_size},
      {"adagrad_base_rate", args.config.adagrad_base_rate},
      {"adagrad_epsilon", args.config.adagrad_epsilon},
      {"rng_seed", args.config.rng_seed},
      {"max_tokens", args.max_tokens},
      {"feature_dim", result.model.feature_dim},
      {"embed_dim", result.model.embed_dim}};
  if (!args.loss_log_path.empty()) {
    std::ostringstream log;
    log << "# config: " << config_header.dump() << "\n";
    log << "epoch,loss\n";
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
      log << e << ',' << format_double(result.loss_history[e]) << '\n';
    }
    write_text_atomic(args.loss_log_path, log.str());
  }

  std::cout << "trained " << args.mode << " model on " << triplets.size()
            << " triplets";
  if (!result.loss_history.empty()) {
    std::cout << ", final epoch loss "
              << format_double(result.loss_history.back());
  }
  std::cout << "; wrote " << args.out_path << "\n";
  return 0;
}

// ---- summarize ------------------------------------------------------------

struct SummarizeArgs {
  std::string problems_path;
  std::string videos_path;
  std::string model_path;
  std::string weights_path;
  std::string out_path;
  std::optional<double> mmr_lambda;
  bool hecate = false;
  bool naive = false;
  int kmeans_iters = 100;
  std::uint64_t seed = 0;
  std::optional<int> k_override;
};

int run_summarize(const SummarizeArgs& args) {
  const int selector_count = (!args.weights_path.empty() ? 1 : 0) +
                             (args.mmr_lambda ? 1 : 0) + (args.hecate ? 1 : 0);
  if (selector_count != 1) {
    throw std::runtime_error(
        "exactly one of --weights, --mmr, --hecate is required");
  }
  if (args.problems_path.empty() ==
      (args.videos_path.empty() || args.model_path.empty())) {
    throw std::runtime_error(
        "provide either --problems or both --model and --videos");
  }

  struct Instance {
    std::string id;
    qrsum::SummaryProblem problem;
  };
  std::vector<Instance> instances;
  auto guard = [&](const std::string& id, auto&& build) {
    try {
      instances.push_back({id, build()});
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("video '" + id + "': " + e.what());
    }
  };
  if (!args.problems_path.empty()) {
    for (qrsum::ProblemRecord& record :
         qrsum::load_problems(args.problems_path)) {
      if (args.k_override) record.k = *args.k_override;
      guard(record.id, [&] { return record.to_problem(); });
    }
  } else {
    const qrsum::EmbeddingModel model = qrsum::load_model(args.model_path);
    for (qrsum::VideoRecord& record : qrsum::load_videos(args.videos_path)) {
      if (args.k_override) record.k = *args.k_override;
      guard(record.id, [&] { return record.to_problem(model); });
    }
  }

  json selector;
  qrsum::Mixture mixture;
  if (!args.weights_path.empty()) {
    mixture.weights = qrsum::load_weights(args.weights_path);
    selector = {{"kind", "weights"},
                {"weights", mixture_to_json(mixture.weights)}};
  } else if (args.mmr_lambda) {
    selector = {{"kind", "mmr"}, {"lambda", *args.mmr_lambda}};
  } else {
    selector = {{"kind", "hecate"},
                {"kmeans_iters", args.kmeans_iters},
                {"rng_seed", args.seed}};
  }

  std::vector<qrsum::SummaryRecord> records;
  for (const Instance& instance : instances) {
    qrsum::Summary summary;
    if (!args.weights_path.empty()) {
      summary = args.naive ? qrsum::greedy_select(mixture, instance.problem)
                           : qrsum::lazy_greedy_select(mixture, instance.problem);
    } else if (args.mmr_lambda) {
      summary = qrsum::mmr_select(instance.problem, *args.mmr_lambda);
    } else {
      summary = qrsum::hecate_select(instance.problem, args.kmeans_iters,
                                     args.seed);
    }
    records.push_back({instance.id, std::move(summary)});
  }

  json doc;
  doc["config"] = {{"selector", selector},
                   {"algorithm", args.naive ? "naive" : "lazy"},
                   {"problems", args.problems_path},
                   {"videos", args.videos_path},
                   {"model", args.model_path}};
  if (args.k_override) doc["config"]["k"] = *args.k_override;
  json items = json::array();
  for (const qrsum::SummaryRecord& record : records) {
    json item;
    item["id"] = record.id;
    item["selected"] = record.summary.selected;
    item["objective_value"] = record.summary.objective_value;
    item["per_objective"] = json::array();
    for (int i = 0; i < qrsum::kNumObjectives; ++i) {
      item["per_objective"].push_back(record.summary.per_objective[i]);
    }
    items.push_back(std::move(item));
  }
  doc["summaries"] = std::move(items);
  write_json_atomic(args.out_path, doc);
  std::cout << "summarized " << records.size() << " videos; wrote "
            << args.out_path << "\n";
  return 0;
}

// ---- learn-weights ---------------------------------------------------------

struct LearnArgs {
  std::string problems_path;
  std::string annotations_path;
  std::string ground_truth_path;
  std::string out_path;
  std::string f1_log_path;
  std::string init_weights;
  qrsum::WeightLearnConfig config;
};

std::map<std::string, qrsum::GroundTruth> load_gt_by_id(
    const std::string& annotations_path, const std::string& ground_truth_path) {
  std::map<std::string, qrsum::GroundTruth> by_id;
  if (!annotations_path.empty()) {
    for (const qrsum::AnnotatedVideo& video :
         qrsum::load_annotations(annotations_path)) {
      by_id[video.id] = qrsum::merge_annotations(video.annotations);
    }
  } else {
    for (const qrsum::GroundTruthRecord& record :
         qrsum::load_ground_truth(ground_truth_path)) {
      by_id[record.id] = record.ground_truth;
    }
  }
  return by_id;
}

int run_learn_weights(const LearnArgs& args) {
  if (args.annotations_path.empty() == args.ground_truth_path.empty()) {
    throw std::runtime_error(
        "provide exactly one of --annotations or --ground-truth");
  }
  qrsum::WeightLearnConfig config = args.config;
  if (!args.init_weights.empty()) {
    std::istringstream in(args.init_weights);
    std::string token;
    for (int i = 0; i < qrsum::kNumObjectives; ++i) {
      if (!std::getline(in, token, ',')) {
        throw std::runtime_error("--init expects 4 comma-separated weights");
      }
      config.init_weights[i] = std::stod(token);
    }
    if (std::getline(in, token, ',')) {
      throw std::runtime_error("--init expects 4 comma-separated weights");
    }
  }

  const auto gt_by_id =
      load_gt_by_id(args.annotations_path, args.ground_truth_path);
  std::vector<qrsum::TrainingPair> pairs;
  for (const qrsum::ProblemRecord& record :
       qrsum::load_problems(args.problems_path)) {
    const auto it = gt_by_id.find(record.id);
    if (it == gt_by_id.end()) {
      throw std::runtime_error("no ground truth for video '" + record.id +
                               "'");
    }
    pairs.push_back({record.to_problem(), it->second});
  }

  const qrsum::WeightLearnResult result = qrsum::learn_weights(pairs, config);

  const json config_header = {
      {"problems", args.problems_path},
      {"annotations", args.annotations_path},
      {"ground_truth", args.ground_truth_path},
      {"epochs", config.epochs},
      {"adagrad_base_rate", config.adagrad_base_rate},
      {"adagrad_epsilon", config.adagrad_epsilon},
      {"init_weights", mixture_to_json(config.init_weights)},
      {"rng_seed", config.rng_seed}};
  json doc;
  doc["weights"] = mixture_to_json(result.mixture.weights);
  doc["config"] = config_header;
  doc["skipped_pairs"] = result.skipped_pairs;
  write_json_atomic(args.out_path, doc);

  if (!args.f1_log_path.empty()) {
    std::ostringstream log;
    log << "# config: " << config_header.dump() << "\n";
    log << "epoch,f1\n";
    for (std::size_t e = 0; e < result.f1_history.size(); ++e) {
      log << e << ',' << format_double(result.f1_history[e]) << '\n';
    }
    write_text_atomic(args.f1_log_path, log.str());
  }

  std::cout << percentage_line(result.mixture.weights) << "\n";
  std::cout << "wrote " << args.out_path << "\n";
  return 0;
}

// ---- evaluate ---------------------------------------------------------------

struct EvalArgs {
  std::string annotations_path;
  std::string summaries_path;
  std::string rankings_path;
  std::string model_path;
  std::string videos_path;
  std::string mode = "impli";
  std::string format = "table";
  std::string out_path;
};

struct VideoEval {
  std::string id;
  std::optional<int> hit_vg;
  std::optional<int> hit_vg_or_g;
  std::optional<double> rho;
  std::optional<double> ap;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

json optional_to_json(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

int run_evaluate(const EvalArgs& args) {
  const bool has_model_rankings =
      !args.model_path.empty() && !args.videos_path.empty();
  if (!args.rankings_path.empty() && has_model_rankings) {
    throw std::runtime_error(
        "provide either --rankings or --model/--videos, not both");
  }
  if (args.summaries_path.empty() && args.rankings_path.empty() &&
      !has_model_rankings) {
    throw std::runtime_error(
        "nothing to evaluate: provide --summaries, --rankings, or "
        "--model and --videos");
  }
  if (args.format != "table" && args.format != "json") {
    throw std::runtime_error("unknown format '" + args.format + "'");
  }

  struct VideoGt {
    qrsum::GroundTruth gt;
    qrsum::RelevanceLabels consensus;
    std::vector<double> mean_scores;
  };
  std::map<std::string, VideoGt> gt_by_id;
  std::vector<std::string> video_order;
  for (const qrsum::AnnotatedVideo& video :
       qrsum::load_annotations(args.annotations_path)) {
    VideoGt entry;
    entry.gt = qrsum::merge_annotations(video.annotations);
    entry.consensus = qrsum::consensus_labels(video.annotations);
    const int n = video.annotations.frame_count();
    entry.mean_scores.assign(n, 0.0);
    for (int f = 0; f < n; ++f) {
      double sum = 0.0;
      for (const auto& labels : video.annotations.rater_labels) {
        sum += qrsum::map_label(labels[f]);
      }
      entry.mean_scores[f] = sum / 5.0;
    }
    gt_by_id[video.id] = std::move(entry);
    video_order.push_back(video.id);
  }

  // Rankings: either precomputed or derived from a model over raw videos.
  std::map<std::string, std::vector<qrsum::RankedFrame>> rankings;
  if (!args.rankings_path.empty()) {
    for (const qrsum::RankingRecord& record :
         qrsum::load_rankings(args.rankings_path)) {
      rankings[record.id] = record.ranking;
    }
  } else if (has_model_rankings) {
    const qrsum::EmbeddingModel model = qrsum::load_model(args.model_path);
    const qrsum::LossMode mode = parse_mode(args.mode);
    for (const qrsum::VideoRecord& record :
         qrsum::load_videos(args.videos_path)) {
      std::vector<qrsum::Vector> features(record.features.rows());
      for (int i = 0; i < record.features.rows(); ++i) {
        features[i] = record.features.row(i).transpose();
      }
      rankings[record.id] =
          qrsum::rank_frames(model, record.query_words, features, mode);
    }
  }

  std::map<std::string, qrsum::SummaryRecord> summaries;
  if (!args.summaries_path.empty()) {
    for (const qrsum::SummaryRecord& record :
         qrsum::load_summaries(args.summaries_path)) {
      summaries[record.id] = record;
    }
  }

  std::vector<VideoEval> evals;
  int excluded_no_positive = 0;
  int excluded_constant = 0;
  for (const std::string& id : video_order) {
    const VideoGt& entry = gt_by_id[id];
    VideoEval eval;
    eval.id = id;
    const bool any_positive =
        std::find(entry.gt.binary_relevance.begin(),
                  entry.gt.binary_relevance.end(),
                  true) != entry.gt.binary_relevance.end();

    const auto rank_it = rankings.find(id);
    if (rank_it != rankings.end()) {
      const std::vector<qrsum::RankedFrame>& ranking = rank_it->second;
      const int n = static_cast<int>(entry.consensus.size());
      if (static_cast<int>(ranking.size()) != n) {
        throw std::runtime_error("ranking for video '" + id +
                                 "' does not cover all frames");
      }
      std::vector<int> order(ranking.size());
      std::vector<double> scores(n, 0.0);
      for (std::size_t i = 0; i < ranking.size(); ++i) {
        const int frame = ranking[i].index;
        if (frame < 0 || frame >= n) {
          throw std::runtime_error("ranking for video '" + id +
                                   "' has an out-of-range frame index");
        }
        order[i] = frame;
        scores[frame] = ranking[i].score;
      }
      eval.hit_vg = qrsum::hit_at_1(order, entry.consensus,
                                    {qrsum::Label::VeryGood});
      eval.hit_vg_or_g = qrsum::hit_at_1(
          order, entry.consensus,
          {qrsum::Label::VeryGood, qrsum::Label::Good});
      bool scores_constant = true, gt_constant = true;
      for (int f = 1; f < n; ++f) {
        scores_constant &= scores[f] == scores[0];
        gt_constant &= entry.mean_scores[f] == entry.mean_scores[0];
      }
      if (n >= 2 && !scores_constant && !gt_constant) {
        eval.rho = qrsum::spearman(scores, entry.mean_scores);
      } else {
        ++excluded_constant;
      }
      if (any_positive) {
        eval.ap = qrsum::average_precision(scores, entry.gt.binary_relevance);
      }
    }

    const auto summary_it = summaries.find(id);
    if (summary_it != summaries.end()) {
      const std::vector<int>& selected = summary_it->second.summary.selected;
      if (any_positive) {
        eval.precision =
            qrsum::summary_precision(selected, entry.gt.binary_relevance);
        eval.recall = qrsum::cluster_recall(selected, entry.gt.binary_relevance,
                                            entry.gt.prototype_clustering);
        eval.f1 = qrsum::f1(*eval.precision, *eval.recall);
      }
    }
    if (!any_positive &&
        (rank_it != rankings.end() || summary_it != summaries.end())) {
      ++excluded_no_positive;
      std::cerr << "qrsum: warning: video '" << id
                << "' has no positive frames; excluded from mAP/F1\n";
    }
    evals.push_back(std::move(eval));
  }

  struct Mean {
    double sum = 0.0;
    int count = 0;
    void add(const std::optional<double>& v) {
      if (v) {
        sum += *v;
        ++count;
      }
    }
    void add(const std::optional<int>& v) {
      if (v) {
        sum += *v;
        ++count;
      }
    }
    std::optional<double> value() const {
      if (count == 0) return std::nullopt;
      return sum / count;
    }
  };
  Mean hit_vg, hit_vg_or_g, rho, ap, precision, recall, f1;
  for (const VideoEval& e : evals) {
    hit_vg.add(e.hit_vg);
    hit_vg_or_g.add(e.hit_vg_or_g);
    rho.add(e.rho);
    ap.add(e.ap);
    precision.add(e.precision);
    recall.add(e.recall);
    f1.add(e.f1);
  }

  const json config_header = {{"annotations", args.annotations_path},
                              {"summaries", args.summaries_path},
                              {"rankings", args.rankings_path},
                              {"model", args.model_path},
                              {"videos", args.videos_path},
                              {"mode", args.mode}};
  json doc;
  doc["config"] = config_header;
  doc["per_video"] = json::array();
  for (const VideoEval& e : evals) {
    json item;
    item["id"] = e.id;
    item["hit_at_1_vg"] = e.hit_vg ? json(*e.hit_vg) : json(nullptr);
    item["hit_at_1_vg_or_g"] =
        e.hit_vg_or_g ? json(*e.hit_vg_or_g) : json(nullptr);
    item["spearman"] = optional_to_json(e.rho);
    item["ap"] = optional_to_json(e.ap);
    item["precision"] = optional_to_json(e.precision);
    item["cluster_recall"] = optional_to_json(e.recall);
    item["f1"] = optional_to_json(e.f1);
    doc["per_video"].push_back(std::move(item));
  }
  doc["corpus"] = {{"hit_at_1_vg", optional_to_json(hit_vg.value())},
                   {"hit_at_1_vg_or_g", optional_to_json(hit_vg_or_g.value())},
                   {"spearman", optional_to_json(rho.value())},
                   {"map", optional_to_json(ap.value())},
                   {"precision", optional_to_json(precision.value())},
                   {"cluster_recall", optional_to_json(recall.value())},
                   {"f1", optional_to_json(f1.value())},
                   {"excluded_no_positive", excluded_no_positive},
                   {"excluded_constant", excluded_constant}};

  std::string rendered;
  if (args.format == "json") {
    rendered = doc.dump(2) + "\n";
  } else {
    std::ostringstream out;
    out << "# qrsum evaluation report\n";
    out << "# config: " << config_header.dump() << "\n";
    auto cell = [](const std::optional<double>& v) {
      return v ? format_fixed(*v) : std::string("-");
    };
    auto int_cell = [](const std::optional<int>& v) {
      return v ? std::to_string(*v) : std::string("-");
    };
    char line[256];
    out << "video        HIT@1(VG)  HIT@1(VG|G)  rho        mAP        "
           "PR         CR         F1\n";
    for (const VideoEval& e : evals) {
      std::snprintf(line, sizeof(line),
                    "%-12s %-10s %-12s %-10s %-10s %-10s %-10s %-10s\n",
                    e.id.c_str(), int_cell(e.hit_vg).c_str(),
                    int_cell(e.hit_vg_or_g).c_str(), cell(e.rho).c_str(),
                    cell(e.ap).c_str(), cell(e.precision).c_str(),
                    cell(e.recall).c_str(), cell(e.f1).c_str());
      out << line;
    }
    std::snprintf(line, sizeof(line),
                  "%-12s %-10s %-12s %-10s %-10s %-10s %-10s %-10s\n", "corpus",
                  cell(hit_vg.value()).c_str(),
                  cell(hit_vg_or_g.value()).c_str(), cell(rho.value()).c_str(),
                  cell(ap.value()).c_str(), cell(precision.value()).c_str(),
                  cell(recall.value()).c_str(), cell(f1.value()).c_str());
    out << line;
    out << "excluded: " << excluded_no_positive << " video(s) without "
        << "positives, " << excluded_constant
        << " constant-score ranking(s)\n";
    rendered = out.str();
  }

  if (args.out_path.empty()) {
    std::cout << rendered;
  } else {
    write_text_atomic(args.out_path, rendered);
    std::cout << "wrote " << args.out_path << "\n";
  }
  return 0;
}

// ---- consistency -------------------------------------------------------------

struct ConsistencyArgs {
  std::string annotations_path;
  std::string format = "table";
  std::string out_path;
};

int run_consistency(const ConsistencyArgs& args) {
  if (args.format != "table" && args.format != "json") {
    throw std::runtime_error("unknown format '" + args.format + "'");
  }
  const std::vector<qrsum::AnnotatedVideo> videos =
      qrsum::load_annotations(args.annotations_path);
  if (videos.empty()) {
    throw std::runtime_error(args.annotations_path + ": no videos");
  }

  struct Row {
    std::string id;
    std::optional<double> rho;
    int splits_used = 0;
    int splits_skipped = 0;
    double mean_nmi = 0.0;
    int prototype_index = 0;
  };
  std::vector<Row> rows;
  double rho_sum = 0.0;
  int rho_count = 0;
  double nmi_sum = 0.0;
  for (const qrsum::AnnotatedVideo& video : videos) {
    Row row;
    row.id = video.id;
    std::vector<std::vector<double>> scores(5);
    for (int r = 0; r < 5; ++r) {
      for (qrsum::Label label : video.annotations.rater_labels[r]) {
        scores[r].push_back(qrsum::map_label(label));
      }
    }
    try {
      const qrsum::SplitHalfResult split =
          qrsum::split_half_consistency(scores);
      row.rho = split.rho_mean;
      row.splits_used = split.splits_used;
      row.splits_skipped = split.splits_skipped;
      rho_sum += split.rho_mean;
      ++rho_count;
    } catch (const std::invalid_argument&) {
      row.splits_skipped = 10;
      std::cerr << "qrsum: warning: video '" << video.id
                << "' has degenerate annotations; split-half skipped\n";
    }
    const qrsum::ClusteringConsistency cc =
        qrsum::clustering_consistency(video.annotations.rater_clusterings);
    row.mean_nmi = cc.mean_nmi;
    row.prototype_index = cc.prototype_index;
    nmi_sum += cc.mean_nmi;
    rows.push_back(std::move(row));
  }
  const std::optional<double> corpus_rho =
      rho_count > 0 ? std::optional<double>(rho_sum / rho_count)
                    : std::nullopt;
  const double corpus_nmi = nmi_sum / static_cast<double>(rows.size());

  const json config_header = {{"annotations", args.annotations_path}};
  json doc;
  doc["config"] = config_header;
  doc["per_video"] = json::array();
  for (const Row& row : rows) {
    doc["per_video"].push_back(
        {{"id", row.id},
         {"rho_mean", optional_to_json(row.rho)},
         {"splits_used", row.splits_used},
         {"splits_skipped", row.splits_skipped},
         {"mean_pairwise_nmi", row.mean_nmi},
         {"prototype_index", row.prototype_index}});
  }
  doc["corpus"] = {{"split_half_rho", optional_to_json(corpus_rho)},
                   {"mean_pairwise_nmi", corpus_nmi},
                   {"videos", rows.size()}};

  std::string rendered;
  if (args.format == "json") {
    rendered = doc.dump(2) + "\n";
  } else {
    std::ostringstream out;
    out << "# qrsum consistency report\n";
    out << "# config: " << config_header.dump() << "\n";
    char line[256];
    out << "video        rho_mean   splits(used/skipped)  mean_NMI   "
           "prototype\n";
    for (const Row& row : rows) {
      std::snprintf(line, sizeof(line), "%-12s %-10s %2d/%-17d  %-10s %d\n",
                    row.id.c_str(),
                    row.rho ? format_fixed(*row.rho).c_str() : "-",
                    row.splits_used, row.splits_skipped,
                    format_fixed(row.mean_nmi).c_str(), row.prototype_index);
      out << line;
    }
    out << "corpus split-half rho: "
        << (corpus_rho ? format_fixed(*corpus_rho) : "-") << "\n";
    out << "corpus clustering consistency (mean pairwise NMI): "
        << format_fixed(corpus_nmi) << "\n";
    rendered = out.str();
  }

  if (args.out_path.empty()) {
    std::cout << rendered;
  } else {
    write_text_atomic(args.out_path, rendered);
    std::cout << "wrote " << args.out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query-relevant video summarization toolkit"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "gen-synthetic", "generate a planted synthetic corpus");
  gen->add_option("--config", gen_args.config_path,
                  "JSON file with synthetic-config fields");
  gen->add_option("--out-dir", gen_args.out_dir, "output directory")
      ->required();
  std::uint64_t gen_seed = 0;
  CLI::Option* gen_seed_opt =
      gen->add_option("--seed", gen_seed, "override the config rng_seed");

  TrainArgs train_args;
  CLI::App* train =
      app.add_subcommand("train", "train the relevance projection");
  train->add_option("--triplets", train_args.triplets_path,
                    "JSON-lines triplet file")
      ->required();
  train->add_option("--out", train_args.out_path, "output model file")
      ->required();
  train->add_option("--mode", train_args.mode,
                    "loss mode: expli, impli, or noq");
  train->add_option("--loss-log", train_args.loss_log_path,
                    "per-epoch loss CSV");
  train->add_option("--init", train_args.init_path,
                    "initial model (default: seeded random init)");
  train->add_option("--margin", train_args.config.margin, "ranking margin");
  train->add_option("--huber-delta", train_args.config.huber_delta,
                    "Huber loss delta");
  train->add_option("--l2-lambda", train_args.config.l2_lambda,
                    "l2 penalty on the projection matrix");
  train->add_option("--epochs", train_args.config.epochs, "training epochs");
  train->add_option("--batch-size", train_args.config.batch_size,
                    "minibatch size");
  train->add_option("--rate", train_args.config.adagrad_base_rate,
                    "AdaGrad base rate");
  train->add_option("--epsilon", train_args.config.adagrad_epsilon,
                    "AdaGrad epsilon");
  train->add_option("--seed", train_args.config.rng_seed, "rng seed");
  train->add_option("--max-tokens", train_args.max_tokens,
                    "query truncation length");

  SummarizeArgs sum_args;
  CLI::App* summarize =
      app.add_subcommand("summarize", "select summary frames per video");
  summarize->add_option("--problems", sum_args.problems_path,
                        "problems JSON file");
  summarize->add_option("--videos", sum_args.videos_path,
                        "raw videos JSON file (requires --model)");
  summarize->add_option("--model", sum_args.model_path, "trained model file");
  summarize->add_option("--weights", sum_args.weights_path,
                        "mixture weights JSON file");
  double mmr_lambda = 0.0;
  CLI::Option* mmr_opt = summarize->add_option(
      "--mmr", mmr_lambda, "MMR baseline with the given similarity weight");
  summarize->add_flag("--hecate", sum_args.hecate,
                      "clustering + quality baseline");
  summarize->add_flag("--naive", sum_args.naive,
                      "use naive instead of lazy greedy");
  summarize->add_option("--kmeans-iters", sum_args.kmeans_iters,
                        "k-means iteration cap for --hecate");
  summarize->add_option("--seed", sum_args.seed, "rng seed for --hecate");
  int k_override = 0;
  CLI::Option* k_opt =
      summarize->add_option("--k", k_override, "override the per-video budget");
  summarize->add_option("--out", sum_args.out_path, "output summaries file")
      ->required();

  LearnArgs learn_args;
  CLI::App* learn =
      app.add_subcommand("learn-weights", "learn the mixture weights");
  learn->add_option("--problems", learn_args.problems_path,
                    "problems JSON file")
      ->required();
  learn->add_option("--annotations", learn_args.annotations_path,
                    "5-rater annotations JSON (merged into ground truth)");
  learn->add_option("--ground-truth", learn_args.ground_truth_path,
                    "pre-merged ground truth JSON");
  learn->add_option("--out", learn_args.out_path, "output weights file")
      ->required();
  learn->add_option("--f1-log", learn_args.f1_log_path, "per-epoch F1 CSV");
  learn->add_option("--epochs", learn_args.config.epochs, "training epochs");
  learn->add_option("--rate", learn_args.config.adagrad_base_rate,
                    "AdaGrad base rate");
  learn->add_option("--epsilon", learn_args.config.adagrad_epsilon,
                    "AdaGrad epsilon");
  learn->add_option("--seed", learn_args.config.rng_seed, "rng seed");
  learn->add_option("--init", learn_args.init_weights,
                    "initial weights, comma-separated (default 0.25 each)");

  EvalArgs eval_args;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score rankings and summaries");
  evaluate->add_option("--annotations", eval_args.annotations_path,
                       "5-rater annotations JSON")
      ->required();
  evaluate->add_option("--summaries", eval_args.summaries_path,
                       "summaries JSON file");
  evaluate->add_option("--rankings", eval_args.rankings_path,
                       "precomputed rankings JSON file");
  evaluate->add_option("--model", eval_args.model_path,
                       "model file (rank videos on the fly)");
  evaluate->add_option("--videos", eval_args.videos_path,
                       "raw videos JSON file (requires --model)");
  evaluate->add_option("--mode", eval_args.mode,
                       "ranking mode: expli, impli, or noq");
  evaluate->add_option("--format", eval_args.format, "report format: table | json");
  evaluate->add_option("--out", eval_args.out_path,
                       "output path (default: stdout)");

  ConsistencyArgs cons_args;
  CLI::App* consistency = app.add_subcommand(
      "consistency", "inter-rater consistency of annotations");
  consistency->add_option("--annotations", cons_args.annotations_path,
                          "5-rater annotations JSON")
      ->required();
  consistency->add_option("--format", cons_args.format,
                          "report format: table | json");
  consistency->add_option("--out", cons_args.out_path,
                          "output path (default: stdout)");

  try {
    app.parse(argc, argv);
    if (*gen_seed_opt) gen_args.seed = gen_seed;
    if (*mmr_opt) sum_args.mmr_lambda = mmr_lambda;
    if (*k_opt) sum_args.k_override = k_override;
    if (gen->parsed()) return run_gen_synthetic(gen_args);
    if (train->parsed()) return run_train(train_args);
    if (summarize->parsed()) return run_summarize(sum_args);
    if (learn->parsed()) return run_learn_weights(learn_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (consistency->parsed()) return run_consistency(cons_args);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends print to stdout, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "qrsum error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "qrsum error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
