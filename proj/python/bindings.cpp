/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrsum/data.hpp"
#include "qrsum/metrics.hpp"
#include "qrsum/relevance.hpp"
#include "qrsum/summarize.hpp"
#include "qrsum/weightlearn.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_qrsum, m) {
  m.doc() = "query-relevant video summarization core";

  // ---- relevance ---------------------------------------------------------
  py::enum_<qrsum::LossMode>(m, "LossMode")
      .value("Explicit", qrsum::LossMode::Explicit)
      .value("Implicit", qrsum::LossMode::Implicit)
      .value("NoQuality", qrsum::LossMode::NoQuality);

  py::class_<qrsum::EmbeddingModel>(m, "EmbeddingModel")
      .def(py::init<>())
      .def_readwrite("weight", &qrsum::EmbeddingModel::weight)
      .def_readwrite("bias", &qrsum::EmbeddingModel::bias)
      .def_readwrite("feature_dim", &qrsum::EmbeddingModel::feature_dim)
      .def_readwrite("embed_dim", &qrsum::EmbeddingModel::embed_dim)
      .def_static("zero", &qrsum::EmbeddingModel::zero, py::arg("feature_dim"),
                  py::arg("embed_dim"))
      .def_static("random_init", &qrsum::EmbeddingModel::random_init,
                  py::arg("feature_dim"), py::arg("embed_dim"),
                  py::arg("seed"));

  py::class_<qrsum::Triplet>(m, "Triplet")
      .def(py::init([](std::vector<qrsum::Vector> query_words,
                       qrsum::Vector pos, qrsum::Vector neg) {
             return qrsum::Triplet{std::move(query_words), std::move(pos),
                                   std::move(neg)};
           }),
           py::arg("query_words"), py::arg("pos_feature"),
           py::arg("neg_feature"))
      .def_readwrite("query_words", &qrsum::Triplet::query_words)
      .def_readwrite("pos_feature", &qrsum::Triplet::pos_feature)
      .def_readwrite("neg_feature", &qrsum::Triplet::neg_feature);

  py::class_<qrsum::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("margin", &qrsum::TrainConfig::margin)
      .def_readwrite("huber_delta", &qrsum::TrainConfig::huber_delta)
      .def_readwrite("l2_lambda", &qrsum::TrainConfig::l2_lambda)
      .def_readwrite("epochs", &qrsum::TrainConfig::epochs)
      .def_readwrite("batch_size", &qrsum::TrainConfig::batch_size)
      .def_readwrite("adagrad_base_rate",
                     &qrsum::TrainConfig::adagrad_base_rate)
      .def_readwrite("adagrad_epsilon", &qrsum::TrainConfig::adagrad_epsilon)
      .def_readwrite("rng_seed", &qrsum::TrainConfig::rng_seed);

  py::class_<qrsum::TrainResult>(m, "TrainResult")
      .def_readonly("model", &qrsum::TrainResult::model)
      .def_readonly("loss_history", &qrsum::TrainResult::loss_history);

  py::class_<qrsum::RankedFrame>(m, "RankedFrame")
      .def_readonly("index", &qrsum::RankedFrame::index)
      .def_readonly("score", &qrsum::RankedFrame::score)
      .def("__repr__", [](const qrsum::RankedFrame& f) {
        return "RankedFrame(index=" + std::to_string(f.index) +
               ", score=" + std::to_string(f.score) + ")";
      });

  m.def("cosine_similarity", &qrsum::cosine_similarity, py::arg("a"),
        py::arg("b"));
  m.def("huber", &qrsum::huber, py::arg("x"), py::arg("delta"));
  m.def("encode_query", &qrsum::encode_query, py::arg("model"),
        py::arg("query_words"));
  m.def(
      "project_frame",
      [](const qrsum::EmbeddingModel& model, const qrsum::Vector& feature) {
        const qrsum::Projection p = qrsum::project_frame(model, feature);
        return py::make_tuple(p.embedding, p.quality);
      },
      py::arg("model"), py::arg("feature"),
      "Project a frame feature; returns (embedding, quality).");
  m.def("relevance_score", &qrsum::relevance_score, py::arg("model"),
        py::arg("query_words"), py::arg("feature"));
  m.def("triplet_loss", &qrsum::triplet_loss, py::arg("model"),
        py::arg("triplet"), py::arg("config"), py::arg("mode"));
  m.def("train_relevance", &qrsum::train_relevance, py::arg("init"),
        py::arg("triplets"), py::arg("config"), py::arg("mode"));
  m.def("rank_frames", &qrsum::rank_frames, py::arg("model"),
        py::arg("query_words"), py::arg("features"),
        py::arg("mode") = qrsum::LossMode::Implicit);
  m.def("save_model", &qrsum::save_model, py::arg("path"), py::arg("model"));
  m.def("load_model", &qrsum::load_model, py::arg("path"));

  // ---- summarization -------------------------------------------------------
  py::enum_<qrsum::ObjectiveKind>(m, "ObjectiveKind")
      .value("QuerySimilarity", qrsum::ObjectiveKind::QuerySimilarity)
      .value("Quality", qrsum::ObjectiveKind::Quality)
      .value("Diversity", qrsum::ObjectiveKind::Diversity)
      .value("Representativeness", qrsum::ObjectiveKind::Representativeness);

  py::class_<qrsum::Mixture>(m, "Mixture")
      .def(py::init<>())
      .def(py::init([](const qrsum::Vector4& weights) {
             qrsum::Mixture mix;
             mix.weights = weights;
             return mix;
           }),
           py::arg("weights"))
      .def_readwrite("weights", &qrsum::Mixture::weights);

  py::class_<qrsum::SummaryProblem>(m, "SummaryProblem")
      .def(py::init<qrsum::Matrix, qrsum::Vector, qrsum::Matrix, qrsum::Vector,
                    int>(),
           py::arg("frame_embeddings"), py::arg("quality"),
           py::arg("div_features"), py::arg("query_embedding"), py::arg("k"))
      .def_property_readonly("size", &qrsum::SummaryProblem::size)
      .def_property_readonly("budget", &qrsum::SummaryProblem::budget)
      .def_property_readonly("d_max", &qrsum::SummaryProblem::d_max)
      .def("distance", &qrsum::SummaryProblem::distance, py::arg("a"),
           py::arg("b"))
      .def("similarity", &qrsum::SummaryProblem::similarity, py::arg("v"));

  py::class_<qrsum::Summary>(m, "Summary")
      .def_readonly("selected", &qrsum::Summary::selected)
      .def_readonly("objective_value", &qrsum::Summary::objective_value)
      .def_readonly("per_objective", &qrsum::Summary::per_objective);

  py::class_<qrsum::LazyStats>(m, "LazyStats")
      .def(py::init<>())
      .def_readwrite("evaluations", &qrsum::LazyStats::evaluations)
      .def_readwrite("pops", &qrsum::LazyStats::pops)
      .def_readwrite("re_evaluations", &qrsum::LazyStats::re_evaluations);

  m.def("objective_gain", &qrsum::objective_gain, py::arg("kind"),
        py::arg("problem"), py::arg("selected"), py::arg("candidate"));
  m.def("evaluate_mixture", &qrsum::evaluate_mixture, py::arg("mixture"),
        py::arg("problem"), py::arg("selected"));
  m.def("per_objective_values", &qrsum::per_objective_values,
        py::arg("problem"), py::arg("selected"));
  m.def("greedy_select", &qrsum::greedy_select, py::arg("mixture"),
        py::arg("problem"));
  m.def(
      "lazy_greedy_select",
      [](const qrsum::Mixture& mixture, const qrsum::SummaryProblem& problem) {
        return qrsum::lazy_greedy_select(mixture, problem);
      },
      py::arg("mixture"), py::arg("problem"));
  m.def(
      "lazy_greedy_select_with_stats",
      [](const qrsum::Mixture& mixture, const qrsum::SummaryProblem& problem) {
        qrsum::LazyStats stats;
        qrsum::Summary summary =
            qrsum::lazy_greedy_select(mixture, problem, &stats);
        return py::make_tuple(std::move(summary), stats);
      },
      py::arg("mixture"), py::arg("problem"));
  m.def("mmr_select", &qrsum::mmr_select, py::arg("problem"),
        py::arg("lambda_sim"));
  m.def("hecate_select", &qrsum::hecate_select, py::arg("problem"),
        py::arg("kmeans_iters") = 100, py::arg("seed") = 0);

  // ---- metrics ---------------------------------------------------------------
  py::enum_<qrsum::Label>(m, "Label")
      .value("VeryGood", qrsum::Label::VeryGood)
      .value("Good", qrsum::Label::Good)
      .value("NotGood", qrsum::Label::NotGood)
      .value("Trash", qrsum::Label::Trash);

  m.def("map_label", &qrsum::map_label, py::arg("label"));
  m.def("label_from_string", &qrsum::label_from_string, py::arg("name"));
  m.def("label_to_string", &qrsum::label_to_string, py::arg("label"));
  m.def("hit_at_1", &qrsum::hit_at_1, py::arg("ranking"), py::arg("labels"),
        py::arg("accept"));
  m.def("average_precision", &qrsum::average_precision, py::arg("scores"),
        py::arg("relevant"));
  m.def("spearman", &qrsum::spearman, py::arg("a"), py::arg("b"));
  m.def("summary_precision", &qrsum::summary_precision, py::arg("selected"),
        py::arg("relevant"));
  m.def("cluster_recall", &qrsum::cluster_recall, py::arg("selected"),
        py::arg("relevant"), py::arg("clustering"));
  m.def("f1", &qrsum::f1, py::arg("precision"), py::arg("recall"));
  m.def("nmi", &qrsum::nmi, py::arg("a"), py::arg("b"));
  py::class_<qrsum::SplitHalfResult>(m, "SplitHalfResult")
      .def_readonly("rho_mean", &qrsum::SplitHalfResult::rho_mean)
      .def_readonly("splits_used", &qrsum::SplitHalfResult::splits_used)
      .def_readonly("splits_skipped", &qrsum::SplitHalfResult::splits_skipped);
  m.def("split_half_consistency", &qrsum::split_half_consistency,
        py::arg("rater_scores"));
  py::class_<qrsum::ClusteringConsistency>(m, "ClusteringConsistency")
      .def_readonly("mean_nmi", &qrsum::ClusteringConsistency::mean_nmi)
      .def_readonly("prototype_index",
                    &qrsum::ClusteringConsistency::prototype_index);
  m.def("clustering_consistency", &qrsum::clustering_consistency,
        py::arg("clusterings"));

  // ---- ground truth + synthetic data -----------------------------------------
  py::class_<qrsum::AnnotationSet>(m, "AnnotationSet")
      .def(py::init<>())
      .def_readwrite("rater_labels", &qrsum::AnnotationSet::rater_labels)
      .def_readwrite("rater_clusterings",
                     &qrsum::AnnotationSet::rater_clusterings)
      .def("frame_count", &qrsum::AnnotationSet::frame_count);

  py::class_<qrsum::GroundTruth>(m, "GroundTruth")
      .def(py::init<>())
      .def_readwrite("binary_relevance", &qrsum::GroundTruth::binary_relevance)
      .def_readwrite("prototype_clustering",
                     &qrsum::GroundTruth::prototype_clustering);

  m.def("merge_relevance", &qrsum::merge_relevance, py::arg("rater_labels"));
  m.def("merge_clusterings", &qrsum::merge_clusterings,
        py::arg("rater_clusterings"));
  m.def("merge_annotations", &qrsum::merge_annotations,
        py::arg("annotations"));
  m.def("consensus_labels", &qrsum::consensus_labels, py::arg("annotations"));

  py::class_<qrsum::SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("n_videos", &qrsum::SyntheticConfig::n_videos)
      .def_readwrite("frames_per_video",
                     &qrsum::SyntheticConfig::frames_per_video)
      .def_readwrite("n_clusters_min", &qrsum::SyntheticConfig::n_clusters_min)
      .def_readwrite("n_clusters_max", &qrsum::SyntheticConfig::n_clusters_max)
      .def_readwrite("feature_dim", &qrsum::SyntheticConfig::feature_dim)
      .def_readwrite("embed_dim", &qrsum::SyntheticConfig::embed_dim)
      .def_readwrite("word_dim", &qrsum::SyntheticConfig::word_dim)
      .def_readwrite("div_dim", &qrsum::SyntheticConfig::div_dim)
      .def_readwrite("vocab_size", &qrsum::SyntheticConfig::vocab_size)
      .def_readwrite("summary_budget", &qrsum::SyntheticConfig::summary_budget)
      .def_readwrite("triplets_per_video",
                     &qrsum::SyntheticConfig::triplets_per_video)
      .def_readwrite("noise_sigma", &qrsum::SyntheticConfig::noise_sigma)
      .def_readwrite("quality_relevance_gain",
                     &qrsum::SyntheticConfig::quality_relevance_gain)
      .def_readwrite("rng_seed", &qrsum::SyntheticConfig::rng_seed);

  py::class_<qrsum::SyntheticVideo>(m, "SyntheticVideo")
      .def_readonly("id", &qrsum::SyntheticVideo::id)
      .def_readonly("features", &qrsum::SyntheticVideo::features)
      .def_readonly("div_features", &qrsum::SyntheticVideo::div_features)
      .def_readonly("planted_quality", &qrsum::SyntheticVideo::planted_quality)
      .def_readonly("query_words", &qrsum::SyntheticVideo::query_words)
      .def_readonly("planted_relevance",
                    &qrsum::SyntheticVideo::planted_relevance)
      .def_readonly("planted_clustering",
                    &qrsum::SyntheticVideo::planted_clustering)
      .def_readonly("annotations", &qrsum::SyntheticVideo::annotations)
      .def_readonly("k", &qrsum::SyntheticVideo::k);

  py::class_<qrsum::SyntheticCorpus>(m, "SyntheticCorpus")
      .def_readonly("videos", &qrsum::SyntheticCorpus::videos)
      .def_readonly("triplets", &qrsum::SyntheticCorpus::triplets)
      .def_readonly("planted_model", &qrsum::SyntheticCorpus::planted_model);

  m.def("gen_synthetic", &qrsum::gen_synthetic, py::arg("config"));
  m.def("make_problem", &qrsum::make_problem, py::arg("video"),
        py::arg("model"));
  m.def("sample_triplets", &qrsum::sample_triplets, py::arg("ground_truth"),
        py::arg("frame_features"), py::arg("query_words"),
        py::arg("per_video"), py::arg("seed"));

  // ---- weight learning ---------------------------------------------------------
  py::class_<qrsum::TrainingPair>(m, "TrainingPair")
      .def(py::init([](qrsum::SummaryProblem problem, qrsum::GroundTruth gt) {
             return qrsum::TrainingPair{std::move(problem), std::move(gt)};
           }),
           py::arg("problem"), py::arg("ground_truth"))
      .def_readonly("problem", &qrsum::TrainingPair::problem)
      .def_readonly("ground_truth", &qrsum::TrainingPair::ground_truth);

  py::class_<qrsum::WeightLearnConfig>(m, "WeightLearnConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &qrsum::WeightLearnConfig::epochs)
      .def_readwrite("adagrad_base_rate",
                     &qrsum::WeightLearnConfig::adagrad_base_rate)
      .def_readwrite("adagrad_epsilon",
                     &qrsum::WeightLearnConfig::adagrad_epsilon)
      .def_readwrite("init_weights", &qrsum::WeightLearnConfig::init_weights)
      .def_readwrite("rng_seed", &qrsum::WeightLearnConfig::rng_seed);

  py::class_<qrsum::WeightLearnResult>(m, "WeightLearnResult")
      .def_readonly("mixture", &qrsum::WeightLearnResult::mixture)
      .def_readonly("f1_history", &qrsum::WeightLearnResult::f1_history)
      .def_readonly("skipped_pairs", &qrsum::WeightLearnResult::skipped_pairs);

  m.def("summary_f1", &qrsum::summary_f1, py::arg("selected"),
        py::arg("ground_truth"));
  m.def("target_summary", &qrsum::target_summary, py::arg("problem"),
        py::arg("ground_truth"));
  m.def("loss_augmented_select", &qrsum::loss_augmented_select,
        py::arg("mixture"), py::arg("problem"), py::arg("ground_truth"));
  m.def("learn_weights", &qrsum::learn_weights, py::arg("pairs"),
        py::arg("config"));
}
