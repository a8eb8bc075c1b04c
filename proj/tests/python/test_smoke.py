# qrsum - query-relevant video summarization
#
# Licensed under the terms of the Apache 2.0 License.
# See LICENSE file in the project root for terms.

import math

import numpy as np
import pytest

import qrsum


def test_cosine_similarity_known_value():
    a = np.array([1.0, 2.0, 3.0])
    b = np.array([4.0, 5.0, 6.0])
    assert qrsum.cosine_similarity(a, b) == pytest.approx(0.974631846, abs=1e-9)
    with pytest.raises(ValueError):
        qrsum.cosine_similarity(a, np.zeros(3))


def test_huber_branches():
    assert qrsum.huber(1.0, 1.5) == pytest.approx(0.5)
    assert qrsum.huber(2.0, 1.5) == pytest.approx(1.5 * (2.0 - 0.75))
    assert qrsum.huber(0.0, 1.5) == 0.0


def test_identity_projection():
    model = qrsum.EmbeddingModel()
    model.feature_dim = 3
    model.embed_dim = 2
    model.weight = np.eye(3)
    model.bias = np.zeros(3)
    embedding, quality = qrsum.project_frame(model, np.array([2.0, 3.0, 5.0]))
    assert embedding.tolist() == [2.0, 3.0]
    assert quality == 5.0


def test_training_reduces_loss():
    config = qrsum.SyntheticConfig()
    config.n_videos = 8
    config.frames_per_video = 12
    config.n_clusters_min = 2
    config.n_clusters_max = 3
    config.feature_dim = 8
    config.embed_dim = 4
    config.word_dim = 4
    config.div_dim = 2
    config.vocab_size = 40
    config.summary_budget = 3
    config.triplets_per_video = 40
    config.rng_seed = 5
    corpus = qrsum.gen_synthetic(config)
    assert len(corpus.videos) == 8
    assert len(corpus.triplets) == 8 * 40

    rng = np.random.default_rng(1)
    init = qrsum.EmbeddingModel()
    init.feature_dim = 8
    init.embed_dim = 4
    init.weight = rng.normal(scale=0.2, size=(8, 5))
    init.bias = np.zeros(5)
    train_config = qrsum.TrainConfig()
    train_config.epochs = 4
    train_config.rng_seed = 3
    result = qrsum.train_relevance(
        init, corpus.triplets, train_config, qrsum.LossMode.Explicit
    )
    assert len(result.loss_history) == 4
    assert result.loss_history[-1] < result.loss_history[0]


def test_greedy_and_lazy_agree(tmp_path):
    rng = np.random.default_rng(11)
    problem = qrsum.SummaryProblem(
        rng.normal(size=(20, 4)),
        rng.normal(size=20),
        rng.normal(size=(20, 3)),
        rng.normal(size=4),
        5,
    )
    mixture = qrsum.Mixture(np.array([0.4, 0.1, 0.3, 0.2]))
    greedy = qrsum.greedy_select(mixture, problem)
    lazy, stats = qrsum.lazy_greedy_select_with_stats(mixture, problem)
    assert greedy.selected == lazy.selected
    assert greedy.objective_value == lazy.objective_value
    assert stats.evaluations >= 20
    assert len(set(greedy.selected)) == 5

    mmr = qrsum.mmr_select(problem, 0.25)
    two_term = qrsum.greedy_select(
        qrsum.Mixture(np.array([0.25, 0.0, 0.75, 0.0])), problem
    )
    assert mmr.selected == two_term.selected


def test_metrics_spot_checks():
    assert qrsum.f1(0.704, 0.825) == pytest.approx(0.7597, abs=1e-4)
    assert qrsum.nmi([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0
    assert qrsum.nmi([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    rho = qrsum.spearman([1.0, 2.0, 3.0, 4.0], [1.0, 4.0, 9.0, 16.0])
    assert rho == pytest.approx(1.0)
    ap = qrsum.average_precision([0.9, 0.8, 0.7], [True, False, True])
    assert ap == pytest.approx((1.0 + 2.0 / 3.0) / 2.0)


def test_label_merge_round_trip():
    labels = [qrsum.Label.VeryGood, qrsum.Label.Good, qrsum.Label.NotGood]
    mapped = [qrsum.map_label(l) for l in labels]
    assert mapped == [1.0, 0.5, 0.0]
    merged = qrsum.merge_relevance(
        [[qrsum.Label.VeryGood] * 3, [qrsum.Label.Good] * 3]
        + [[qrsum.Label.NotGood] * 3] * 3
    )
    # mean score = (1.0 + 0.5) / 5 = 0.3 < 0.5 on every frame
    assert merged == [False, False, False]


def test_model_save_load_round_trip(tmp_path):
    model = qrsum.EmbeddingModel()
    model.feature_dim = 4
    model.embed_dim = 2
    rng = np.random.default_rng(7)
    model.weight = rng.normal(size=(4, 3))
    model.bias = rng.normal(size=3)
    path = str(tmp_path / "model.txt")
    qrsum.save_model(path, model)
    loaded = qrsum.load_model(path)
    assert loaded.feature_dim == 4
    assert loaded.embed_dim == 2
    np.testing.assert_array_equal(np.asarray(loaded.weight), model.weight)
    np.testing.assert_array_equal(np.asarray(loaded.bias), model.bias)


def test_weight_learning_runs():
    config = qrsum.SyntheticConfig()
    config.n_videos = 6
    config.frames_per_video = 12
    config.n_clusters_min = 2
    config.n_clusters_max = 3
    config.feature_dim = 8
    config.embed_dim = 4
    config.word_dim = 4
    config.div_dim = 2
    config.vocab_size = 40
    config.summary_budget = 3
    config.triplets_per_video = 2
    config.rng_seed = 13
    corpus = qrsum.gen_synthetic(config)

    pairs = []
    for video in corpus.videos:
        gt = qrsum.GroundTruth()
        gt.binary_relevance = video.planted_relevance
        gt.prototype_clustering = video.planted_clustering
        pairs.append(
            qrsum.TrainingPair(qrsum.make_problem(video, corpus.planted_model), gt)
        )

    learn_config = qrsum.WeightLearnConfig()
    learn_config.epochs = 2
    result = qrsum.learn_weights(pairs, learn_config)
    weights = np.asarray(result.mixture.weights)
    assert weights.shape == (4,)
    assert (weights >= 0.0).all()
    assert len(result.f1_history) == 2

    target = qrsum.target_summary(pairs[0].problem, pairs[0].ground_truth)
    assert qrsum.summary_f1(target, pairs[0].ground_truth) > 0.0


def test_invalid_arguments_raise():
    with pytest.raises(ValueError):
        qrsum.f1(-0.5, 0.5)
    with pytest.raises(ValueError):
        qrsum.nmi([0, 1], [0, 1, 2])
    config = qrsum.SyntheticConfig()
    config.frames_per_video = 1
    with pytest.raises(ValueError):
        qrsum.gen_synthetic(config)
