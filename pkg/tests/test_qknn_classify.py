"""Voting, the classical baseline, and quantum/classical oracle equivalence."""
import numpy as np
import pytest

from qknn_cvqkd.qknn import (
    FeatureScaler,
    TrainingSet,
    classical_knn_predict,
    knn_predict_batch,
    majority_vote,
    qknn_predict,
)

RNG = np.random.default_rng


def direct_training_set(features: np.ndarray, labels, n_classes: int) -> TrainingSet:
    """Training set whose features are already in [0, 1] (identity scaling)."""
    features = np.asarray(features, dtype=float)
    scaler = FeatureScaler(minimum=np.zeros(features.shape[1]), maximum=np.ones(features.shape[1]))
    return TrainingSet(features, np.asarray(labels, int), n_classes, scaler)


def random_training_set(seed: int, size: int, dim: int, n_classes: int) -> TrainingSet:
    rng = RNG(seed)
    features = rng.uniform(size=(size, dim))
    labels = rng.integers(1, n_classes + 1, size=size)
    return direct_training_set(features, labels, n_classes)


# ---------------------------------------------------------------------------
# majority vote
# ---------------------------------------------------------------------------

def test_majority_vote_simple():
    assert majority_vote([1, 1, 2]) == 1


def test_majority_vote_tie_takes_lowest_label():
    assert majority_vote([1, 2]) == 1
    assert majority_vote([3, 3, 2, 2]) == 2


def test_majority_vote_four_against_three():
    assert majority_vote([2, 2, 2, 2, 1, 1, 1]) == 2


def test_majority_vote_rejects_empty():
    with pytest.raises(ValueError):
        majority_vote([])


# ---------------------------------------------------------------------------
# classical baseline
# ---------------------------------------------------------------------------

def test_single_training_point_always_wins():
    train = direct_training_set(np.array([[0.3, 0.4]]), [5], n_classes=8)
    pred = classical_knn_predict(train, np.array([0.9, 0.1]), k=1)
    assert pred.label == 5
    assert pred.scores[4] == 1.0


def test_euclidean_three_four_five():
    train = direct_training_set(np.array([[0.3, 0.4], [0.0, 0.0]]), [1, 2], n_classes=2)
    from qknn_cvqkd.qknn.classify import euclidean_distance

    d = euclidean_distance(train.features, np.zeros(2))
    assert d[0] == pytest.approx(0.5, abs=1e-15)  # the 3-4-5 triangle, scaled


def test_two_class_example_flips_between_k3_and_k7():
    # ring of labeled points around the query: nearest three contain two of
    # class 1, the full seven contain four of class 2
    query = np.array([0.5, 0.5])
    radii = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35]
    labels = [1, 2, 1, 2, 2, 2, 1]
    angles = np.linspace(0, 2 * np.pi, num=7, endpoint=False)
    pts = np.stack([query[0] + np.array(radii) * np.cos(angles),
                    query[1] + np.array(radii) * np.sin(angles)], axis=1)
    train = direct_training_set(pts, labels, n_classes=2)
    assert classical_knn_predict(train, query, k=3).label == 1
    assert classical_knn_predict(train, query, k=7).label == 2


def test_k_larger_than_training_size_rejected():
    train = random_training_set(0, size=4, dim=3, n_classes=2)
    with pytest.raises(ValueError):
        classical_knn_predict(train, np.zeros(3), k=5)


@pytest.mark.parametrize("similarity", ["euclidean", "cosine", "fidelity"])
def test_batch_predictions_match_single_queries(similarity):
    train = random_training_set(1, size=40, dim=5, n_classes=4)
    queries = RNG(2).uniform(size=(25, 5))
    batch = knn_predict_batch(train, queries, [1, 5, 9], similarity=similarity)
    for k in (1, 5, 9):
        labels, scores = batch[k]
        for idx in range(queries.shape[0]):
            single = classical_knn_predict(train, queries[idx], k, similarity=similarity)
            assert labels[idx] == single.label
            assert np.abs(scores[idx] - single.scores).max() < 1e-12


def test_scores_are_neighbor_fractions():
    train = random_training_set(3, size=30, dim=4, n_classes=3)
    pred = classical_knn_predict(train, RNG(4).uniform(size=4), k=10)
    assert pred.scores.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all((pred.scores * 10) % 1 < 1e-9)


# ---------------------------------------------------------------------------
# quantum pipeline vs the fidelity baseline
# ---------------------------------------------------------------------------

def test_analytic_qknn_equals_fidelity_knn():
    train = random_training_set(5, size=16, dim=4, n_classes=4)
    rng = RNG(6)
    for _ in range(100):
        query = rng.uniform(size=4)
        oracle = classical_knn_predict(train, query, k=3, similarity="fidelity")
        quantum = qknn_predict(train, query, k=3, rng=rng, mode="analytic")
        assert quantum.label == oracle.label
        assert set(quantum.neighbor_indices.tolist()) == set(oracle.neighbor_indices.tolist())
        assert np.abs(quantum.scores - oracle.scores).max() < 1e-12


def test_k_equals_m_is_plain_majority():
    train = random_training_set(7, size=12, dim=3, n_classes=3)
    pred = qknn_predict(train, RNG(8).uniform(size=3), k=12, rng=RNG(9))
    assert pred.label == majority_vote(train.labels.tolist())


def test_gate_mode_pipeline_runs_and_matches_on_clean_data():
    # widely separated similarities survive register quantization
    rng = RNG(10)
    base = np.array([0.05, 0.05, 0.05])
    far = np.array([0.95, 0.95, 0.95])
    features = np.vstack([base + rng.uniform(0, 0.02, size=(4, 3)),
                          far - rng.uniform(0, 0.02, size=(4, 3))])
    train = direct_training_set(features, [1, 1, 1, 1, 2, 2, 2, 2], n_classes=2)
    query = base + 0.01
    oracle = classical_knn_predict(train, query, k=3, similarity="fidelity")
    quantum = qknn_predict(train, query, k=3, rng=RNG(11), mode="gate")
    assert quantum.label == oracle.label == 1
    assert quantum.search_report.oracle_calls >= 0
    assert quantum.table.mode == "gate"
