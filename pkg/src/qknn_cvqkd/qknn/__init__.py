"""Quantum k-nearest-neighbor classifier and its classical baseline."""
from .classify import (
    KnnPrediction,
    QknnPrediction,
    classical_knn_predict,
    knn_predict_batch,
    majority_vote,
    qknn_predict,
)
from .dataset import FeatureScaler, LabeledSample, TrainingSet
from .encoding import (
    EncodingError,
    UniformPrepResult,
    fidelity_to_rows,
    gate_fidelity,
    index_register_width,
    pairwise_fidelity,
    prepare_query_state,
    prepare_training_row_state,
    prepare_training_state,
    prepare_uniform_superposition,
)
from .search import (
    GroverRunReport,
    KMaximalReport,
    NeighborSet,
    grover_amplitudes,
    grover_find_greater,
    k_maximal_find,
    optimal_iterations,
    success_probability,
)
from .similarity import (
    AmplitudeEstimate,
    SimilarityState,
    SimilarityTable,
    amplitude_estimate,
    compute_similarity_table,
    estimation_error_bound,
    required_iterations,
    similarity_superposition,
    swap_test_probability,
)

__all__ = [
    "AmplitudeEstimate",
    "EncodingError",
    "FeatureScaler",
    "GroverRunReport",
    "KMaximalReport",
    "KnnPrediction",
    "LabeledSample",
    "NeighborSet",
    "QknnPrediction",
    "SimilarityState",
    "SimilarityTable",
    "TrainingSet",
    "UniformPrepResult",
    "amplitude_estimate",
    "classical_knn_predict",
    "compute_similarity_table",
    "estimation_error_bound",
    "fidelity_to_rows",
    "gate_fidelity",
    "grover_amplitudes",
    "grover_find_greater",
    "index_register_width",
    "k_maximal_find",
    "knn_predict_batch",
    "majority_vote",
    "optimal_iterations",
    "pairwise_fidelity",
    "prepare_query_state",
    "prepare_training_row_state",
    "prepare_training_state",
    "prepare_uniform_superposition",
    "qknn_predict",
    "required_iterations",
    "similarity_superposition",
    "success_probability",
    "swap_test_probability",
]
