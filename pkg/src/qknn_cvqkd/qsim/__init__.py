"""Exact little-endian state-vector simulator used by all circuits here."""
from .fourier import apply_iqft, apply_qft, fourier_matrix
from .registers import RegisterLayout, Span, as_span
from .statevector import (
    DEFAULT_QUBIT_CAP,
    MeasurementOutcome,
    ResourceError,
    StateCorruptionError,
    StateVector,
    apply_cmp,
    apply_controlled_not,
    apply_controlled_phase,
    apply_controlled_ry,
    apply_controlled_swap_span,
    apply_hadamard,
    apply_multi_controlled,
    apply_multi_controlled_ry,
    apply_phase,
    apply_phase_flip,
    apply_reflection_about_uniform,
    apply_ry,
    apply_swap,
    apply_x,
    basis_state,
    born_probabilities,
    cswap_test,
    from_amplitudes,
    measure,
    new_register,
    reduced_density_matrix,
    ry_matrix,
    tensor_product,
)

__all__ = [
    "DEFAULT_QUBIT_CAP",
    "MeasurementOutcome",
    "RegisterLayout",
    "ResourceError",
    "Span",
    "StateCorruptionError",
    "StateVector",
    "apply_cmp",
    "apply_controlled_not",
    "apply_controlled_phase",
    "apply_controlled_ry",
    "apply_controlled_swap_span",
    "apply_hadamard",
    "apply_iqft",
    "apply_multi_controlled",
    "apply_multi_controlled_ry",
    "apply_phase",
    "apply_phase_flip",
    "apply_qft",
    "apply_reflection_about_uniform",
    "apply_ry",
    "apply_swap",
    "apply_x",
    "as_span",
    "basis_state",
    "born_probabilities",
    "cswap_test",
    "fourier_matrix",
    "from_amplitudes",
    "measure",
    "new_register",
    "reduced_density_matrix",
    "ry_matrix",
    "tensor_product",
]
