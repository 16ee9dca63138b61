"""Dense state-vector simulator for the circuits used in this package.

Design notes:
- Amplitudes are a dense complex128 array of length ``2**n_qubits``; the
  default cap of 24 qubits keeps a single state under 256 MiB.
- Qubit 0 is the least significant bit of the basis index (little-endian).
- Every operation is a pure function: the input state is never mutated and a
  fresh ``StateVector`` is returned.
- Gates assert norm preservation to 1e-12 instead of renormalizing, so a
  broken gate shows up as an assertion, not as silent drift. Renormalization
  happens only at measurement collapse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .registers import Span, as_span

DEFAULT_QUBIT_CAP = 24
NORM_TOL = 1e-12

_H_MATRIX = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)


class ResourceError(RuntimeError):
    """Raised when a requested register exceeds the configured qubit cap."""


class StateCorruptionError(RuntimeError):
    """Raised when an operation meets a state that violates its invariants."""


@dataclass(frozen=True)
class StateVector:
    """Pure quantum state of ``n_qubits`` qubits as a dense amplitude array."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"amplitude array of length {self.amplitudes.shape} does not "
                f"match {self.n_qubits} qubits"
            )

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def check_span(self, span) -> Span:
        span = as_span(span)
        if span.width < 1 or span.offset < 0 or span.offset + span.width > self.n_qubits:
            raise IndexError(f"span {span} outside register of {self.n_qubits} qubits")
        return span

    def check_qubit(self, qubit: int) -> int:
        if not 0 <= qubit < self.n_qubits:
            raise IndexError(f"qubit {qubit} outside register of {self.n_qubits} qubits")
        return qubit


@dataclass(frozen=True)
class MeasurementOutcome:
    """Result of measuring a span: observed bits, their Born probability and
    the collapsed, renormalized post-measurement state."""

    bits: int
    probability: float
    post_state: StateVector


def _wrap(state: StateVector, amplitudes: np.ndarray, renormalized: bool = False) -> StateVector:
    new = StateVector(state.n_qubits, amplitudes)
    if not renormalized:
        drift = abs(new.norm_squared() - state.norm_squared())
        assert drift < NORM_TOL, f"gate broke normalization by {drift:.3e}"
    return new


def new_register(n_qubits: int, cap: int = DEFAULT_QUBIT_CAP) -> StateVector:
    """Allocate ``n_qubits`` qubits initialized to the all-zeros basis state."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    if n_qubits > cap:
        raise ResourceError(
            f"{n_qubits} qubits need a 2^{n_qubits}-amplitude array "
            f"({(1 << n_qubits) * 16 / 2**30:.1f} GiB); cap is {cap} qubits"
        )
    amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
    amplitudes[0] = 1.0
    return StateVector(n_qubits, amplitudes)


def basis_state(n_qubits: int, value: int, cap: int = DEFAULT_QUBIT_CAP) -> StateVector:
    state = new_register(n_qubits, cap)
    if not 0 <= value < state.dim:
        raise ValueError(f"basis value {value} outside {n_qubits}-qubit register")
    amplitudes = np.zeros(state.dim, dtype=np.complex128)
    amplitudes[value] = 1.0
    return StateVector(n_qubits, amplitudes)


def from_amplitudes(amplitudes, normalize: bool = False) -> StateVector:
    amps = np.asarray(amplitudes, dtype=np.complex128).ravel().copy()
    n = int(round(math.log2(amps.size)))
    if 1 << n != amps.size:
        raise ValueError(f"amplitude length {amps.size} is not a power of two")
    norm = np.linalg.norm(amps)
    if normalize:
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        amps /= norm
    elif abs(norm * norm - 1.0) > 1e-10:
        raise ValueError(f"amplitudes are not normalized (|psi|^2 = {norm * norm})")
    return StateVector(n, amps)


def tensor_product(*states: StateVector) -> StateVector:
    """Combine states so the first argument occupies the lowest qubits."""
    amps = states[0].amplitudes
    n = states[0].n_qubits
    for s in states[1:]:
        amps = np.kron(s.amplitudes, amps)
        n += s.n_qubits
    return StateVector(n, amps)


# ---------------------------------------------------------------------------
# single-qubit and controlled gates
# ---------------------------------------------------------------------------

def _apply_1q_matrix(state: StateVector, matrix: np.ndarray, target: int) -> StateVector:
    n = state.n_qubits
    axis = n - 1 - target  # little-endian: qubit q is axis n-1-q of the tensor
    tensor = state.amplitudes.reshape((2,) * n)
    moved = np.moveaxis(tensor, axis, -1)
    out = moved @ matrix.T
    return np.moveaxis(out, -1, axis).reshape(-1)


def apply_hadamard(state: StateVector, target: int) -> StateVector:
    state.check_qubit(target)
    return _wrap(state, _apply_1q_matrix(state, _H_MATRIX, target))


def apply_x(state: StateVector, target: int) -> StateVector:
    state.check_qubit(target)
    idx = np.arange(state.dim)
    return _wrap(state, state.amplitudes[idx ^ (1 << target)].copy())


def ry_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def apply_ry(state: StateVector, target: int, angle: float) -> StateVector:
    """Real rotation about Y; ``angle = 2*asin(v)`` maps |0> to
    sqrt(1-v^2)|0> + v|1>."""
    state.check_qubit(target)
    if not math.isfinite(angle):
        raise ValueError(f"rotation angle must be finite, got {angle}")
    return _wrap(state, _apply_1q_matrix(state, ry_matrix(angle), target))


def apply_phase(state: StateVector, target: int, angle: float) -> StateVector:
    """diag(1, e^{i*angle}) on one qubit."""
    state.check_qubit(target)
    if not math.isfinite(angle):
        raise ValueError(f"phase angle must be finite, got {angle}")
    amps = state.amplitudes.copy()
    idx = np.arange(state.dim)
    sel = ((idx >> target) & 1) == 1
    amps[sel] *= np.exp(1j * angle)
    return _wrap(state, amps)


def _control_mask(state: StateVector, controls) -> np.ndarray:
    idx = np.arange(state.dim)
    mask = np.ones(state.dim, dtype=bool)
    for qubit, required in controls:
        state.check_qubit(qubit)
        mask &= ((idx >> qubit) & 1) == int(required)
    return mask


def apply_multi_controlled(state: StateVector, controls, target: int) -> StateVector:
    """Flip ``target`` on basis states whose control qubits match the given
    pattern. ``controls`` is a sequence of ``(qubit, required_bit)`` pairs."""
    state.check_qubit(target)
    control_qubits = {q for q, _ in controls}
    if target in control_qubits:
        raise ValueError(f"target qubit {target} overlaps a control")
    if len(control_qubits) != len(list(controls)):
        raise ValueError("duplicate control qubit")
    mask = _control_mask(state, controls)
    amps = state.amplitudes.copy()
    idx = np.arange(state.dim)
    lo = mask & (((idx >> target) & 1) == 0)
    src = idx[lo]
    dst = src | (1 << target)
    amps[src], amps[dst] = amps[dst], amps[src].copy()
    return _wrap(state, amps)


def apply_controlled_not(
    state: StateVector, control: int, target: int, inverted: bool = False
) -> StateVector:
    """CNOT, or the inverted-control variant (flips when control is |0>)."""
    if control == target:
        raise ValueError("control and target must differ")
    return apply_multi_controlled(state, [(control, 0 if inverted else 1)], target)


def apply_controlled_ry(
    state: StateVector, control: int, target: int, angle: float
) -> StateVector:
    if control == target:
        raise ValueError("control and target must differ")
    state.check_qubit(control)
    state.check_qubit(target)
    if not math.isfinite(angle):
        raise ValueError(f"rotation angle must be finite, got {angle}")
    amps = state.amplitudes.copy()
    idx = np.arange(state.dim)
    on = ((idx >> control) & 1) == 1
    t0 = on & (((idx >> target) & 1) == 0)
    src = idx[t0]
    dst = src | (1 << target)
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    a0, a1 = amps[src].copy(), amps[dst].copy()
    amps[src] = c * a0 - s * a1
    amps[dst] = s * a0 + c * a1
    return _wrap(state, amps)


def apply_multi_controlled_ry(
    state: StateVector, controls, target: int, angle: float
) -> StateVector:
    """Rotate ``target`` about Y on basis states matching the control pattern."""
    state.check_qubit(target)
    control_qubits = {q for q, _ in controls}
    if target in control_qubits:
        raise ValueError(f"target qubit {target} overlaps a control")
    if not math.isfinite(angle):
        raise ValueError(f"rotation angle must be finite, got {angle}")
    mask = _control_mask(state, controls)
    amps = state.amplitudes.copy()
    idx = np.arange(state.dim)
    lo = mask & (((idx >> target) & 1) == 0)
    src = idx[lo]
    dst = src | (1 << target)
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    a0, a1 = amps[src].copy(), amps[dst].copy()
    amps[src] = c * a0 - s * a1
    amps[dst] = s * a0 + c * a1
    return _wrap(state, amps)


def apply_controlled_phase(
    state: StateVector, control: int, target: int, angle: float
) -> StateVector:
    """diag(1,1,1,e^{i*angle}); symmetric in control and target."""
    if control == target:
        raise ValueError("control and target must differ")
    mask = _control_mask(state, [(control, 1), (target, 1)])
    amps = state.amplitudes.copy()
    amps[mask] *= np.exp(1j * angle)
    return _wrap(state, amps)


def apply_swap(state: StateVector, qubit_a: int, qubit_b: int) -> StateVector:
    if qubit_a == qubit_b:
        return StateVector(state.n_qubits, state.amplitudes.copy())
    state.check_qubit(qubit_a)
    state.check_qubit(qubit_b)
    idx = np.arange(state.dim)
    bit_a = (idx >> qubit_a) & 1
    bit_b = (idx >> qubit_b) & 1
    swapped = idx ^ ((bit_a ^ bit_b) * ((1 << qubit_a) | (1 << qubit_b)))
    return _wrap(state, state.amplitudes[swapped].copy())


# ---------------------------------------------------------------------------
# comparator
# ---------------------------------------------------------------------------

def apply_cmp(
    state: StateVector,
    span_i,
    span_m,
    flag: int,
    method: str = "oracle",
) -> StateVector:
    """XOR ``[i > m]`` into ``flag``, where ``i`` and ``m`` are the integers
    held in two equal-width spans.

    ``method="oracle"`` applies the comparison as one exact permutation of
    basis states (the default; fastest). ``method="cascade"`` builds the same
    unitary from the controlled-NOT gate family, one bit pair per round from
    the most significant bit down: CNOTs fold the second span into the XOR
    ``i^m``, a combined control gate fires at the most significant differing
    bit when that bit of ``i`` is 1, and the CNOTs are undone. Both methods
    realize the identical permutation; the cascade exists so the gate-level
    construction can be checked against the arithmetic definition.
    """
    span_i = state.check_span(span_i)
    span_m = state.check_span(span_m)
    state.check_qubit(flag)
    if span_i.width != span_m.width:
        raise ValueError(f"span widths differ: {span_i.width} vs {span_m.width}")
    occupied = set(span_i.qubits) | set(span_m.qubits)
    if len(occupied) != 2 * span_i.width or flag in occupied:
        raise ValueError("comparator spans and flag must be disjoint")

    if method == "oracle":
        idx = np.arange(state.dim)
        greater = span_i.value_of(idx) > span_m.value_of(idx)
        amps = state.amplitudes.copy()
        src = idx[greater & (((idx >> flag) & 1) == 0)]
        dst = src | (1 << flag)
        amps[src], amps[dst] = amps[dst], amps[src].copy()
        return _wrap(state, amps)

    if method != "cascade":
        raise ValueError(f"unknown comparator method '{method}'")
    width = span_i.width
    out = state
    for p in range(width):
        out = apply_controlled_not(out, span_i.offset + p, span_m.offset + p)
    for p in range(width - 1, -1, -1):
        # after the CNOTs, span_m bit q holds i_q ^ m_q: the pattern below
        # matches exactly when p is the most significant differing bit
        controls = [(span_i.offset + p, 1), (span_m.offset + p, 1)]
        controls += [(span_m.offset + q, 0) for q in range(p + 1, width)]
        out = apply_multi_controlled(out, controls, flag)
    for p in range(width):
        out = apply_controlled_not(out, span_i.offset + p, span_m.offset + p)
    return out


# ---------------------------------------------------------------------------
# swap test
# ---------------------------------------------------------------------------

def apply_controlled_swap_span(
    state: StateVector, control: int, span_a, span_b
) -> StateVector:
    """SWAP the contents of two equal-width spans when ``control`` is |1>."""
    span_a = state.check_span(span_a)
    span_b = state.check_span(span_b)
    state.check_qubit(control)
    if span_a.width != span_b.width:
        raise ValueError(f"span widths differ: {span_a.width} vs {span_b.width}")
    qubits = set(span_a.qubits) | set(span_b.qubits)
    if len(qubits) != 2 * span_a.width or control in qubits:
        raise ValueError("swap spans and control must be disjoint")
    idx = np.arange(state.dim)
    va = span_a.value_of(idx)
    vb = span_b.value_of(idx)
    swapped = (
        (idx & ~(span_a.mask | span_b.mask))
        | (vb << span_a.offset)
        | (va << span_b.offset)
    )
    on = ((idx >> control) & 1) == 1
    source = np.where(on, swapped, idx)
    return _wrap(state, state.amplitudes[source].copy())


def cswap_test(state: StateVector, control: int, span_a, span_b) -> StateVector:
    """Hadamard / controlled-SWAP / Hadamard sequence on ``control``.

    After this circuit the probability of reading 0 on the control qubit is
    (1 + |<a|b>|^2) / 2 for product inputs, i.e. it encodes the fidelity of
    the two span states.
    """
    out = apply_hadamard(state, control)
    out = apply_controlled_swap_span(out, control, span_a, span_b)
    return apply_hadamard(out, control)


# ---------------------------------------------------------------------------
# span-level diagonal and reflection operators (Grover building blocks)
# ---------------------------------------------------------------------------

def _span_view(state_amps: np.ndarray, n_qubits: int, span: Span) -> np.ndarray:
    """Reshape so axis 1 enumerates the span value: (high, 2^w, low)."""
    high = 1 << (n_qubits - span.offset - span.width)
    low = 1 << span.offset
    return state_amps.reshape(high, 1 << span.width, low)


def apply_phase_flip(state: StateVector, span, values) -> StateVector:
    """Multiply amplitudes whose span value is in ``values`` by -1."""
    span = state.check_span(span)
    values = np.asarray(values, dtype=np.int64)
    if values.size and (values.min() < 0 or values.max() >= (1 << span.width)):
        raise ValueError("marked value outside span range")
    amps = state.amplitudes.copy()
    view = _span_view(amps, state.n_qubits, span)
    view[:, values, :] *= -1.0
    return _wrap(state, amps)


def apply_reflection_about_uniform(state: StateVector, span, support_size: int) -> StateVector:
    """Apply 2|u><u| - I on the span, with |u> uniform over span values
    0..support_size-1. For a full span (support 2^w) this equals the
    H^w (2|0><0|-I) H^w inversion-about-average network."""
    span = state.check_span(span)
    if not 1 <= support_size <= (1 << span.width):
        raise ValueError(f"support size {support_size} outside span range")
    amps = state.amplitudes.copy()
    view = _span_view(amps, state.n_qubits, span)
    block = view[:, :support_size, :]
    mean = block.mean(axis=1, keepdims=True)
    view[:, :support_size, :] = 2.0 * mean - block
    view[:, support_size:, :] *= -1.0
    return _wrap(state, amps)


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

def born_probabilities(state: StateVector, span) -> np.ndarray:
    """Exact outcome distribution of a span measurement, indexed by value."""
    span = state.check_span(span)
    view = _span_view(np.abs(state.amplitudes) ** 2, state.n_qubits, span)
    probs = view.sum(axis=(0, 2))
    total = probs.sum()
    assert abs(total - 1.0) < NORM_TOL * state.dim, f"probabilities sum to {total}"
    return probs


def measure(state: StateVector, span, rng: np.random.Generator) -> MeasurementOutcome:
    """Sample a span measurement and collapse the state."""
    span = state.check_span(span)
    probs = np.abs(state.amplitudes) ** 2
    total = probs.sum()
    if total < 1e-12:
        raise StateCorruptionError("measuring an all-zero state")
    outcome_probs = _span_view(probs, state.n_qubits, span).sum(axis=(0, 2)) / total
    bits = int(rng.choice(outcome_probs.size, p=outcome_probs))
    amps = state.amplitudes.copy()
    view = _span_view(amps, state.n_qubits, span)
    keep = view[:, bits, :].copy()
    view[:, :, :] = 0.0
    view[:, bits, :] = keep / math.sqrt(outcome_probs[bits])
    post = StateVector(state.n_qubits, amps)
    return MeasurementOutcome(bits=bits, probability=float(outcome_probs[bits]), post_state=post)


def reduced_density_matrix(state: StateVector, span) -> np.ndarray:
    """Partial trace onto the span (used to check disentanglement)."""
    span = state.check_span(span)
    view = _span_view(state.amplitudes, state.n_qubits, span)
    return np.einsum("hal,hbl->ab", view, view.conj())
