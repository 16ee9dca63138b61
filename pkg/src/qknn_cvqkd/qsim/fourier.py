"""Quantum Fourier transform on a span, as an elementary-gate circuit.

Convention: the forward transform maps |x> to (1/sqrt(M)) sum_y
exp(+2*pi*i*x*y/M) |y> with M = 2^width; the inverse carries the conjugate
phase. The circuit is the textbook Hadamard/controlled-phase ladder plus a
final bit-order reversal, specialized to this package's little-endian qubit
numbering. ``fourier_matrix`` builds the same operator densely and exists as
an independent cross-check, not as the implementation.
"""
from __future__ import annotations

import math

import numpy as np

from .statevector import (
    StateVector,
    apply_controlled_phase,
    apply_hadamard,
    apply_swap,
)


def apply_qft(state: StateVector, span) -> StateVector:
    span = state.check_span(span)
    o, m = span.offset, span.width
    out = state
    for j in range(m - 1, -1, -1):
        out = apply_hadamard(out, o + j)
        for t in range(1, j + 1):
            out = apply_controlled_phase(out, o + j - t, o + j, 2.0 * math.pi / (1 << (t + 1)))
    for i in range(m // 2):
        out = apply_swap(out, o + i, o + m - 1 - i)
    return out


def apply_iqft(state: StateVector, span) -> StateVector:
    """Inverse transform: exact reverse of ``apply_qft`` with negated phases."""
    span = state.check_span(span)
    o, m = span.offset, span.width
    out = state
    for i in range(m // 2):
        out = apply_swap(out, o + i, o + m - 1 - i)
    for j in range(m):
        for t in range(j, 0, -1):
            out = apply_controlled_phase(out, o + j - t, o + j, -2.0 * math.pi / (1 << (t + 1)))
        out = apply_hadamard(out, o + j)
    return out


def fourier_matrix(width: int, inverse: bool = False) -> np.ndarray:
    size = 1 << width
    x = np.arange(size)
    sign = -1.0 if inverse else 1.0
    return np.exp(sign * 2j * math.pi * np.outer(x, x) / size) / math.sqrt(size)
