"""Asymptotic secret-key rates for discretely-modulated CVQKD.

Conventional scheme: K = beta*I_AB - chi_BE. Classifier-assisted scheme:
K = beta*Lambda*I_AB - chi_BE/N, where Lambda is the classifier's macro AUC
and 1/N is an eavesdropper's chance of guessing the label-to-bits assignment
of an N-point constellation.

All noises are in shot-noise units referred to the channel input:
  chi_line = 1/T - 1 + xi          (channel-added)
  chi_het  = (2 - eta + 2*v_el)/eta (detection-added, heterodyne)
  chi_tot  = chi_line + chi_het/T = xi - 1 + 2*(1+v_el)/(eta*T)

The Alice-Bob correlation Z of the effective Gaussian state is evaluated in
a truncated Fock space from the constellation's average state tau:
  Z = 2*sqrt(T)*tr(tau^{1/2} a tau^{1/2} a^dag) - sqrt(2*T*xi*w),
  w = sum_k p_k (<alpha_k|a_tau^dag a_tau|alpha_k> - |<alpha_k|a_tau|alpha_k>|^2),
  a_tau = tau^{1/2} a tau^{-1/2}  (pseudo-inverse on the support of tau).
For Gaussian modulation Z reduces to sqrt(T*(V^2-1)); the discrete
constellation's penalty is what caps the conventional key rate at large
modulation variance. The symplectic closed forms keep their transmittance
factors explicit, so they consume z_cm^2 = Z^2/T internally; both
conventions coincide at T = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .optics import Constellation

FOCK_TAIL_TOLERANCE = 1e-12
MIN_FOCK_CUTOFF = 16
EIGENVALUE_FLOOR = 1e-12


class KeyRateDomainError(ValueError):
    """Raised when parameters leave the physical domain of the formulas."""


@dataclass(frozen=True)
class KeyRateInputs:
    """Everything the asymptotic rate formulas consume."""

    modulation_variance: float
    transmittance: float
    excess_noise: float
    detector_efficiency: float
    electronic_noise: float
    reconciliation_efficiency: float
    psk_order: int
    classifier_auc: float = 1.0
    fock_cutoff: int | None = None

    def __post_init__(self):
        if self.modulation_variance <= 0:
            raise KeyRateDomainError("modulation variance must be positive")
        if not 0.0 < self.transmittance <= 1.0:
            raise KeyRateDomainError("transmittance must lie in (0, 1]")
        if self.excess_noise < 0 or self.electronic_noise < 0:
            raise KeyRateDomainError("noise parameters must be non-negative")
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise KeyRateDomainError("detector efficiency must lie in (0, 1]")
        if not 0.0 < self.reconciliation_efficiency <= 1.0:
            raise KeyRateDomainError("reconciliation efficiency must lie in (0, 1]")
        if self.psk_order < 1:
            raise KeyRateDomainError("PSK order must be at least 1")
        if not 0.0 <= self.classifier_auc <= 1.0:
            raise KeyRateDomainError("classifier AUC must lie in [0, 1]")

    @property
    def ensemble_variance(self) -> float:
        """V = V_m + 1."""
        return self.modulation_variance + 1.0

    @property
    def coherent_amplitude(self) -> float:
        """|alpha| = sqrt(V_m/2)."""
        return math.sqrt(self.modulation_variance / 2.0)

    @property
    def constellation(self) -> Constellation:
        return Constellation(self.psk_order, self.modulation_variance)

    def at_loss_db(self, loss_db: float) -> "KeyRateInputs":
        return replace(self, transmittance=10.0 ** (-loss_db / 10.0))


def channel_added_noise(inputs: KeyRateInputs) -> float:
    return 1.0 / inputs.transmittance - 1.0 + inputs.excess_noise


def detection_added_noise(inputs: KeyRateInputs) -> float:
    eta = inputs.detector_efficiency
    return (1.0 + (1.0 - eta) + 2.0 * inputs.electronic_noise) / eta


def total_input_noise(inputs: KeyRateInputs) -> float:
    return (
        inputs.excess_noise
        - 1.0
        + 2.0 * (1.0 + inputs.electronic_noise)
        / (inputs.detector_efficiency * inputs.transmittance)
    )


def mutual_information(inputs: KeyRateInputs) -> float:
    """Shannon information of the heterodyne channel:
    log2((V + chi_tot) / (1 + chi_tot))."""
    chi_tot = total_input_noise(inputs)
    if chi_tot <= -1.0:
        raise KeyRateDomainError(f"total noise {chi_tot} at or below -1")
    return math.log2((inputs.ensemble_variance + chi_tot) / (1.0 + chi_tot))


# ---------------------------------------------------------------------------
# Fock-space machinery for the correlation term
# ---------------------------------------------------------------------------

def choose_fock_cutoff(amplitude: float) -> int:
    """Smallest dimension keeping the coherent-state tail mass below 1e-12
    (never less than 16)."""
    mean = amplitude * amplitude
    cutoff = MIN_FOCK_CUTOFF
    while coherent_tail_mass(mean, cutoff) > FOCK_TAIL_TOLERANCE:
        cutoff += 4
        if cutoff > 512:
            raise KeyRateDomainError(f"no workable Fock cutoff for |alpha|^2 = {mean}")
    return cutoff


def coherent_tail_mass(mean_photons: float, cutoff: int) -> float:
    """Probability mass of a Poisson(mean) distribution at or beyond cutoff."""
    term = math.exp(-mean_photons)
    total = term
    for n in range(1, cutoff):
        term *= mean_photons / n
        total += term
    return max(0.0, 1.0 - total)


def coherent_state_fock(alpha: complex, n_max: int) -> np.ndarray:
    """Number-basis amplitudes e^{-|a|^2/2} a^n / sqrt(n!), length n_max."""
    if n_max < 1:
        raise ValueError("need at least the vacuum component")
    n = np.arange(n_max)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n_max)))])
    magnitude = abs(alpha)
    with np.errstate(divide="ignore"):
        log_mag = np.where(n > 0, n * np.log(magnitude) if magnitude > 0 else -np.inf, 0.0)
    amps = np.exp(-magnitude * magnitude / 2.0 + log_mag - 0.5 * log_fact).astype(complex)
    if magnitude > 0:
        phase = alpha / magnitude
        amps *= phase**n
    deficit = 1.0 - float(np.vdot(amps, amps).real)
    if deficit > FOCK_TAIL_TOLERANCE:
        raise KeyRateDomainError(
            f"Fock cutoff {n_max} leaves norm deficit {deficit:.2e} for |alpha| = {magnitude}"
        )
    return amps


def lowering_operator(n_max: int) -> np.ndarray:
    op = np.zeros((n_max, n_max), dtype=complex)
    ns = np.arange(1, n_max)
    op[ns - 1, ns] = np.sqrt(ns)
    return op


@dataclass(frozen=True)
class FockOperatorSet:
    """Truncated average state of the constellation with its square root,
    pseudo-inverse square root, and the lowering operator."""

    tau: np.ndarray
    tau_sqrt: np.ndarray
    tau_inv_sqrt: np.ndarray
    lowering: np.ndarray
    coherent_vectors: np.ndarray  # (N, n_max)
    n_max: int
    support_dim: int


def build_tau(constellation: Constellation, n_max: int | None = None) -> FockOperatorSet:
    """Average state tau = (1/N) sum_k |alpha_k><alpha_k| and its matrix
    functions via eigendecomposition (eigenvalues floored at zero; the
    inverse square root acts on the support only)."""
    if n_max is None:
        n_max = choose_fock_cutoff(constellation.amplitude)
    points = constellation.points
    vectors = np.stack([coherent_state_fock(complex(a), n_max) for a in points])
    tau = (vectors.conj()[:, None, :] * vectors[:, :, None]).sum(axis=0) / points.size

    trace_deficit = abs(1.0 - float(np.trace(tau).real))
    if trace_deficit > 1e-10:
        raise KeyRateDomainError(
            f"Fock cutoff {n_max} too small: trace deficit {trace_deficit:.2e}"
        )
    eigenvalues, basis = np.linalg.eigh(tau)
    eigenvalues = np.where(eigenvalues > EIGENVALUE_FLOOR, eigenvalues, 0.0)
    support = eigenvalues > 0
    sqrt_vals = np.sqrt(eigenvalues)
    inv_sqrt_vals = np.zeros_like(eigenvalues)
    inv_sqrt_vals[support] = 1.0 / sqrt_vals[support]
    tau_sqrt = (basis * sqrt_vals) @ basis.conj().T
    tau_inv_sqrt = (basis * inv_sqrt_vals) @ basis.conj().T
    return FockOperatorSet(
        tau=tau,
        tau_sqrt=tau_sqrt,
        tau_inv_sqrt=tau_inv_sqrt,
        lowering=lowering_operator(n_max),
        coherent_vectors=vectors,
        n_max=n_max,
        support_dim=int(support.sum()),
    )


def correlation_term(inputs: KeyRateInputs, operators: FockOperatorSet | None = None) -> tuple[float, float]:
    """Alice-Bob correlation Z and the noise-penalty weight w."""
    if operators is None:
        operators = build_tau(inputs.constellation, inputs.fock_cutoff)
    a_op = operators.lowering
    trace = np.trace(operators.tau_sqrt @ a_op @ operators.tau_sqrt @ a_op.conj().T)
    assert abs(trace.imag) < 1e-9, f"correlation trace has imaginary residue {trace.imag}"

    dressed = operators.tau_sqrt @ a_op @ operators.tau_inv_sqrt
    number_like = dressed.conj().T @ dressed
    w = 0.0
    for vec in operators.coherent_vectors:
        mean_number = np.vdot(vec, number_like @ vec)
        mean_lower = np.vdot(vec, dressed @ vec)
        w += (mean_number.real - abs(mean_lower) ** 2) / operators.coherent_vectors.shape[0]

    t = inputs.transmittance
    z = 2.0 * math.sqrt(t) * trace.real
    penalty_sq = 2.0 * t * inputs.excess_noise * w
    if penalty_sq > 0:
        z -= math.sqrt(penalty_sq)
    return z, float(w)


# ---------------------------------------------------------------------------
# symplectic spectrum and Holevo bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumResult:
    a_term: float
    b_term: float
    c_term: float
    d_term: float
    eigenvalues: tuple[float, float, float, float, float]
    correlation: float
    penalty_weight: float


def _sqrt_clipped(value: float, label: str) -> float:
    if value < -1e-12:
        raise KeyRateDomainError(f"negative discriminant in {label}: {value}")
    return math.sqrt(max(value, 0.0))


def symplectic_spectrum(
    inputs: KeyRateInputs, correlation: float | None = None, penalty_weight: float | None = None
) -> SpectrumResult:
    """Symplectic eigenvalues of the joint and conditional covariance
    matrices in the standard heterodyne closed form."""
    if correlation is None:
        correlation, penalty_weight = correlation_term(inputs)
    v = inputs.ensemble_variance
    t = inputs.transmittance
    z = correlation
    # the closed forms below carry their transmittance factors explicitly,
    # so they consume the unattenuated correlation (the definition of Z
    # already includes sqrt(T); at the Gaussian point z_cm = sqrt(V^2-1))
    z_cm_sq = z * z / t
    chi_line = channel_added_noise(inputs)
    chi_het = detection_added_noise(inputs)
    chi_tot = total_input_noise(inputs)

    a_term = v * v + t * t * (v + chi_line) ** 2 - 2.0 * t * z_cm_sq
    b_term = (t * (v * v + v * chi_line - z_cm_sq)) ** 2
    lam1 = 0.5 * (a_term + _sqrt_clipped(a_term * a_term - 4.0 * b_term, "lambda_12"))
    lam2 = 0.5 * (a_term - _sqrt_clipped(a_term * a_term - 4.0 * b_term, "lambda_12"))

    denom = (t * (v + chi_tot)) ** 2
    sqrt_b = _sqrt_clipped(b_term, "sqrt(B)")
    c_term = (
        a_term * chi_het * chi_het
        + b_term
        + 1.0
        + 2.0 * chi_het * (v * sqrt_b + t * (v + chi_line))
        + 2.0 * t * z_cm_sq
    ) / denom
    d_term = ((v + sqrt_b * chi_het) / (t * (v + chi_tot))) ** 2
    lam3 = 0.5 * (c_term + _sqrt_clipped(c_term * c_term - 4.0 * d_term, "lambda_34"))
    lam4 = 0.5 * (c_term - _sqrt_clipped(c_term * c_term - 4.0 * d_term, "lambda_34"))

    eigenvalues = []
    for name, squared in (("lambda_1", lam1), ("lambda_2", lam2)):
        eigenvalues.append(_sqrt_clipped(squared, name))
    eigenvalues.append(_sqrt_clipped(lam3, "lambda_3"))
    eigenvalues.append(_sqrt_clipped(lam4, "lambda_4"))
    eigenvalues.append(1.0)
    for name, lam in zip(("lambda_1", "lambda_2", "lambda_3", "lambda_4"), eigenvalues):
        if lam < 1.0 - 1e-6:
            raise KeyRateDomainError(
                f"unphysical {name} = {lam:.9f} for inputs {inputs}"
            )
    eigenvalues = tuple(max(x, 1.0) for x in eigenvalues)
    return SpectrumResult(
        a_term=a_term,
        b_term=b_term,
        c_term=c_term,
        d_term=d_term,
        eigenvalues=eigenvalues,
        correlation=z,
        penalty_weight=0.0 if penalty_weight is None else penalty_weight,
    )


def bosonic_entropy(x: float) -> float:
    """G(x) = (x+1)log2(x+1) - x log2 x with G(0) = 0."""
    if x <= 0.0:
        return 0.0
    return (x + 1.0) * math.log2(x + 1.0) - x * math.log2(x)


def holevo_bound(spectrum: SpectrumResult) -> float:
    """Eavesdropper information bound from the symplectic spectrum."""
    lam = spectrum.eigenvalues
    gained = sum(bosonic_entropy((x - 1.0) / 2.0) for x in lam[:2])
    conditioned = sum(bosonic_entropy((x - 1.0) / 2.0) for x in lam[2:])
    return gained - conditioned


# ---------------------------------------------------------------------------
# key rates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KeyRateResult:
    scheme: str
    key_rate: float
    mutual_information: float
    holevo_information: float
    correlation: float
    eigenvalues: tuple[float, float, float, float, float]


def key_rate(inputs: KeyRateInputs, scheme: str = "conventional") -> KeyRateResult:
    """Asymptotic rate in bits per symbol; negative values are returned
    as-is (callers clamp for plots)."""
    if scheme not in ("conventional", "qknn"):
        raise ValueError(f"unknown scheme '{scheme}'")
    info = mutual_information(inputs)
    z, w = correlation_term(inputs)
    spectrum = symplectic_spectrum(inputs, z, w)
    holevo = holevo_bound(spectrum)
    if scheme == "conventional":
        rate = inputs.reconciliation_efficiency * info - holevo
    else:
        rate = (
            inputs.reconciliation_efficiency * inputs.classifier_auc * info
            - holevo / inputs.psk_order
        )
    return KeyRateResult(
        scheme=scheme,
        key_rate=rate,
        mutual_information=info,
        holevo_information=holevo,
        correlation=z,
        eigenvalues=spectrum.eigenvalues,
    )
