"""Key-rate checks against independent oracles.

The heavy oracle here is a from-scratch three-mode covariance-matrix model
of the trusted heterodyne receiver (EPR source, noisy lossy channel,
detector beamsplitter fed by an EPR ancilla, heterodyne conditioning). It
shares no code with the closed forms under test: symplectic eigenvalues
come from |eig(i*Omega*sigma)|.
"""
import math

import numpy as np
import pytest

from qknn_cvqkd import secrate
from qknn_cvqkd.optics import Constellation

FIG11 = dict(
    excess_noise=0.01,
    detector_efficiency=0.6,
    electronic_noise=0.05,
    reconciliation_efficiency=0.98,
)


def make_inputs(vm=0.38, loss_db=2.0, n=8, auc=1.0, **overrides):
    params = dict(FIG11)
    params.update(overrides)
    return secrate.KeyRateInputs(
        modulation_variance=vm,
        transmittance=10.0 ** (-loss_db / 10.0),
        psk_order=n,
        classifier_auc=auc,
        **params,
    )


# ---------------------------------------------------------------------------
# independent covariance-matrix oracle
# ---------------------------------------------------------------------------

def _symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    n = sigma.shape[0] // 2
    omega = np.zeros((2 * n, 2 * n))
    for i in range(n):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    spectrum = np.abs(np.linalg.eigvals(1j * omega @ sigma))
    return np.sort(spectrum)[::2]  # each eigenvalue appears twice


def covariance_oracle(inputs: secrate.KeyRateInputs, z_printed: float) -> np.ndarray:
    """All five symplectic eigenvalues from explicit covariance matrices."""
    v = inputs.ensemble_variance
    t = inputs.transmittance
    eta = inputs.detector_efficiency
    v_el = inputs.electronic_noise
    iden = np.eye(2)
    sz = np.diag([1.0, -1.0])
    z_cm = z_printed / math.sqrt(t)
    v_bob = t * (v + 1.0 / t - 1.0 + inputs.excess_noise)

    joint = np.zeros((4, 4))
    joint[:2, :2] = v * iden
    joint[2:, 2:] = v_bob * iden
    joint[:2, 2:] = joint[2:, :2] = math.sqrt(t) * z_cm * sz
    lam12 = _symplectic_eigenvalues(joint)

    # modes: A, B, F0, G with (F0, G) an EPR pair of variance v_d
    v_d = 1.0 + 2.0 * v_el / (1.0 - eta)
    sigma = np.zeros((8, 8))
    sigma[:2, :2] = v * iden
    sigma[2:4, 2:4] = v_bob * iden
    sigma[:2, 2:4] = sigma[2:4, :2] = math.sqrt(t) * z_cm * sz
    sigma[4:6, 4:6] = sigma[6:8, 6:8] = v_d * iden
    coupling = math.sqrt(v_d * v_d - 1.0)
    sigma[4:6, 6:8] = sigma[6:8, 4:6] = coupling * sz

    mixer = np.eye(8)
    se, ce = math.sqrt(eta), math.sqrt(1.0 - eta)
    mixer[2:4, 2:4] = se * iden
    mixer[2:4, 4:6] = ce * iden
    mixer[4:6, 2:4] = -ce * iden
    mixer[4:6, 4:6] = se * iden
    sigma = mixer @ sigma @ mixer.T

    keep = [0, 1, 4, 5, 6, 7]
    measured = [2, 3]
    s_keep = sigma[np.ix_(keep, keep)]
    s_cross = sigma[np.ix_(keep, measured)]
    s_meas = sigma[np.ix_(measured, measured)]
    conditional = s_keep - s_cross @ np.linalg.inv(s_meas + np.eye(2)) @ s_cross.T
    lam345 = _symplectic_eigenvalues(conditional)
    return np.sort(np.concatenate([lam12, lam345]))[::-1]


@pytest.mark.parametrize(
    "vm,loss_db,n",
    [(0.33, 2.0, 4), (0.38, 2.0, 8), (0.38, 4.0, 8), (0.38, 15.0, 8), (1.5, 10.0, 8), (0.1, 0.5, 4)],
)
def test_spectrum_matches_covariance_oracle(vm, loss_db, n):
    inputs = make_inputs(vm=vm, loss_db=loss_db, n=n)
    z, w = secrate.correlation_term(inputs)
    spectrum = secrate.symplectic_spectrum(inputs, z, w)
    oracle = covariance_oracle(inputs, z)
    closed = np.sort(np.array(spectrum.eigenvalues))[::-1]
    assert np.abs(closed - oracle).max() < 1e-8


def test_last_eigenvalue_is_exactly_one():
    spectrum = secrate.symplectic_spectrum(make_inputs())
    assert spectrum.eigenvalues[4] == 1.0
    # the covariance model produces the unit eigenvalue too
    inputs = make_inputs(vm=0.7, loss_db=6.0)
    z, _ = secrate.correlation_term(inputs)
    assert covariance_oracle(inputs, z).min() == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------------------
# mutual information
# ---------------------------------------------------------------------------

def test_mutual_information_clean_channel_closed_form():
    inputs = secrate.KeyRateInputs(
        modulation_variance=0.38, transmittance=1.0, excess_noise=1.0,
        detector_efficiency=1.0, electronic_noise=0.0,
        reconciliation_efficiency=1.0, psk_order=8,
    )
    # chi_tot = 1 - 1 + 2 = 2
    assert secrate.total_input_noise(inputs) == pytest.approx(2.0, abs=1e-15)
    assert secrate.mutual_information(inputs) == pytest.approx(
        math.log2((1.38 + 2.0) / 3.0), abs=1e-15
    )


def test_mutual_information_vanishes_without_signal():
    assert secrate.mutual_information(make_inputs(vm=1e-12)) < 1e-11


def test_mutual_information_independent_recompute():
    inputs = make_inputs(loss_db=2.0)
    t = 10.0 ** (-0.2)
    chi = 0.01 - 1.0 + 2.0 * 1.05 / (0.6 * t)
    expected = math.log2((1.38 + chi) / (1.0 + chi))
    assert secrate.mutual_information(inputs) == pytest.approx(expected, abs=1e-9)


def test_inputs_validation_rejects_unphysical_parameters():
    # chi_tot = xi - 1 + 2(1+v_el)/(eta*T) >= 1 for physical inputs, so the
    # mutual-information domain guard is unreachable from valid inputs;
    # validation happens at construction instead
    good = dict(
        modulation_variance=0.38, transmittance=0.5, excess_noise=0.01,
        detector_efficiency=0.6, electronic_noise=0.05,
        reconciliation_efficiency=0.98, psk_order=8,
    )
    for field, value in [
        ("modulation_variance", -1.0),
        ("transmittance", 0.0),
        ("transmittance", 1.5),
        ("excess_noise", -0.1),
        ("detector_efficiency", 0.0),
        ("reconciliation_efficiency", 1.5),
        ("psk_order", 0),
        ("classifier_auc", 1.2),
    ]:
        with pytest.raises(secrate.KeyRateDomainError):
            secrate.KeyRateInputs(**{**good, field: value})


# ---------------------------------------------------------------------------
# Fock-space pieces
# ---------------------------------------------------------------------------

def test_vacuum_fock_amplitudes():
    amps = secrate.coherent_state_fock(0.0, 8)
    assert np.abs(amps - np.eye(8)[0]).max() == 0.0


def test_fock_norm_deficit_small_at_cutoff_20():
    amps = secrate.coherent_state_fock(math.sqrt(0.165), 20)
    deficit = 1.0 - float(np.vdot(amps, amps).real)
    # independent tail bound: Poisson mass beyond the cutoff
    tail = secrate.coherent_tail_mass(0.165, 20)
    assert deficit <= tail + 1e-15
    assert deficit < 1e-12


def test_fock_mean_photon_number():
    alpha = 0.3 + 0.4j
    n_max = 24
    amps = secrate.coherent_state_fock(alpha, n_max)
    number = np.arange(n_max)
    mean = float((np.abs(amps) ** 2 * number).sum())
    assert mean == pytest.approx(abs(alpha) ** 2, abs=1e-10)


def test_fock_insufficient_cutoff_raises():
    with pytest.raises(secrate.KeyRateDomainError):
        secrate.coherent_state_fock(2.0, 4)


def test_tau_single_point_is_pure():
    ops = secrate.build_tau(Constellation(1, 0.38))
    assert np.abs(ops.tau @ ops.tau - ops.tau).max() < 1e-12
    assert np.abs(ops.tau_sqrt - ops.tau).max() < 1e-10


def test_tau_square_root_squares_back():
    ops = secrate.build_tau(Constellation(8, 0.38))
    assert np.abs(ops.tau_sqrt @ ops.tau_sqrt - ops.tau).max() < 1e-8
    assert np.abs(np.trace(ops.tau).real - 1.0) < 1e-10
    assert np.abs(ops.tau - ops.tau.conj().T).max() < 1e-14


def test_tau_vacuum_projector_for_zero_amplitude():
    ops = secrate.build_tau(Constellation(4, 1e-20), n_max=16)
    expected = np.zeros((16, 16))
    expected[0, 0] = 1.0
    assert np.abs(ops.tau - expected).max() < 1e-10


def test_tau_qpsk_block_structure_mod_four():
    ops = secrate.build_tau(Constellation(4, 0.33))
    n = ops.n_max
    rows, cols = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    off_block = (rows - cols) % 4 != 0
    assert np.abs(ops.tau[off_block]).max() < 1e-14


# ---------------------------------------------------------------------------
# correlation term
# ---------------------------------------------------------------------------

def test_zero_excess_noise_drops_penalty():
    clean = make_inputs(excess_noise=0.0)
    ops = secrate.build_tau(clean.constellation)
    z, _ = secrate.correlation_term(clean, ops)
    trace = np.trace(ops.tau_sqrt @ ops.lowering @ ops.tau_sqrt @ ops.lowering.conj().T)
    assert z == pytest.approx(2.0 * math.sqrt(clean.transmittance) * trace.real, abs=1e-12)


def test_correlation_vanishes_with_transmittance():
    tiny = make_inputs(loss_db=80.0)
    z, _ = secrate.correlation_term(tiny)
    assert abs(z) < 0.02


def test_thermal_state_recovers_gaussian_correlation():
    # replacing tau by a thermal state of the same mean photon number must
    # reproduce sqrt(T*(V^2-1)) closely at small modulation variance
    for vm in (0.1, 0.3, 0.5):
        inputs = make_inputs(vm=vm, excess_noise=0.0)
        n_max = 64
        mean = vm / 2.0
        weights = (mean / (1.0 + mean)) ** np.arange(n_max) / (1.0 + mean)
        tau = np.diag(weights).astype(complex)
        basis = np.eye(n_max)
        sqrt_tau = np.diag(np.sqrt(weights)).astype(complex)
        inv_sqrt = np.diag(1.0 / np.sqrt(weights)).astype(complex)
        ops = secrate.FockOperatorSet(
            tau=tau, tau_sqrt=sqrt_tau, tau_inv_sqrt=inv_sqrt,
            lowering=secrate.lowering_operator(n_max),
            coherent_vectors=basis[:1].astype(complex), n_max=n_max, support_dim=n_max,
        )
        z, _ = secrate.correlation_term(inputs, ops)
        gauss = math.sqrt(inputs.transmittance * (inputs.ensemble_variance**2 - 1.0))
        assert abs(z - gauss) / gauss < 0.02


def test_discrete_correlation_stays_below_gaussian_bound():
    for vm in (0.1, 0.38, 1.0, 2.0):
        inputs = make_inputs(vm=vm, excess_noise=0.0)
        z, _ = secrate.correlation_term(inputs)
        gauss = math.sqrt(inputs.transmittance * (inputs.ensemble_variance**2 - 1.0))
        assert 0.0 < z <= gauss + 1e-12


def test_fock_cutoff_convergence():
    inputs = make_inputs(vm=0.38)
    auto = secrate.choose_fock_cutoff(inputs.coherent_amplitude)
    z_auto, _ = secrate.correlation_term(
        inputs, secrate.build_tau(inputs.constellation, auto)
    )
    z_more, _ = secrate.correlation_term(
        inputs, secrate.build_tau(inputs.constellation, auto + 10)
    )
    assert abs(z_auto - z_more) < 1e-8


# ---------------------------------------------------------------------------
# spectrum and Holevo bound
# ---------------------------------------------------------------------------

def test_epr_limit_gives_unit_spectrum_and_zero_holevo():
    inputs = secrate.KeyRateInputs(
        modulation_variance=0.38, transmittance=1.0, excess_noise=0.0,
        detector_efficiency=1.0, electronic_noise=0.0,
        reconciliation_efficiency=1.0, psk_order=8,
    )
    v = inputs.ensemble_variance
    z_gauss = math.sqrt(v * v - 1.0)
    spectrum = secrate.symplectic_spectrum(inputs, z_gauss, 0.0)
    assert np.abs(np.array(spectrum.eigenvalues) - 1.0).max() < 1e-9
    assert secrate.holevo_bound(spectrum) == pytest.approx(0.0, abs=1e-9)


def test_bosonic_entropy_values():
    assert secrate.bosonic_entropy(0.0) == 0.0
    assert secrate.bosonic_entropy(1.0) == pytest.approx(2.0, abs=1e-15)


def test_eight_psk_leaks_more_than_qpsk_conventionally():
    for loss_db in (1.0, 2.0, 5.0, 10.0):
        hol4 = secrate.key_rate(make_inputs(vm=0.33, loss_db=loss_db, n=4)).holevo_information
        hol8 = secrate.key_rate(make_inputs(vm=0.38, loss_db=loss_db, n=8)).holevo_information
        assert hol8 > hol4


def test_unphysical_parameters_raise_named_error():
    inputs = make_inputs()
    with pytest.raises(secrate.KeyRateDomainError, match="lambda"):
        secrate.symplectic_spectrum(inputs, 10.0, 0.0)  # correlation above EPR bound


# ---------------------------------------------------------------------------
# key rates
# ---------------------------------------------------------------------------

def test_qknn_reduces_to_conventional_for_unit_auc_single_point():
    inputs = make_inputs(n=1, vm=0.38, auc=1.0)
    conventional = secrate.key_rate(inputs, "conventional")
    assisted = secrate.key_rate(inputs, "qknn")
    assert assisted.key_rate == pytest.approx(conventional.key_rate, abs=1e-12)


def test_zero_holevo_leaves_beta_times_information():
    inputs = secrate.KeyRateInputs(
        modulation_variance=0.38, transmittance=1.0, excess_noise=0.0,
        detector_efficiency=1.0, electronic_noise=0.0,
        reconciliation_efficiency=0.98, psk_order=8,
    )
    result = secrate.key_rate(inputs, "conventional")
    if result.holevo_information < 1e-9:
        assert result.key_rate == pytest.approx(
            0.98 * result.mutual_information, abs=1e-9
        )
    else:  # residual leak from the discrete-modulation penalty
        assert result.key_rate == pytest.approx(
            0.98 * result.mutual_information - result.holevo_information, abs=1e-12
        )


def test_rates_decrease_with_loss():
    # raw negative rates creep back toward zero at high loss (both terms
    # vanish), so monotonicity is a property of the plotted, clamped rate:
    # strictly decreasing while positive, never increasing after clamping
    for scheme, auc in (("conventional", 1.0), ("qknn", 0.95)):
        rates = [
            secrate.key_rate(make_inputs(loss_db=loss, auc=auc), scheme).key_rate
            for loss in np.arange(0.0, 25.1, 1.0)
        ]
        clamped = [max(r, 0.0) for r in rates]
        assert all(a >= b for a, b in zip(clamped, clamped[1:]))
        positive = [r for r in rates if r > 0]
        assert all(a > b for a, b in zip(positive, positive[1:]))
        assert positive  # the grid starts in the operating regime


def test_assisted_scheme_dominates_eight_psk():
    for loss in np.arange(0.0, 25.1, 1.0):
        inputs = make_inputs(loss_db=float(loss), auc=0.8)
        conv = secrate.key_rate(inputs, "conventional").key_rate
        assisted = secrate.key_rate(inputs, "qknn").key_rate
        assert assisted > conv


def test_conventional_has_interior_optimum_but_assisted_rises():
    vms = np.arange(0.05, 2.0001, 0.05)
    for n, vm_cap in ((4, 1.0), (8, 1.0)):
        rates = np.array(
            [secrate.key_rate(make_inputs(vm=float(v), n=n)).key_rate for v in vms]
        )
        window = rates[vms <= vm_cap]
        peak = int(window.argmax())
        assert 0 < peak < window.size - 1
    assisted = np.array(
        [
            secrate.key_rate(make_inputs(vm=float(v), n=8, auc=0.99), "qknn").key_rate
            for v in vms
        ]
    )
    assert np.all(np.diff(assisted) > 0)


def test_eve_information_reduction_factor():
    result = secrate.key_rate(make_inputs(loss_db=3.0), "conventional")
    assert result.holevo_information > 0
    assert result.holevo_information / 8 < result.holevo_information
