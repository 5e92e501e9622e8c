import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectrosens.errors import TrustRadiusExceeded
from spectrosens.liouvillian import (CountingField, build_hamiltonian,
                                     build_two_sided, stationary_state,
                                     trace_vector)
from spectrosens.params import from_config

small_angle = st.floats(min_value=-0.09, max_value=0.09,
                        allow_nan=False, allow_infinity=False)


def test_trace_is_left_null_vector(default_params):
    liou = build_two_sided(default_params, CountingField(0.0, 0.0))
    residual = trace_vector() @ liou.matrix
    assert np.max(np.abs(residual)) < 1e-6 * np.max(np.abs(liou.matrix))


def test_stationary_state_properties(default_params):
    liou = build_two_sided(default_params, CountingField(0.0, 0.0))
    rho = stationary_state(liou.matrix).reshape(4, 4)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(rho - rho.conj().T)) < 1e-12
    eigs = np.linalg.eigvalsh(rho)
    assert eigs.min() > -1e-12
    # stationary residual
    assert np.max(np.abs(liou.matrix @ rho.reshape(-1))) < 1e-6


def test_symmetric_rates_balance_populations():
    params = from_config({"rate_a_mhz": 1e-3, "rate_b_mhz": 1e-3,
                          "dipole_b_debye": 1.0, "detuning_b_mhz": 40.0})
    liou = build_two_sided(params, CountingField(0.0, 0.0))
    rho = stationary_state(liou.matrix).reshape(4, 4)
    pop_a = (rho[0, 0] + rho[1, 1]).real
    pop_b = (rho[2, 2] + rho[3, 3]).real
    assert pop_a == pytest.approx(pop_b, rel=1e-9)


def test_trust_radius():
    CountingField(0.05, -0.05).check()
    with pytest.raises(TrustRadiusExceeded):
        CountingField(0.2, 0.0).check()
    # complex tilts count by magnitude
    with pytest.raises(TrustRadiusExceeded):
        CountingField(-0.15j, 0.0).check()


def test_hamiltonian_hermitian_at_real_phases(default_params):
    h = build_hamiltonian(default_params, (0.3, -0.7))
    assert np.max(np.abs(h - h.conj().T)) < 1e-15 * np.max(np.abs(h))


def test_flux_scale_scales_coupling(default_params):
    h1 = build_hamiltonian(default_params, flux_scale=1.0)
    h2 = build_hamiltonian(default_params, flux_scale=np.sqrt(2.0))
    off = np.abs(h1[1, 0])
    assert np.abs(h2[1, 0]) == pytest.approx(np.sqrt(2.0) * off, rel=1e-12)
    # diagonal (detunings) untouched
    assert h2[1, 1] == h1[1, 1]


@settings(max_examples=25, deadline=None)
@given(chi1=small_angle, chi2=small_angle)
def test_conjugation_symmetry(chi1, chi2):
    """L at negated counting fields is the complex conjugate of L (real
    counting statistics: the CGF satisfies K(-chi) = K(chi)*)."""
    params = from_config({})
    plus = build_two_sided(params, CountingField(chi1, chi2))
    minus = build_two_sided(params, CountingField(-chi1, -chi2))
    scale = np.max(np.abs(plus.matrix))
    assert np.max(np.abs(minus.matrix.conj() - _swap_sides(plus.matrix))) \
        < 1e-12 * scale


def _swap_sides(matrix):
    """Complex conjugation exchanges left and right action: vec index (i,j)
    -> (j,i) on both rows and columns."""
    perm = np.arange(16).reshape(4, 4).T.reshape(-1)
    return matrix[np.ix_(perm, perm)]


@settings(max_examples=25, deadline=None)
@given(shift=st.floats(min_value=-3.0, max_value=3.0,
                       allow_nan=False, allow_infinity=False),
       chi1=small_angle, chi2=small_angle)
def test_gauge_invariance_of_spectrum(shift, chi1, chi2):
    """A common shift of both auxiliary phases is a gauge transformation:
    the spectrum of the tilted generator is unchanged."""
    params = from_config({})
    base = build_two_sided(params, CountingField(chi1, chi2))
    shifted = build_two_sided(params, CountingField(chi1, chi2),
                              phi=(shift, shift))
    ev_base = np.linalg.eigvals(base.matrix)
    ev_shift = np.linalg.eigvals(shifted.matrix)
    scale = np.max(np.abs(ev_base)) + 1.0
    # sorting complex eigenvalues is unstable for conjugate pairs, so match
    # each eigenvalue to its nearest counterpart instead
    dist = np.abs(ev_base[:, None] - ev_shift[None, :])
    assert np.max(np.min(dist, axis=1)) < 1e-8 * scale
    assert np.max(np.min(dist, axis=0)) < 1e-8 * scale
