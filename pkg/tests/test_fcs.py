import numpy as np
import pytest

from spectrosens import fcs
from spectrosens.errors import FitResidualExceeded, GapTooSmall
from spectrosens.liouvillian import CountingField, build_two_sided
from spectrosens.params import from_config


def test_dominant_eigenvalue_zero_at_chi_zero(default_params):
    liou = build_two_sided(default_params, CountingField(0.0, 0.0))
    top, gap = fcs.dominant_eigenvalue(liou)
    assert abs(top) < 1e-6
    assert gap > 0


def test_gap_threshold(default_params):
    liou = build_two_sided(default_params, CountingField(0.0, 0.0))
    _, gap = fcs.dominant_eigenvalue(liou)
    with pytest.raises(GapTooSmall):
        fcs.dominant_eigenvalue(liou, min_gap=10 * gap)


def test_finite_time_cgf_matches_eigenvalue(default_params):
    """At times long against all relaxation scales the finite-time CGF per
    unit time converges to the dominant eigenvalue."""
    gamma = default_params.molecule.decay_gamma
    tau = 1e3 / gamma
    s = 1e-3
    chi = CountingField(-1j * s, 0.0)
    cgf = fcs.cgf_finite_time(default_params, chi, tau).real / tau
    liou = build_two_sided(default_params, chi)
    top, _ = fcs.dominant_eigenvalue(liou)
    # the chemical mode (~1e3 1/s) has not fully relaxed; modest tolerance
    assert cgf == pytest.approx(top.real, rel=2e-2)


def test_cgf_rejects_bad_tau(default_params):
    with pytest.raises(ValueError):
        fcs.cgf_finite_time(default_params, CountingField(0.0, 0.0), 0.0)


def test_cross_sections_reference_values(default_params):
    """Single absorbing state at 40 MHz detuning: weak-field Lorentzian
    values, halved by the stationary occupation of the dark state."""
    s1, s2 = fcs.cross_sections(default_params)
    der, mol = default_params.derived, default_params.molecule
    denom = 4 * mol.detuning_a**2 + mol.decay_gamma**2
    s_plus_a = 0.5 * mol.decay_gamma * der.beta_sq_a / denom
    s_minus_a = mol.detuning_a * der.beta_sq_a / denom
    assert s1 + s2 == pytest.approx(0.5 * s_plus_a, rel=1e-3)
    assert s1 - s2 == pytest.approx(0.5 * s_minus_a, rel=1e-3)


def test_cross_section_parity():
    """S_plus is even in the detuning, S_minus is odd."""
    plus, minus = [], []
    for eps in (-30.0, 30.0):
        params = from_config({"detuning_a_mhz": eps})
        s1, s2 = fcs.cross_sections(params)
        plus.append(s1 + s2)
        minus.append(s1 - s2)
    assert plus[0] == pytest.approx(plus[1], rel=1e-6)
    assert minus[0] == pytest.approx(-minus[1], rel=1e-6)


def test_cross_sections_scale_with_dipole_squared(default_params):
    doubled = default_params.with_molecule(
        dipole_a=2 * default_params.molecule.dipole_a)
    s1, s2 = fcs.cross_sections(default_params)
    d1, d2 = fcs.cross_sections(doubled)
    assert d1 + d2 == pytest.approx(4 * (s1 + s2), rel=1e-4)


def test_diffusion_matrix_symmetric_psd(default_params):
    d = fcs.diffusion_matrix(default_params,
                             default_params.derived.photon_flux_j0)
    assert d[0, 1] == pytest.approx(d[1, 0], rel=1e-9)
    assert np.all(np.linalg.eigvalsh(d) > 0)


def test_diffusion_matrix_rejects_bad_flux(default_params):
    with pytest.raises(ValueError):
        fcs.diffusion_matrix(default_params, 0.0)


def test_fit_diffusion_expansion(default_params):
    exp = fcs.fit_diffusion_expansion(default_params)
    assert exp.fit_residual < 1e-3
    vp, vm = np.array([1.0, 1.0]), np.array([1.0, -1.0])
    s1, s2 = fcs.cross_sections(default_params)
    # linear coefficient = twice the absorption cross section, both channels
    assert vp @ exp.D1 @ vp == pytest.approx(2 * (s1 + s2), rel=1e-2)
    assert vm @ exp.D1 @ vm == pytest.approx(2 * (s1 + s2), rel=1e-2)
    # chemical noise dominates the difference channel at slow rates
    assert vm @ exp.D2 @ vm > 10 * abs(vp @ exp.D2 @ vp)


def test_fit_residual_guard(default_params):
    j0 = default_params.derived.photon_flux_j0
    noisy = lambda p, j: fcs.diffusion_rate(p, j) * (1 + 0.05 * np.sin(j / j0 * 37))
    with pytest.raises(FitResidualExceeded):
        fcs.fit_diffusion_expansion(default_params, rate_fn=noisy)


def test_fit_requires_enough_points(default_params):
    j0 = default_params.derived.photon_flux_j0
    with pytest.raises(ValueError):
        fcs.fit_diffusion_expansion(default_params, J_grid=[j0, j0 / 2])


def test_strong_probe_warning():
    params = from_config({"power_mw": 1e4})
    with pytest.warns(UserWarning, match="weak-probe"):
        fcs.cross_sections(params)
