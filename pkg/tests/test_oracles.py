import math

import numpy as np
import pytest

from spectrosens import adiabatic, oracles
from spectrosens.errors import StencilUnstable
from spectrosens.params import from_config


def test_quadrature_zero_diffusion(default_params):
    s_plus, z = 5e-17, 0.01
    result = oracles.quadrature_covariance(default_params,
                                           lambda j: np.zeros((2, 2)),
                                           s_plus, z)
    rho = default_params.sample.density_rho_m
    expected = default_params.derived.n_p0 * math.exp(-2 * rho * s_plus * z)
    assert np.allclose(result, expected * np.eye(2), rtol=1e-9)


def test_quadrature_constant_diffusion(default_params):
    """Flux-independent per-molecule rate: analytic exponential integral."""
    s_plus = 5e-17
    rho = default_params.sample.density_rho_m
    z = 1.0 / (rho * s_plus)
    const = np.array([[3.0, 1.0], [1.0, 2.0]])  # 1/s per molecule
    result = oracles.quadrature_covariance(default_params,
                                           lambda j: const, s_plus, z)
    der, laser = default_params.derived, default_params.laser
    line = rho * der.beam_area * laser.measurement_time
    att2 = math.exp(-2 * rho * s_plus * z)
    expected = (der.n_p0 * att2 * np.eye(2)
                + line * const * (1 - att2) / (2 * rho * s_plus))
    assert np.allclose(result, expected, rtol=1e-8)


def test_mc_determinism(default_params):
    cfg = oracles.McConfig(n_trajectories=1000, seed=7)
    r1, e1 = oracles.telegraph_mc_diffusion(default_params, cfg)
    r2, e2 = oracles.telegraph_mc_diffusion(default_params, cfg)
    assert np.array_equal(r1, r2)
    assert np.array_equal(e1, e2)
    r3, _ = oracles.telegraph_mc_diffusion(
        default_params, oracles.McConfig(n_trajectories=1000, seed=8))
    assert not np.array_equal(r1, r3)


def test_mc_matches_analytic_chemical_term(default_params):
    cfg = oracles.McConfig(n_trajectories=4000, seed=3)
    rate, stderr = oracles.telegraph_mc_diffusion(default_params, cfg)
    analytic = adiabatic.chemical_rate_term(
        default_params, default_params.derived.photon_flux_j0,
        method="weak_field")
    assert np.all(np.abs(rate - analytic) <= 3 * stderr)


def test_mc_single_state_no_chemical_noise():
    """All transfer into A: the molecule never leaves, covariance vanishes."""
    params = from_config({"rate_a_mhz": 1e-4, "rate_b_mhz": 0.0})
    cfg = oracles.McConfig(n_trajectories=1000, seed=5)
    rate, stderr = oracles.telegraph_mc_diffusion(params, cfg)
    assert np.allclose(rate, 0.0)
    assert np.allclose(stderr, 0.0)


def test_mc_horizon_stationarity(default_params):
    t_r = adiabatic.reaction_time(default_params)
    r1, e1 = oracles.telegraph_mc_diffusion(
        default_params,
        oracles.McConfig(n_trajectories=3000, seed=11, horizon=20 * t_r))
    r2, e2 = oracles.telegraph_mc_diffusion(
        default_params,
        oracles.McConfig(n_trajectories=3000, seed=11, horizon=40 * t_r))
    err = np.sqrt(e1**2 + e2**2)
    assert np.all(np.abs(r1 - r2) <= 4 * err)


def test_mc_config_validation(default_params):
    t_r = adiabatic.reaction_time(default_params)
    with pytest.raises(ValueError):
        oracles.McConfig(n_trajectories=10).resolve(t_r)
    with pytest.raises(ValueError):
        oracles.McConfig(dt=t_r).resolve(t_r)
    with pytest.raises(ValueError):
        oracles.McConfig(horizon=t_r).resolve(t_r)


def test_fd_polynomial():
    value, err = oracles.fd_pipeline_derivative(lambda x: x**2, 3.0)
    assert value == pytest.approx(6.0, abs=1e-9)


def test_fd_constant():
    value, _ = oracles.fd_pipeline_derivative(lambda x: 42.0, 3.0)
    assert abs(value) < 1e-12


def test_fd_attenuated_signal(default_params):
    """Transmitted photon number at the optimal depth, as a function of the
    density with the depth re-optimized: d/d rho [n_p0/e * rho^0] = 0; at
    fixed depth the analytic slope is -n_p0/(e rho)."""
    rho = default_params.sample.density_rho_m
    n_p0 = default_params.derived.n_p0
    s_plus = 5e-17
    z = 1.0 / (rho * s_plus)

    def f(rho_val):
        return n_p0 * math.exp(-rho_val * s_plus * z)

    value, _ = oracles.fd_pipeline_derivative(f, rho)
    assert value == pytest.approx(-n_p0 / (math.e * rho), rel=1e-6)


def test_fd_unstable():
    rng_like = lambda x: math.sin(1e12 * x)  # effectively noise at the scale
    with pytest.raises(StencilUnstable):
        oracles.fd_pipeline_derivative(rng_like, 1.0, rtol=1e-12)
