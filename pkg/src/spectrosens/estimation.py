"""Detector means, signal vectors, Cramér-Rao sensitivity bounds, the naive
photon-shot-noise estimate, and regime classification.

All sensitivities are reported as relative density precision Delta(rho)/rho in
the SensitivityReport; the individual bound functions return absolute
Delta(rho) in m^-3.

Sign conventions: derivatives with respect to the density are carried signed
(attenuation makes d n_p / d rho negative); the quadratic bounds are
sign-invariant so reported sensitivities are unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSignal, SingularCovariance
from .params import ModelParams
from .propagation import V_MINUS, V_PLUS, propagate_mean, z_optimal

SIGNAL_FLOOR = 1e-300
CONDITION_LIMIT = 1e12

REGIME_PSNL = "PSNL"
REGIME_CL = "CL"
REGIME_IR = "IR"
REGIME_UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class SensitivityReport:
    rel_full: float
    rel_intensity: float
    rel_phase: float
    rel_psn: float
    regime: str
    diagnostics: dict = field(default_factory=dict)


def homodyne_means(n_plus: float, phase: float, phase_lo: float):
    """Mean counts of the two balanced-homodyne output ports.

    The port splitting is cos^2/sin^2 of (pi/4 + (phase - phase_lo)/2), so the
    sum rule n1 + n2 = n_plus holds identically.
    """
    if n_plus < 0:
        raise ValueError("n_plus must be non-negative")
    angle = np.pi / 4.0 + (phase - phase_lo) / 2.0
    return n_plus * np.cos(angle) ** 2, n_plus * np.sin(angle) ** 2


def mean_derivatives(params: ModelParams, s_plus: float, s_minus: float,
                     z: float | None = None):
    """(n_p, d n_p/d rho, d phase/d rho) at fixed depth z (default z_opt)."""
    rho = params.sample.density_rho_m
    if z is None:
        z = z_optimal(params, s_plus)
    n_p, _ = propagate_mean(params, s_plus, s_minus, z)
    return n_p, -s_plus * z * n_p, s_minus * z


def signal_vector(params: ModelParams, s_plus: float, s_minus: float,
                  z: float | None = None) -> np.ndarray:
    """Density derivative of the two homodyne port means at balanced LO.

    Differentiating the port means gives equal weight 1/2 to the intensity
    (1,1) channel and the phase (1,-1) channel; the projections onto the
    sum/difference vectors recover the full d n_p/d rho and n_p d phase/d rho.
    """
    n_p, dn_drho, dphi_drho = mean_derivatives(params, s_plus, s_minus, z)
    vec = 0.5 * dn_drho * V_PLUS - 0.5 * n_p * dphi_drho * V_MINUS
    if np.max(np.abs(vec)) < SIGNAL_FLOOR:
        raise DegenerateSignal("signal vector numerically zero")
    return vec


def cramer_rao_full(signal: np.ndarray, sigma2: np.ndarray) -> float:
    """Gaussian Cramér-Rao bound using both detector channels jointly."""
    sigma2 = np.asarray(sigma2, dtype=float)
    if np.linalg.cond(sigma2) > CONDITION_LIMIT:
        raise SingularCovariance(
            f"covariance condition number exceeds {CONDITION_LIMIT:.0e}")
    fisher = float(signal @ np.linalg.solve(sigma2, signal))
    if fisher <= 0:
        raise DegenerateSignal("non-positive Fisher information")
    return 1.0 / math.sqrt(fisher)


def cramer_rao_intensity(params: ModelParams, sigma_plus_sq: float,
                         s_plus: float, s_minus: float,
                         z: float | None = None) -> float:
    """Sensitivity of an intensity-only (direct photodetection) readout.

    Direct detection of the transmitted beam does not mix in the local
    oscillator, so its vacuum contribution n_p(z) is removed from the
    sum-channel variance before applying the bound.
    """
    n_p, dn_drho, _ = mean_derivatives(params, s_plus, s_minus, z)
    if abs(dn_drho) < SIGNAL_FLOOR:
        raise DegenerateSignal("intensity signal derivative is zero")
    variance = sigma_plus_sq - n_p
    if variance <= 0:
        raise SingularCovariance("non-positive direct-detection variance")
    return math.sqrt(variance) / abs(dn_drho)


def cramer_rao_phase(params: ModelParams, sigma_minus_sq: float,
                     s_plus: float, s_minus: float,
                     z: float | None = None) -> float:
    """Sensitivity of a phase-only (difference-channel) readout."""
    n_p, _, dphi_drho = mean_derivatives(params, s_plus, s_minus, z)
    slope = n_p * dphi_drho
    if abs(slope) < SIGNAL_FLOOR:
        raise DegenerateSignal("phase signal derivative is zero")
    if sigma_minus_sq <= 0:
        raise SingularCovariance("non-positive difference-channel variance")
    return math.sqrt(sigma_minus_sq) / abs(slope)


def psn_sigma_sq(params: ModelParams, s_plus: float,
                 z: float | None = None) -> float:
    """Photon-shot-noise variance of either homodyne combination, 2 n_p(z)."""
    n_p, _, _ = mean_derivatives(params, s_plus, 0.0, z)
    return 2.0 * n_p


def psn_estimate(params: ModelParams, s_plus: float, s_minus: float,
                 z: float | None = None) -> float:
    """Naive sensitivity estimate assuming pure photon shot noise.

    Uses the Gaussian bound with the isotropic shot covariance n_p(z) * 1
    (equivalently sigma_PSN^2 = 2 n_p in each +/- combination); when one
    channel dominates this reduces to sigma_PSN over the better channel's
    slope, and it stays meaningful when both channels contribute.
    """
    signal = signal_vector(params, s_plus, s_minus, z)
    n_p, _, _ = mean_derivatives(params, s_plus, 0.0, z)
    slope_sq = (float(V_PLUS @ signal) ** 2 + float(V_MINUS @ signal) ** 2)
    if slope_sq < SIGNAL_FLOOR:
        raise DegenerateSignal("both channel projections are zero")
    return math.sqrt(2.0 * n_p / slope_sq)


def classify_regime(sigma_plus_ratio: float, sigma_minus_ratio: float,
                    delta: float = 0.1, theta: float = 2.0) -> str:
    """Label the noise regime from the variance-to-shot-noise ratios."""
    near_shot = 1.0 + delta
    if sigma_plus_ratio < near_shot and sigma_minus_ratio < near_shot:
        return REGIME_PSNL
    if sigma_plus_ratio > theta and sigma_minus_ratio > theta:
        return REGIME_CL
    if sigma_plus_ratio < near_shot and sigma_minus_ratio > theta:
        return REGIME_IR
    return REGIME_UNCLASSIFIED


def sensitivity_report(params: ModelParams, s_plus: float, s_minus: float,
                       sigma2: np.ndarray, z: float | None = None,
                       delta: float = 0.1, theta: float = 2.0) -> SensitivityReport:
    """Assemble all relative sensitivity bounds and the regime label."""
    rho = params.sample.density_rho_m
    signal = signal_vector(params, s_plus, s_minus, z)
    sigma_plus_sq = float(V_PLUS @ sigma2 @ V_PLUS)
    sigma_minus_sq = float(V_MINUS @ sigma2 @ V_MINUS)
    psn = psn_sigma_sq(params, s_plus, z)
    rel_full = cramer_rao_full(signal, sigma2) / rho
    rel_intensity = cramer_rao_intensity(
        params, sigma_plus_sq, s_plus, s_minus, z) / rho
    try:
        rel_phase = cramer_rao_phase(
            params, sigma_minus_sq, s_plus, s_minus, z) / rho
    except DegenerateSignal:
        rel_phase = math.inf
    rel_psn = psn_estimate(params, s_plus, s_minus, z) / rho
    ratios = (sigma_plus_sq / psn, sigma_minus_sq / psn)
    return SensitivityReport(
        rel_full=rel_full,
        rel_intensity=rel_intensity,
        rel_phase=rel_phase,
        rel_psn=rel_psn,
        regime=classify_regime(*ratios, delta=delta, theta=theta),
        diagnostics={"sigma_plus_ratio": ratios[0],
                     "sigma_minus_ratio": ratios[1]},
    )
