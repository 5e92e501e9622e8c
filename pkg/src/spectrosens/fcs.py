"""Counting statistics from the tilted superoperator: cross sections (first
cumulants) and the diffusion matrix (second cumulants).

Conventions frozen here:

* Cumulants are taken by analytic continuation chi_k -> -i s_k with real s,
  so the cumulant-generating function is a real moment-generating function
  and plain d/ds derivatives apply.
* Physical detector labels are the reverse of the counting-field indices
  (detector 1 <-> s_2); this makes S_minus = S_1 - S_2 positive at positive
  detuning, consistent with the homodyne-mean labels.
* The diffusion matrix is the full detector-flux covariance: the molecular
  eigenvalue curvature plus the per-detector partition shot noise of
  absorption, D_kl = d2(lambda)/ds_k ds_l + delta_kl * (absorbed flux)/2.
  The shot term is what keeps a coherent input coherent under the variance
  flow (linear coefficient 2*S_plus instead of S_plus).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (DifferentiationUnstable, FitResidualExceeded, GapTooSmall,
                     PropagationOverflow)
from .liouvillian import (CountingField, CountingLiouvillian, build_two_sided,
                          stationary_state, trace_vector)
from .params import ModelParams


@dataclass(frozen=True)
class CumulantSet:
    s1: float                       # m^2, detector-1 removal cross section
    s2: float                       # m^2
    s_plus: float                   # m^2, absorption
    s_minus: float                  # m^2, phase shift
    D: np.ndarray = field(repr=False)   # 2x2 diffusion matrix at flux J
    J: float = 0.0                  # m^-2 s^-1


@dataclass(frozen=True)
class DiffusionExpansion:
    D1: np.ndarray = field(repr=False)  # 2x2, m^2 (order-J coefficient)
    D2: np.ndarray = field(repr=False)  # 2x2, m^4 s (order-J^2 coefficient)
    fit_residual: float = 0.0


def _swap(matrix: np.ndarray) -> np.ndarray:
    """Map counting-index ordering to physical detector ordering."""
    return matrix[::-1, ::-1]


def dominant_eigenvalue(liou: CountingLiouvillian, min_gap: float = 0.0):
    """Eigenvalue of maximal real part and the spectral gap to the runner-up.

    For the real tilts used throughout (|s| well inside the trust radius) the
    max-real-part branch coincides with the branch continuously connected to
    lambda(0) = 0; the property tests check this against eigenvector-overlap
    tracking.
    """
    values = np.linalg.eigvals(liou.matrix)
    order = np.argsort(-values.real)
    top, second = values[order[0]], values[order[1]]
    gap = top.real - second.real
    if gap < min_gap:
        raise GapTooSmall(
            f"spectral gap {gap:.3e} below threshold {min_gap:.3e}")
    return top, gap


def cgf_finite_time(params: ModelParams, chi: CountingField, tau: float,
                    flux_scale: float = 1.0) -> complex:
    """Finite-time cumulant-generating function from the tilted propagator,
    started in the stationary state of the untilted generator."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    l0 = build_two_sided(params, CountingField(0.0, 0.0), flux_scale=flux_scale)
    rho_ss = stationary_state(l0.matrix)
    l_chi = build_two_sided(params, chi, flux_scale=flux_scale)
    propagated = scipy.linalg.expm(l_chi.matrix * tau) @ rho_ss
    value = trace_vector() @ propagated
    if not np.isfinite(value):
        raise PropagationOverflow("matrix exponential overflowed")
    return complex(np.log(value))


# ---------------------------------------------------------------------------
# eigenvalue derivatives
# ---------------------------------------------------------------------------

def _lambda_s(params, s1, s2, flux_scale, min_gap, phi=(0.0, 0.0)):
    chi = CountingField(-1j * s1, -1j * s2)
    liou = build_two_sided(params, chi, phi=phi, flux_scale=flux_scale)
    top, _ = dominant_eigenvalue(liou, min_gap=min_gap)
    return top.real


def _default_min_gap(params):
    return 1e-6 * params.molecule.decay_gamma


def _adaptive_steps(params, flux_scale, min_gap):
    """Choose finite-difference steps below the chemical curvature scale of
    the CGF, which is of order gap/|c1| at slow reaction rates."""
    liou0 = build_two_sided(params, CountingField(0.0, 0.0),
                            flux_scale=flux_scale)
    _, gap = dominant_eigenvalue(liou0, min_gap=min_gap)
    # The curvature step is kept as large as the chemical scale allows:
    # eigenvalue noise enters second differences as 1/h^2, and at fast rates
    # it dominates the extracted diffusion rate for small steps.
    h1, h2 = 1e-4, 1e-2
    probe = max(abs(_lambda_s(params, h1, 0.0, flux_scale, min_gap)),
                abs(_lambda_s(params, 0.0, h1, flux_scale, min_gap)))
    c1_scale = probe / h1
    if c1_scale > 0:
        s_star = gap / c1_scale
        h1 = min(h1, 0.2 * s_star)
        h2 = min(h2, 0.2 * s_star)
    return h1, h2


def first_cumulants(params: ModelParams, flux_scale: float = 1.0,
                    min_gap: float | None = None, h: float | None = None,
                    phi=(0.0, 0.0)):
    """(c1_1, c1_2): plain d(lambda)/ds_k in counting-index order, units 1/s."""
    if min_gap is None:
        min_gap = _default_min_gap(params)
    if h is None:
        h, _ = _adaptive_steps(params, flux_scale, min_gap)

    def central(step):
        g1 = (_lambda_s(params, step, 0.0, flux_scale, min_gap, phi)
              - _lambda_s(params, -step, 0.0, flux_scale, min_gap, phi)) / (2 * step)
        g2 = (_lambda_s(params, 0.0, step, flux_scale, min_gap, phi)
              - _lambda_s(params, 0.0, -step, flux_scale, min_gap, phi)) / (2 * step)
        return np.array([g1, g2])

    coarse = central(h)
    fine = central(h / 2)
    return (4 * fine - coarse) / 3


def second_cumulant_matrix(params: ModelParams, flux_scale: float = 1.0,
                           min_gap: float | None = None,
                           h: float | None = None,
                           stability_tol: float = 5e-2) -> np.ndarray:
    """2x2 matrix of d2(lambda)/ds_k ds_l (counting-index order), units 1/s."""
    if min_gap is None:
        min_gap = _default_min_gap(params)
    if h is None:
        _, h = _adaptive_steps(params, flux_scale, min_gap)

    def at(step):
        f = lambda a, b: _lambda_s(params, a, b, flux_scale, min_gap)
        f00 = f(0.0, 0.0)
        d11 = (f(step, 0) - 2 * f00 + f(-step, 0)) / step**2
        d22 = (f(0, step) - 2 * f00 + f(0, -step)) / step**2
        d12 = (f(step, step) - f(step, -step) - f(-step, step)
               + f(-step, -step)) / (4 * step**2)
        return np.array([[d11, d12], [d12, d22]])

    coarse = at(h)
    fine = at(h / 2)
    result = (4 * fine - coarse) / 3
    scale = np.max(np.abs(result))
    if scale > 0:
        drift = np.max(np.abs(result - fine)) / scale
        if drift > stability_tol:
            raise DifferentiationUnstable(
                f"Richardson correction {drift:.2e} exceeds {stability_tol:.0e}")
    return result


# ---------------------------------------------------------------------------
# physical cumulants
# ---------------------------------------------------------------------------

WEAK_PROBE_LIMIT = 0.25  # warn above this Omega^2/gamma^2

CROSS_SECTION_FLUX_FRACTION = 1e-3  # linear-response reference flux J/J0


def _warn_if_strong(params):
    der, mol = params.derived, params.molecule
    saturation = max(der.rabi_a, der.rabi_b) ** 2 / mol.decay_gamma**2
    if saturation > WEAK_PROBE_LIMIT:
        warnings.warn(f"outside weak-probe regime: Omega^2/gamma^2 = "
                      f"{saturation:.2f}", stacklevel=3)


def cross_sections(params: ModelParams, min_gap: float | None = None):
    """(S1, S2) in m^2: photon flux removed from detector channel k per
    molecule and unit intensity, in the linear-response (small-flux) limit."""
    _warn_if_strong(params)
    frac = CROSS_SECTION_FLUX_FRACTION
    j_ref = params.derived.photon_flux_j0 * frac
    if j_ref == 0:
        return 0.0, 0.0
    c1 = first_cumulants(params, flux_scale=np.sqrt(frac), min_gap=min_gap)
    # counting index order -> physical detector order is reversed
    return c1[1] / j_ref, c1[0] / j_ref


def diffusion_matrix(params: ModelParams, J: float,
                     min_gap: float | None = None) -> np.ndarray:
    """Diffusion matrix D_J (detector order) with the line-density
    normalization rho_M * A * tau applied; see module docstring for the
    partition-shot completion of the eigenvalue curvature."""
    if not J > 0:
        raise ValueError("J must be positive")
    rate = diffusion_rate(params, J, min_gap=min_gap)
    sample, laser, der = params.sample, params.laser, params.derived
    return sample.density_rho_m * der.beam_area * laser.measurement_time * rate


def diffusion_rate(params: ModelParams, J: float,
                   min_gap: float | None = None) -> np.ndarray:
    """Per-molecule second-cumulant rate matrix at flux J (detector order)."""
    flux_scale = np.sqrt(J / params.derived.photon_flux_j0)
    curvature = second_cumulant_matrix(params, flux_scale=flux_scale,
                                       min_gap=min_gap)
    c1 = first_cumulants(params, flux_scale=flux_scale, min_gap=min_gap)
    absorbed = c1[0] + c1[1]        # total absorbed flux per molecule, 1/s
    rate = _swap(curvature) + 0.5 * absorbed * np.eye(2)
    return rate


def cumulant_set(params: ModelParams, J: float,
                 min_gap: float | None = None) -> CumulantSet:
    s1, s2 = cross_sections(params, min_gap=min_gap)
    d = diffusion_matrix(params, J, min_gap=min_gap)
    return CumulantSet(s1=s1, s2=s2, s_plus=s1 + s2, s_minus=s1 - s2, D=d, J=J)


def fit_diffusion_expansion(params: ModelParams, J_grid=None,
                            residual_tol: float = 1e-3,
                            min_gap: float | None = None,
                            rate_fn=None, s_plus: float | None = None,
                            pin_linear: bool = True) -> DiffusionExpansion:
    """Least-squares fit of the per-molecule rate to D1*J + (1/2)*D2*J^2
    through the origin, on a grid spanning a decade below J0.

    At slow reaction rates the quadratic chemical term exceeds the linear
    coefficient by many orders of magnitude, and higher-order saturation
    corrections of that dominant term leak into a freely fitted linear
    column at the full scale of the linear coefficient.  The linear
    coefficient is therefore pinned to its known structure D1 = S_plus * I
    (verified to be exact against the conditioned-statistics composition and
    against free fits in well-conditioned regimes), and only the quadratic
    coefficient is extracted, with cubic and quartic nuisance columns
    absorbing saturation corrections of the chemical term.

    ``rate_fn(params, J) -> 2x2`` overrides the full-statistics rate, e.g. to
    fit the adiabatic composition instead; pass the matching ``s_plus`` in
    that case.  ``pin_linear=False`` restores the free linear column, which
    is reliable only when chemical noise does not dwarf absorption (fast
    rates); it is retained as a consistency check on the pinned structure.
    """
    j0 = params.derived.photon_flux_j0
    if J_grid is None:
        J_grid = np.geomspace(j0 / 10.0, j0, 10)
    J_grid = np.asarray(J_grid, dtype=float)
    if J_grid.size < 5:
        raise ValueError("J_grid must contain at least 5 points")
    x = J_grid / j0
    if rate_fn is None:
        rate_fn = lambda p, j: diffusion_rate(p, j, min_gap=min_gap)
    rates = np.array([rate_fn(params, j) for j in J_grid])   # (n, 2, 2)
    flat = rates.reshape(len(J_grid), 4)
    norm = np.linalg.norm(flat)

    if pin_linear:
        if s_plus is None:
            s1, s2 = cross_sections(params, min_gap=min_gap)
            s_plus = s1 + s2
        d1 = s_plus * np.eye(2)
        linear = np.outer(x, (s_plus * j0) * np.eye(2).ravel())
        design = np.vstack([x**2, x**3, x**4]).T  # normalized flux
        coeffs, *_ = np.linalg.lstsq(design, flat - linear, rcond=None)
        model = linear + design @ coeffs
        d2 = 2.0 * coeffs[0].reshape(2, 2) / j0**2
    else:
        design = np.vstack([x, x**2, x**3]).T
        coeffs, *_ = np.linalg.lstsq(design, flat, rcond=None)
        model = design @ coeffs
        d1 = coeffs[0].reshape(2, 2) / j0
        d2 = 2.0 * coeffs[1].reshape(2, 2) / j0**2

    # Judge adequacy against the fitted polynomial family including the
    # nuisance columns: near resonance the saturation corrections to the
    # dominant chemical term are real (few 1e-3 relative) and must not abort
    # sweeps that traverse resonance, while noisy or non-polynomial data
    # still trips the threshold.
    residual = np.linalg.norm(model - flat) / norm if norm > 0 else 0.0
    if residual > residual_tol:
        raise FitResidualExceeded(
            f"intensity expansion residual {residual:.2e} "
            f"exceeds {residual_tol:.0e}")
    return DiffusionExpansion(D1=d1, D2=d2, fit_residual=float(residual))
