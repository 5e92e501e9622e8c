"""Closed-form adiabatic theory: stationary probabilities, conditioned cross
sections and diffusion, the two-state dominant eigenvalue, and the composed
effective quantities.

In the adiabatic regime (reaction rates slow compared to the electronic
dissipation) the counting statistics factorize into statistics conditioned on
the chemical state plus a telegraph-noise term.  The telegraph term carries a
factor 2*t_R (second derivative of the two-state eigenvalue; equivalently the
stationary variance of a time-integrated telegraph signal).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchAmbiguous
from .params import ModelParams

ADIABATIC_GATE = 0.1   # warn when (r_A + r_B) / gamma exceeds this


@dataclass(frozen=True)
class AdiabaticQuantities:
    p_a: float
    p_b: float
    t_r: float
    s_cond: dict                    # state -> (S_plus|state, S_minus|state)
    s_eff: tuple                    # (S_plus, S_minus)
    d_eff: np.ndarray = field(repr=False)   # 2x2 diffusion matrix at J


def stationary_probabilities(params: ModelParams):
    mol = params.molecule
    total = mol.rate_a + mol.rate_b
    return mol.rate_a / total, mol.rate_b / total


def reaction_time(params: ModelParams) -> float:
    mol = params.molecule
    return 1.0 / (mol.rate_a + mol.rate_b)


def _state_constants(params: ModelParams, state: str):
    mol, der = params.molecule, params.derived
    if state == "A":
        return der.rabi_a, mol.detuning_a, der.beta_sq_a
    if state == "B":
        return der.rabi_b, mol.detuning_b, der.beta_sq_b
    raise ValueError(f"unknown chemical state {state!r}")


def _warn_if_nonadiabatic(params):
    mol = params.molecule
    if mol.rate_a + mol.rate_b > ADIABATIC_GATE * mol.decay_gamma:
        warnings.warn("adiabatic factorization unreliable: "
                      "rate_a + rate_b > gamma/10", stacklevel=3)


# ---------------------------------------------------------------------------
# conditioned quantities
# ---------------------------------------------------------------------------

def conditioned_cross_sections(params: ModelParams, state: str):
    """(S_plus|state, S_minus|state) in m^2, weak-field Lorentzian forms."""
    _, eps, beta_sq = _state_constants(params, state)
    gamma = params.molecule.decay_gamma
    denom = 4.0 * eps**2 + gamma**2
    return 0.5 * gamma * beta_sq / denom, eps * beta_sq / denom


def _detector_components(s_plus, s_minus):
    """Split S_pm into per-detector channels (detector order)."""
    return np.array([(s_plus + s_minus) / 2.0, (s_plus - s_minus) / 2.0])


def weak_field_coefficients(params: ModelParams, state: str, J: float):
    """The eight characteristic-polynomial coefficients of the conditioned
    tilted generator, to leading order in the drive (counting-index order)."""
    rabi, eps, _ = _state_constants(params, state)
    gamma = params.molecule.decay_gamma
    om_sq = rabi**2 * (J / params.derived.photon_flux_j0)
    a0_k = {1: -1j * (gamma / 8.0 - eps / 4.0) * om_sq,
            2: -1j * (gamma / 8.0 + eps / 4.0) * om_sq}
    a0_kl = {(1, 1): gamma * om_sq / 8.0, (2, 2): gamma * om_sq / 8.0,
             (1, 2): 0.0, (2, 1): 0.0}
    a1 = eps**2 + gamma**2 / 4.0
    a1_k = {1: -1j * om_sq / 4.0, 2: -1j * om_sq / 4.0}
    a2 = eps**2 / gamma + 1.25 * gamma
    return a0_k, a0_kl, a1, a1_k, a2


def _curvature_weak_field(params, state, J):
    """Second-derivative matrix of the conditioned eigenvalue from the
    weak-field coefficient table (counting order, 1/s)."""
    a0_k, a0_kl, a1, a1_k, a2 = weak_field_coefficients(params, state, J)
    out = np.zeros((2, 2))
    for k in (1, 2):
        for l in (1, 2):
            value = (a0_kl[(k, l)] / a1
                     + 2.0 * a2 * a0_k[k] * a0_k[l] / a1**3
                     - (a0_k[k] * a1_k[l] + a0_k[l] * a1_k[k]) / a1**2)
            out[k - 1, l - 1] = value.real
    return out


# exact conditioned generator: single 2-level system, vectorized to 4x4
_I2 = np.eye(2)
_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])
_OFFSETS = (np.pi / 4.0, -np.pi / 4.0)


def _conditioned_lambda(rabi, eps, gamma, s1, s2):
    """Dominant eigenvalue of the conditioned (single-state) tilted generator."""
    def ham(p1, p2):
        h = np.zeros((2, 2), dtype=complex)
        h[1, 1] = eps
        amp = rabi / (2.0 * np.sqrt(2.0))
        h[1, 0] = amp * (np.exp(1j * (p1 + _OFFSETS[0]))
                         + np.exp(1j * (p2 + _OFFSETS[1])))
        h[0, 1] = amp * (np.exp(-1j * (p1 + _OFFSETS[0]))
                         + np.exp(-1j * (p2 + _OFFSETS[1])))
        return h

    chi = (-1j * s1, -1j * s2)
    h_left = ham(chi[0] / 2.0, chi[1] / 2.0)
    h_right = ham(-chi[0] / 2.0, -chi[1] / 2.0)
    matrix = -1j * (np.kron(h_left, _I2) - np.kron(_I2, h_right.T))
    jdj = _LOWER.conj().T @ _LOWER
    matrix += gamma * (np.kron(_LOWER, _LOWER.conj())
                       - 0.5 * (np.kron(jdj, _I2) + np.kron(_I2, jdj.T)))
    values = np.linalg.eigvals(matrix)
    return values[np.argmax(values.real)].real


def conditioned_cgf(params: ModelParams, state: str, s1: float, s2: float,
                    J: float) -> float:
    """Conditioned cumulant-generating rate K_state(s)."""
    rabi, eps, _ = _state_constants(params, state)
    scale = np.sqrt(J / params.derived.photon_flux_j0)
    return _conditioned_lambda(rabi * scale, eps,
                               params.molecule.decay_gamma, s1, s2)


def _fd_vector(fun, h):
    g1 = (fun(h, 0.0) - fun(-h, 0.0)) / (2 * h)
    g2 = (fun(0.0, h) - fun(0.0, -h)) / (2 * h)
    return np.array([g1, g2])


def _fd_matrix(fun, h):
    f00 = fun(0.0, 0.0)
    d11 = (fun(h, 0) - 2 * f00 + fun(-h, 0)) / h**2
    d22 = (fun(0, h) - 2 * f00 + fun(0, -h)) / h**2
    d12 = (fun(h, h) - fun(h, -h) - fun(-h, h) + fun(-h, -h)) / (4 * h**2)
    return np.array([[d11, d12], [d12, d22]])


def _richardson(evaluate, h):
    coarse = evaluate(h)
    fine = evaluate(h / 2)
    return (4 * fine - coarse) / 3


def _conditioned_first(params, state, J, h=1e-4):
    fun = lambda a, b: conditioned_cgf(params, state, a, b, J)
    return _richardson(lambda step: _fd_vector(fun, step), h)


def conditioned_first_cumulants(params: ModelParams, state: str,
                                J: float) -> np.ndarray:
    """Conditioned mean detector fluxes (counting-index order, 1/s)."""
    return _conditioned_first(params, state, J)


def _curvature_exact(params, state, J, h=1e-3):
    fun = lambda a, b: conditioned_cgf(params, state, a, b, J)
    return _richardson(lambda step: _fd_matrix(fun, step), h)


def conditioned_diffusion(params: ModelParams, state: str, J: float,
                          method: str = "exact") -> np.ndarray:
    """Conditioned diffusion matrix at flux J, detector order, normalized by
    rho_M * A * tau like the full-statistics diffusion matrix.  Includes the
    per-detector partition shot term on the diagonal."""
    rate = conditioned_rate(params, state, J, method=method)
    sample, laser, der = params.sample, params.laser, params.derived
    return sample.density_rho_m * der.beam_area * laser.measurement_time * rate


def conditioned_rate(params: ModelParams, state: str, J: float,
                     method: str = "exact") -> np.ndarray:
    """Per-molecule conditioned second-cumulant rate (detector order, 1/s)."""
    if method == "weak_field":
        curvature = _curvature_weak_field(params, state, J)
        s_plus, _ = conditioned_cross_sections(params, state)
        absorbed = s_plus * J
    elif method == "exact":
        curvature = _curvature_exact(params, state, J)
        c1 = _conditioned_first(params, state, J)
        absorbed = c1[0] + c1[1]
    else:
        raise ValueError(f"unknown method {method!r}")
    return curvature[::-1, ::-1] + 0.5 * absorbed * np.eye(2)


def reference_expansion_coefficients(params: ModelParams, state: str = "A"):
    """Compact closed-form flux-expansion combinations of the conditioned
    diffusion: (D1_pm, D2_plus, D2_minus); D1 applies to both signs.

    The linear coefficient is exact (D1 = 2 S_plus).  The quadratic forms
    are approximate: against the exact weak-field expansion the sum-channel
    value carries a fixed factor 2 and the difference-channel value deviates
    in a detuning-dependent way (both quantified in the tests); use
    ``conditioned_rate`` for quantitative work."""
    _, eps, beta_sq = _state_constants(params, state)
    gamma = params.molecule.decay_gamma
    denom = 4.0 * eps**2 + gamma**2
    d1 = gamma * beta_sq / denom
    d2_plus = beta_sq**2 * gamma * (8.0 * eps**2 - 6.0 * gamma**2) / denom**3
    d2_minus = (2.0 * beta_sq**2 / (gamma * denom)
                - 8.0 * eps**2 * (4.0 * eps**2 + 5.0 * gamma**2) * beta_sq**2
                / (gamma * denom**3))
    return d1, d2_plus, d2_minus


# ---------------------------------------------------------------------------
# composition across chemical states
# ---------------------------------------------------------------------------

def effective_cross_sections(params: ModelParams):
    """(S_plus, S_minus): stationary-probability weighted cross sections."""
    p_a, p_b = stationary_probabilities(params)
    sa = conditioned_cross_sections(params, "A")
    sb = conditioned_cross_sections(params, "B")
    return (p_a * sa[0] + p_b * sb[0], p_a * sa[1] + p_b * sb[1])


def two_state_lambda(k_a: complex, k_b: complex, r_a: float, r_b: float) -> complex:
    """Dominant eigenvalue of the two-state (telegraph-dressed) generator,
    branch continuous to 0 at k_a = k_b = 0."""
    half_sum = 0.5 * (k_a + k_b - r_a - r_b)
    argument = (k_a - k_b + r_a - r_b) ** 2 + 4.0 * r_a * r_b
    root = np.sqrt(complex(argument))
    if root.real < 0:
        root = -root
    if abs(argument) > 0 and root.real <= 1e-12 * abs(root):
        raise BranchAmbiguous("square-root argument on the branch cut")
    value = half_sum + 0.5 * root
    if abs(value.imag) < 1e-12 * max(1.0, abs(value.real)):
        value = complex(value.real, 0.0)
    return value


def chemical_rate_term(params: ModelParams, J: float,
                       method: str = "exact") -> np.ndarray:
    """Telegraph contribution to the per-molecule rate: 2 t_R p_A p_B dS dS^T."""
    p_a, p_b = stationary_probabilities(params)
    t_r = reaction_time(params)
    if method == "exact":
        delta = (_conditioned_first(params, "A", J)[::-1]
                 - _conditioned_first(params, "B", J)[::-1])
    else:
        sa = _detector_components(*conditioned_cross_sections(params, "A"))
        sb = _detector_components(*conditioned_cross_sections(params, "B"))
        delta = (sa - sb) * J
    return 2.0 * t_r * p_a * p_b * np.outer(delta, delta)


def adiabatic_rate(params: ModelParams, J: float,
                   method: str = "exact") -> np.ndarray:
    """Per-molecule diffusion rate composed from conditioned statistics plus
    the telegraph term (detector order, 1/s)."""
    p_a, p_b = stationary_probabilities(params)
    rate = (p_a * conditioned_rate(params, "A", J, method=method)
            + p_b * conditioned_rate(params, "B", J, method=method))
    return rate + chemical_rate_term(params, J, method=method)


def adiabatic_diffusion_matrix(params: ModelParams, J: float,
                               method: str = "exact") -> np.ndarray:
    """Adiabatic diffusion matrix with the rho_M * A * tau normalization."""
    _warn_if_nonadiabatic(params)
    sample, laser, der = params.sample, params.laser, params.derived
    return (sample.density_rho_m * der.beam_area * laser.measurement_time
            * adiabatic_rate(params, J, method=method))


def adiabatic_quantities(params: ModelParams, J: float,
                         method: str = "exact") -> AdiabaticQuantities:
    p_a, p_b = stationary_probabilities(params)
    return AdiabaticQuantities(
        p_a=p_a, p_b=p_b, t_r=reaction_time(params),
        s_cond={"A": conditioned_cross_sections(params, "A"),
                "B": conditioned_cross_sections(params, "B")},
        s_eff=effective_cross_sections(params),
        d_eff=adiabatic_diffusion_matrix(params, J, method=method),
    )
