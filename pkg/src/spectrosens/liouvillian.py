"""Rotating-frame Hamiltonian with auxiliary phases/counting fields and the
vectorized two-sided superoperator.

Basis order is frozen package-wide: |g_A>, |e_A>, |g_B>, |e_B| mapped to
indices 0..3.  Vectorization is row-major, vec(rho)[4*i+j] = rho_ij, so that
vec(A rho B) = kron(A, B.T) @ vec(rho) and the trace functional is the
left vector vec(identity).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TrustRadiusExceeded
from .params import ModelParams

DIM = 4
I4 = np.eye(DIM)

# Fixed auxiliary-phase offsets of the two detector channels.
PHASE_OFFSETS = (np.pi / 4.0, -np.pi / 4.0)


@dataclass(frozen=True)
class CountingField:
    """Pair of counting fields; complex values occur during differentiation."""

    chi1: complex = 0.0
    chi2: complex = 0.0
    trust_radius: float = 0.1

    def check(self):
        if abs(self.chi1) > self.trust_radius or abs(self.chi2) > self.trust_radius:
            raise TrustRadiusExceeded(
                f"|chi| = ({abs(self.chi1):.3g}, {abs(self.chi2):.3g}) "
                f"exceeds trust radius {self.trust_radius}")


@dataclass(frozen=True)
class CountingLiouvillian:
    matrix: np.ndarray = field(repr=False)   # 16x16 complex
    chi: CountingField = CountingField()
    phase_phi: tuple = (0.0, 0.0)


def _coupling_up(amp, phi1, phi2):
    """Raising-operator amplitude for drive amplitude ``amp`` (= d E / hbar)."""
    return amp / (2.0 * np.sqrt(2.0)) * (
        np.exp(1j * (phi1 + PHASE_OFFSETS[0]))
        + np.exp(1j * (phi2 + PHASE_OFFSETS[1])))


def _coupling_down(amp, phi1, phi2):
    """Lowering-operator amplitude; analytic continuation of the conjugate so
    the superoperator stays analytic in complex counting fields."""
    return amp / (2.0 * np.sqrt(2.0)) * (
        np.exp(-1j * (phi1 + PHASE_OFFSETS[0]))
        + np.exp(-1j * (phi2 + PHASE_OFFSETS[1])))


def build_hamiltonian(params: ModelParams, phi=(0.0, 0.0),
                      flux_scale: float = 1.0) -> np.ndarray:
    """4x4 rotating-frame Hamiltonian in angular-frequency units.

    ``flux_scale`` rescales the drive amplitude by sqrt(J/J0) to evaluate the
    model at photon-number intensity J instead of the reference J0.
    """
    mol = params.molecule
    der = params.derived
    phi1, phi2 = phi
    h = np.zeros((DIM, DIM), dtype=complex)
    h[1, 1] = mol.detuning_a
    h[3, 3] = mol.detuning_b
    for ground, excited, rabi in ((0, 1, der.rabi_a), (2, 3, der.rabi_b)):
        h[excited, ground] = _coupling_up(rabi * flux_scale, phi1, phi2)
        h[ground, excited] = _coupling_down(rabi * flux_scale, phi1, phi2)
    return h


def _dissipator(jump: np.ndarray, rate: float) -> np.ndarray:
    jd = jump.conj().T
    jdj = jd @ jump
    return rate * (np.kron(jump, jump.conj())
                   - 0.5 * (np.kron(jdj, I4) + np.kron(I4, jdj.T)))


def _proj(i, j):
    op = np.zeros((DIM, DIM))
    op[i, j] = 1.0
    return op


def dissipator_sum(params: ModelParams) -> np.ndarray:
    """Spontaneous decay within each state plus chemical transfer between them."""
    mol = params.molecule
    total = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    total += _dissipator(_proj(0, 1), mol.decay_gamma)   # |g_A><e_A|
    total += _dissipator(_proj(2, 3), mol.decay_gamma)   # |g_B><e_B|
    # transfer into A at rate_a, into B at rate_b, for ground and excited levels
    total += _dissipator(_proj(0, 2), mol.rate_a)
    total += _dissipator(_proj(1, 3), mol.rate_a)
    total += _dissipator(_proj(2, 0), mol.rate_b)
    total += _dissipator(_proj(3, 1), mol.rate_b)
    return total


def build_two_sided(params: ModelParams, chi: CountingField,
                    phi=(0.0, 0.0), flux_scale: float = 1.0) -> CountingLiouvillian:
    """Two-sided superoperator: left phases phi + chi/2, right phases phi - chi/2."""
    chi.check()
    phi1, phi2 = phi
    h_left = build_hamiltonian(params, (phi1 + chi.chi1 / 2.0,
                                        phi2 + chi.chi2 / 2.0), flux_scale)
    h_right = build_hamiltonian(params, (phi1 - chi.chi1 / 2.0,
                                         phi2 - chi.chi2 / 2.0), flux_scale)
    matrix = -1j * (np.kron(h_left, I4) - np.kron(I4, h_right.T))
    matrix = matrix + dissipator_sum(params)
    return CountingLiouvillian(matrix=matrix, chi=chi, phase_phi=tuple(phi))


def trace_vector() -> np.ndarray:
    """Left null vector of the chi=0 generator: vec(identity)."""
    return I4.reshape(-1)


def stationary_state(matrix: np.ndarray) -> np.ndarray:
    """Vectorized stationary density matrix of the chi=0 generator."""
    values, vectors = np.linalg.eig(matrix)
    vec = vectors[:, np.argmax(values.real)]
    rho = vec.reshape(DIM, DIM)
    rho = 0.5 * (rho + rho.conj().T)
    return (rho / np.trace(rho)).reshape(-1)
