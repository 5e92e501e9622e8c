"""Physical inputs, unit conversion, and derived quantities.

Unit conventions (frozen for the whole package):

* User-facing frequencies and rates carry an explicit ``_mhz`` suffix and are
  ordinary frequencies; internally everything is angular, ``omega = 2*pi*nu``.
  The same conversion is applied uniformly to detunings, the decay rate and
  the chemical rates so that they are commensurate inside eigenvalues.
* Dipole moments are entered in Debye, lengths in the unit named by the key.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .errors import InvalidParam, ParseError

MHZ = 2.0 * math.pi * 1.0e6  # angular rad/s per user-facing MHz


def mhz_to_angular(value_mhz: float) -> float:
    return value_mhz * MHZ


def angular_to_mhz(value_rad_s: float) -> float:
    return value_rad_s / MHZ


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA SI constants; not user-editable."""

    hbar: float = 1.054571817e-34      # J s
    eps0: float = 8.8541878128e-12     # C^2 J^-1 m^-1
    c: float = 2.99792458e8            # m s^-1
    debye: float = 3.33564e-30         # C m


@dataclass(frozen=True)
class LaserParams:
    power: float                # W
    wavelength: float           # m
    beam_diameter: float        # m
    measurement_time: float     # s
    lo_photon_policy: str = "match_probe"   # LO photon number tracks n_p(z)


@dataclass(frozen=True)
class MoleculeParams:
    dipole_a: float             # C m
    dipole_b: float             # C m
    detuning_a: float           # rad/s, eps/hbar - omega_p for state A
    detuning_b: float           # rad/s
    decay_gamma: float          # rad/s
    rate_a: float               # 1/s, transfer rate into state A
    rate_b: float               # 1/s, transfer rate into state B


@dataclass(frozen=True)
class SampleParams:
    density_rho_m: float        # m^-3
    thickness: float | None = None   # m; None means optimal thickness


@dataclass(frozen=True)
class DerivedQuantities:
    omega_p: float              # rad/s probe carrier
    beam_area: float            # m^2
    field_e: float              # V/m
    rabi_a: float               # rad/s at reference flux J0
    rabi_b: float               # rad/s
    beta_sq_a: float            # m^2 rad/s per (m^-2 s^-1): beta^2 = 2 Omega^2 / J
    beta_sq_b: float
    photon_flux_j0: float       # m^-2 s^-1
    n_p0: float                 # photons over the measurement


@dataclass(frozen=True)
class ModelParams:
    constants: PhysicalConstants
    laser: LaserParams
    molecule: MoleculeParams
    sample: SampleParams
    derived: DerivedQuantities

    def with_molecule(self, **changes) -> "ModelParams":
        """Return a copy with molecule fields replaced and derived refreshed."""
        mol = replace(self.molecule, **changes)
        return ModelParams(self.constants, self.laser, mol, self.sample,
                           derive(self.constants, self.laser, mol))

    def with_density(self, density: float) -> "ModelParams":
        if density <= 0:
            raise InvalidParam("density_per_m3")
        return ModelParams(self.constants, self.laser, self.molecule,
                           replace(self.sample, density_rho_m=density),
                           self.derived)


def derive(constants: PhysicalConstants, laser: LaserParams,
           molecule: MoleculeParams) -> DerivedQuantities:
    """Compute field amplitude, Rabi frequencies and photon bookkeeping."""
    _check_laser(laser)
    _check_molecule(molecule)
    area = math.pi * laser.beam_diameter**2 / 4.0
    field_e = math.sqrt(2.0 * laser.power / (area * constants.eps0 * constants.c))
    omega_p = 2.0 * math.pi * constants.c / laser.wavelength
    n_p0 = (laser.power * laser.measurement_time * laser.wavelength
            / (2.0 * math.pi * constants.hbar * constants.c))
    j0 = n_p0 / (area * laser.measurement_time)
    rabi_a = molecule.dipole_a * field_e / constants.hbar
    rabi_b = molecule.dipole_b * field_e / constants.hbar
    return DerivedQuantities(
        omega_p=omega_p,
        beam_area=area,
        field_e=field_e,
        rabi_a=rabi_a,
        rabi_b=rabi_b,
        beta_sq_a=2.0 * rabi_a**2 / j0,
        beta_sq_b=2.0 * rabi_b**2 / j0,
        photon_flux_j0=j0,
        n_p0=n_p0,
    )


def _check_laser(laser: LaserParams):
    for field in ("power", "wavelength", "beam_diameter", "measurement_time"):
        if not getattr(laser, field) > 0:
            raise InvalidParam(field)
    if laser.lo_photon_policy != "match_probe":
        raise InvalidParam("lo_photon_policy")


def _check_molecule(molecule: MoleculeParams):
    if molecule.dipole_a < 0:
        raise InvalidParam("dipole_a")
    if molecule.dipole_b < 0:
        raise InvalidParam("dipole_b")
    if not molecule.decay_gamma > 0:
        raise InvalidParam("decay_gamma")
    if molecule.rate_a < 0:
        raise InvalidParam("rate_a")
    if molecule.rate_b < 0:
        raise InvalidParam("rate_b")
    if not molecule.rate_a + molecule.rate_b > 0:
        raise InvalidParam("rate_a+rate_b")


# ---------------------------------------------------------------------------
# JSON configuration
# ---------------------------------------------------------------------------

DEFAULT_CONFIG = {
    "power_mw": 1.0,
    "wavelength_nm": 500.0,
    "beam_diameter_cm": 0.5,
    "measurement_time_s": 1.0,
    "dipole_a_debye": 1.0,
    "dipole_b_debye": 0.0,
    "detuning_a_mhz": 40.0,
    "detuning_b_mhz": 0.0,
    "gamma_mhz": 10.0,
    "rate_a_mhz": 1.0e-4,
    "rate_b_mhz": 1.0e-4,
    "density_per_m3": 1.0e20,
    "thickness_policy": "optimal",   # or "fixed"
    "thickness_m": None,             # required when thickness_policy == "fixed"
}

_NUMERIC_KEYS = [k for k in DEFAULT_CONFIG
                 if k not in ("thickness_policy", "thickness_m")]


def default_config() -> dict:
    return dict(DEFAULT_CONFIG)


def from_config(config: dict) -> ModelParams:
    """Build a validated ModelParams bundle from a configuration dict."""
    unknown = set(config) - set(DEFAULT_CONFIG)
    if unknown:
        raise ParseError(f"unknown configuration keys: {sorted(unknown)}")
    merged = dict(DEFAULT_CONFIG, **config)
    for key in _NUMERIC_KEYS:
        value = merged[key]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParseError(f"key {key!r} must be a number, got {value!r}")
    constants = PhysicalConstants()
    laser = LaserParams(
        power=merged["power_mw"] * 1e-3,
        wavelength=merged["wavelength_nm"] * 1e-9,
        beam_diameter=merged["beam_diameter_cm"] * 1e-2,
        measurement_time=merged["measurement_time_s"],
    )
    molecule = MoleculeParams(
        dipole_a=merged["dipole_a_debye"] * constants.debye,
        dipole_b=merged["dipole_b_debye"] * constants.debye,
        detuning_a=mhz_to_angular(merged["detuning_a_mhz"]),
        detuning_b=mhz_to_angular(merged["detuning_b_mhz"]),
        decay_gamma=mhz_to_angular(merged["gamma_mhz"]),
        rate_a=mhz_to_angular(merged["rate_a_mhz"]),
        rate_b=mhz_to_angular(merged["rate_b_mhz"]),
    )
    policy = merged["thickness_policy"]
    if policy == "optimal":
        thickness = None
    elif policy == "fixed":
        thickness = merged["thickness_m"]
        if not isinstance(thickness, (int, float)) or not thickness > 0:
            raise InvalidParam("thickness_m")
    else:
        raise InvalidParam("thickness_policy")
    if not merged["density_per_m3"] > 0:
        raise InvalidParam("density_per_m3")
    sample = SampleParams(density_rho_m=merged["density_per_m3"],
                          thickness=thickness)
    return ModelParams(constants, laser, molecule, sample,
                       derive(constants, laser, molecule))


def validate(config_text: str) -> ModelParams:
    """Parse a JSON configuration document and return validated parameters."""
    if not config_text or not config_text.strip():
        raise ParseError("empty configuration document")
    try:
        config = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ParseError("configuration document must be a JSON object")
    return from_config(config)
