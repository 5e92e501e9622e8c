import json
import math

import pytest
from hypothesis import given, strategies as st

from spectrosens.errors import InvalidParam, ParseError
from spectrosens.params import (MHZ, angular_to_mhz, default_config,
                                from_config, mhz_to_angular, validate)


def test_unit_scale():
    assert MHZ == pytest.approx(2 * math.pi * 1e6, rel=1e-15)


@given(st.floats(min_value=1e-12, max_value=1e6,
                 allow_nan=False, allow_infinity=False))
def test_unit_round_trip(value):
    assert angular_to_mhz(mhz_to_angular(value)) == pytest.approx(
        value, rel=1e-12)


def test_derived_quantities(default_params):
    der = default_params.derived
    assert der.beam_area == pytest.approx(math.pi * 0.005**2 / 4, rel=1e-12)
    # 1 mW for 1 s at 500 nm
    assert der.n_p0 == pytest.approx(2.517058e15, rel=1e-5)
    assert der.photon_flux_j0 == pytest.approx(
        der.n_p0 / (der.beam_area * 1.0), rel=1e-12)
    # drive amplitude for a 1 Debye dipole
    assert angular_to_mhz(der.rabi_a) == pytest.approx(0.98614, rel=1e-4)
    assert der.rabi_b == 0.0
    assert der.beta_sq_a == pytest.approx(
        2 * der.rabi_a**2 / der.photon_flux_j0, rel=1e-12)


def test_rate_units(default_params):
    # rates are converted with the same angular factor as frequencies
    assert default_params.molecule.rate_a == pytest.approx(
        2 * math.pi * 1e-4 * 1e6, rel=1e-12)


def test_unknown_key_rejected():
    with pytest.raises(ParseError):
        from_config({"detuning_mhz": 40.0})


def test_non_numeric_rejected():
    with pytest.raises(ParseError):
        from_config({"gamma_mhz": "10"})


@pytest.mark.parametrize("key,value", [
    ("power_mw", 0.0),
    ("wavelength_nm", -1.0),
    ("gamma_mhz", 0.0),
    ("rate_a_mhz", -1.0),
    ("density_per_m3", 0.0),
])
def test_range_checks(key, value):
    with pytest.raises(InvalidParam):
        from_config({key: value})


def test_both_rates_zero_rejected():
    with pytest.raises(InvalidParam):
        from_config({"rate_a_mhz": 0.0, "rate_b_mhz": 0.0})


def test_fixed_thickness_policy():
    params = from_config({"thickness_policy": "fixed", "thickness_m": 0.01})
    assert params.sample.thickness == 0.01
    with pytest.raises(InvalidParam):
        from_config({"thickness_policy": "fixed"})
    with pytest.raises(InvalidParam):
        from_config({"thickness_policy": "bogus"})


def test_validate_json():
    params = validate(json.dumps({"detuning_a_mhz": 20.0}))
    assert angular_to_mhz(params.molecule.detuning_a) == pytest.approx(20.0)
    with pytest.raises(ParseError):
        validate("")
    with pytest.raises(ParseError):
        validate("{not json")
    with pytest.raises(ParseError):
        validate("[1, 2]")


def test_with_molecule_refreshes_derived(default_params):
    changed = default_params.with_molecule(
        dipole_a=2 * default_params.molecule.dipole_a)
    assert changed.derived.rabi_a == pytest.approx(
        2 * default_params.derived.rabi_a, rel=1e-12)


def test_default_config_is_copy():
    config = default_config()
    config["power_mw"] = 99.0
    assert default_config()["power_mw"] == 1.0
