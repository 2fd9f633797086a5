import math

import pytest
from hypothesis import given, strategies as st
from scipy import constants as sc

from qlink import constants as const
from qlink.errors import ParseError, UnitError
from qlink.quantities import (UNITS, Quantity, convert, parse_quantity, photon_energy,
                              photon_frequency, photon_wavelength)


def test_parsec_and_au():
    assert convert(Quantity(1, "pc"), "m").value == pytest.approx(3.0857e16, rel=1e-4)
    assert convert(Quantity(1, "pc"), "m").value == pytest.approx(sc.parsec, rel=1e-12)
    assert convert(Quantity(1, "AU"), "m").value == pytest.approx(1.495979e11, rel=1e-6)


def test_prefix_is_exact():
    q = Quantity(100, "keV")
    assert (q.value, q.unit) == (1e5, "eV")
    assert parse_quantity("14.4 keV") == Quantity(1.44e4, "eV")
    assert parse_quantity("14.4 keV").value == 14400.0


def test_parse_examples():
    assert parse_quantity("6.6 cm^-3") == Quantity(6.6, "cm^-3")
    assert parse_quantity("1.3pc") == Quantity(1.3, "pc")
    assert parse_quantity("  -2.5e-3 m") == Quantity(-2.5e-3, "m")
    assert parse_quantity("7 MHz") == Quantity(7e6, "Hz")
    assert parse_quantity("1e7 cm^-2 s^-1").unit == "cm^-2 s^-1"


def test_unknown_unit_lists_accepted():
    with pytest.raises(UnitError) as exc:
        parse_quantity("1 parsec")
    assert "pc" in str(exc.value) and "accepted units" in str(exc.value)


@pytest.mark.parametrize("text,offset", [("abc", 0), ("  x1 m", 2), ("12", 2), ("é1 m", 0)])
def test_parse_error_offsets(text, offset):
    with pytest.raises(ParseError) as exc:
        parse_quantity(text)
    assert exc.value.offset == offset


def test_incompatible_dimensions():
    with pytest.raises(UnitError, match="eV.*m|m.*eV"):
        convert(Quantity(1, "eV"), "m")
    with pytest.raises(UnitError):
        Quantity(1, "m") + Quantity(1, "s")
    with pytest.raises(UnitError):
        Quantity(1, "m") < Quantity(1, "K")
    with pytest.raises(UnitError):
        Quantity(1, "m") * Quantity(1, "m")


def test_arithmetic():
    assert (Quantity(1, "km") + Quantity(500, "m")).value == 1.5
    assert Quantity(2, "pc") / Quantity(1, "pc") == 2.0
    assert Quantity(1, "AU") < Quantity(1, "ly")
    assert (3 * Quantity(1, "eV")).value == 3.0


def test_to_allows_prefixes():
    assert Quantity(1e5, "eV").to("keV") == 100.0
    assert Quantity(6.65e-29, "m^2").to("cm^2") == pytest.approx(6.65e-25, rel=1e-15)


def test_convert_rejects_prefixed_target():
    with pytest.raises(UnitError):
        convert(Quantity(1, "eV"), "keV")


_GROUPS = {}
for _u, (_d, _) in UNITS.items():
    _GROUPS.setdefault(_d, []).append(_u)
_PAIRS = [(a, b) for us in _GROUPS.values() for a in us for b in us]


@given(st.sampled_from(_PAIRS), st.floats(min_value=1e-30, max_value=1e30))
def test_round_trip(pair, value):
    u1, u2 = pair
    q = Quantity(value, u1)
    back = convert(convert(q, u2), u1)
    assert back.value == pytest.approx(value, rel=1e-12)


@given(st.floats(min_value=1e-6, max_value=1e7))
def test_photon_equivalences(e_ev):
    q = Quantity(e_ev, "eV")
    nu = photon_frequency(q).value
    lam = photon_wavelength(q).value
    h_ev = sc.h / sc.e
    assert e_ev == pytest.approx(h_ev * nu, rel=1e-9)
    assert e_ev == pytest.approx(h_ev * sc.c / lam, rel=1e-9)
    assert photon_energy(Quantity(lam, "m")).value == pytest.approx(e_ev, rel=1e-9)


def test_constants_match_codata():
    # package pins CODATA 2018; scipy may ship a newer release, hence 1e-8
    assert const.ALPHA == pytest.approx(sc.fine_structure, rel=1e-8)
    assert const.HBAR_C == pytest.approx(sc.hbar * sc.c / sc.e, rel=1e-8)
    mev = lambda key: sc.physical_constants[key][0] * 1e6
    assert const.ELECTRON_MASS == pytest.approx(mev("electron mass energy equivalent in MeV"), rel=1e-8)
    assert const.PROTON_MASS == pytest.approx(mev("proton mass energy equivalent in MeV"), rel=1e-8)
    assert const.BOLTZMANN_EV == pytest.approx(sc.k / sc.e, rel=1e-9)
    assert const.LIGHT_YEAR == sc.light_year
    assert const.ZETA3 == pytest.approx(1.2020569031595942, rel=1e-15)


def test_constants_immutable():
    with pytest.raises(TypeError):
        const.CONSTANTS["alpha"] = 1.0


def test_temperature_energy():
    assert photon_energy(Quantity(2.7255, "K")).value == pytest.approx(2.3487e-4, rel=1e-4)
    assert math.isclose(photon_energy(Quantity(1, "eV")).value, 1.0)
