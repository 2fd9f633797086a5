import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import ORACLE_RTOL, PC, euler_heisenberg_cm2, thomson_cm2
from qlink import environments as env
from qlink.errors import DomainError, ValidationError
from qlink.propagation import (INFINITE, PathSegment, link_budget, mean_free_path_cmb,
                               mean_free_path_density, mfp_from_flux, rate_from_flux,
                               rate_spectral)
from qlink.quadrature import QuadratureSpec
from qlink.quantities import Quantity
from qlink.xsec import HEAD_ON, ISOTROPIC_MEAN, ELECTRON, PROTON, thomson_cross_section
from scipy import constants as sc

SIG_E = thomson_cross_section(ELECTRON)
SIG_P = thomson_cross_section(PROTON)
E100 = Quantity(100, "keV")


def test_mfp_ism():
    l = mean_free_path_density(Quantity(1, "cm^-3"), SIG_E).meters
    assert l == pytest.approx(1e-2 / thomson_cm2(sc.m_e), rel=ORACLE_RTOL)
    assert 1e22 <= l <= 2e22


def test_mfp_dense_region():
    l = mean_free_path_density(Quantity(1e4, "cm^-3"), SIG_E).meters / PC
    assert l == pytest.approx(48.7, rel=1e-3)


def test_mfp_scaling_and_sentinel():
    a = mean_free_path_density(Quantity(1, "cm^-3"), SIG_E).meters
    b = mean_free_path_density(Quantity(2, "cm^-3"), SIG_E).meters
    assert b == pytest.approx(a / 2, rel=1e-15)
    assert mean_free_path_density(Quantity(0, "cm^-3"), SIG_E) is INFINITE
    assert INFINITE.non_interacting and math.isinf(INFINITE.meters)


def test_flux_rates():
    r = rate_from_flux(Quantity(1e5, "cm^-2 s^-1"), SIG_P).value
    assert r == pytest.approx(1e5 * thomson_cm2(sc.m_p), rel=ORACLE_RTOL)
    assert rate_from_flux(Quantity(0, "cm^-2 s^-1"), SIG_P).value == 0
    assert mfp_from_flux(Quantity(0, "cm^-2 s^-1"), SIG_P).non_interacting
    l1 = mfp_from_flux(Quantity(1e5, "cm^-2 s^-1"), SIG_P).meters
    l2 = mfp_from_flux(Quantity(2e5, "cm^-2 s^-1"), SIG_P).meters
    assert l1 == pytest.approx(sc.c / r, rel=1e-12)
    assert l2 == pytest.approx(l1 / 2, rel=1e-15)
    with pytest.raises(ValidationError):
        rate_from_flux(Quantity(-1, "cm^-2 s^-1"), SIG_P)


def test_mfp_cmb_examples():
    n = Quantity(411, "cm^-3")
    l = mean_free_path_cmb(omega=Quantity(5.07, "eV"), n_gamma=n).length.to("cm")
    assert l == pytest.approx(1 / (euler_heisenberg_cm2(5.07) * 411), rel=ORACLE_RTOL)
    l_half = mean_free_path_cmb(omega=Quantity(5.07, "eV"), n_gamma=Quantity(205.5, "cm^-3"))
    assert l_half.length.to("cm") == pytest.approx(2 * l, rel=1e-12)
    head = mean_free_path_cmb(E100, T_cmb=Quantity(2.7255, "K"), angle_model=HEAD_ON,
                              n_gamma=n).length.to("cm")
    w = math.sqrt(1e5 * env.cmb_mean_energy(Quantity(2.7255, "K")).value)
    assert head == pytest.approx(1 / (euler_heisenberg_cm2(w) * 411), rel=ORACLE_RTOL)


def _rate_oracle(bg, e_test=1e5, one_minus_cos=1.0, solid=math.pi):
    """Same integrand, evaluated with scipy quad over ln E."""
    from scipy import integrate
    lo, hi = bg.support_ev()
    hi = min(hi, 510998.95)
    if isinstance(bg, env.Blackbody):
        lo, hi = bg.kT * 1e-8, min(hi, bg.kT * 200)

    def f(t):
        e = math.exp(t)
        w = math.sqrt(e_test * e * one_minus_cos / 2)
        return euler_heisenberg_cm2(w) * float(bg.photon_flux(np.array([e]))[0]) * e

    val, _ = integrate.quad(f, math.log(lo), math.log(hi), limit=500, epsrel=1e-10)
    return val * (solid if bg.per_steradian else 1.0)


@pytest.mark.parametrize("name", ["cxb", "ebl_optical", "cmb"])
def test_rate_spectral_against_quad(name):
    bg = env.lookup(name)
    assert rate_spectral(E100, bg).value == pytest.approx(_rate_oracle(bg), rel=1e-5)
    assert rate_spectral(E100, bg, HEAD_ON).value == pytest.approx(
        _rate_oracle(bg, one_minus_cos=2.0), rel=1e-5)


def test_rate_spectral_tabulated_against_quad():
    t = env.solar_blackbody_spectrum()
    gk = rate_spectral(E100, t).value
    sp = rate_spectral(E100, t, quadrature=QuadratureSpec(method="scipy")).value
    assert gk == pytest.approx(sp, rel=1e-5)


def test_rate_spectral_flat_table_closed_form():
    # flat F_lambda: integrand in lambda is analytic
    t = env.Tabulated("flat", [400.0, 800.0], [1.0, 1.0])
    hc = sc.h * sc.c / sc.e * 1e9
    e_test = 1e5

    def f(wl):
        e = hc / wl
        return euler_heisenberg_cm2(math.sqrt(e_test * e / 2)) / (e * sc.e) * 1e-4

    from scipy import integrate
    expected = integrate.quad(f, 400, 800, epsrel=1e-12)[0]
    assert rate_spectral(Quantity(e_test, "eV"), t).value == pytest.approx(expected, rel=1e-7)


def test_blackbody_cross_validation_within_factor_3():
    bg = env.lookup("cmb")
    for model in (ISOTROPIC_MEAN, HEAD_ON):
        spectral = rate_spectral(E100, bg, model, QuadratureSpec(solid_angle_factor=4 * math.pi)).value
        l = mean_free_path_cmb(E100, T_cmb=bg.temperature, angle_model=model)
        closed = sc.c / l.meters
        assert closed / 3 <= spectral <= closed * 3


def test_rate_spectral_domain():
    with pytest.raises(DomainError):
        rate_spectral(Quantity(600, "keV"), env.lookup("cmb"))


def test_tolerance_halving_stable():
    for name in ("cxb", "ebl_optical", "cmb", "solar_blackbody"):
        bg = env.lookup(name)
        coarse = rate_spectral(E100, bg, quadrature=QuadratureSpec(rtol=1e-6)).value
        fine = rate_spectral(E100, bg, quadrature=QuadratureSpec(rtol=5e-7)).value
        assert abs(coarse - fine) <= 1e-6 * abs(fine)


def test_link_budget_examples():
    ism = env.lookup("ism_electrons")
    l = mean_free_path_density(ism.density, SIG_E).length
    rep = link_budget([PathSegment("one", l, [ism])], E100)
    assert rep.total_optical_depth == pytest.approx(1.0, rel=1e-14)
    assert rep.survival == pytest.approx(math.exp(-1))
    seg = PathSegment("prox", Quantity(1.3, "pc"), [ism])
    rep = link_budget([seg], E100)
    assert rep.total_optical_depth == pytest.approx(1.3 * PC * 100 * thomson_cm2(sc.m_e), rel=ORACLE_RTOL)
    assert rep.total_optical_depth == pytest.approx(2.7e-6, rel=0.02)
    rep = link_budget([PathSegment("empty", Quantity(1, "pc"))], E100)
    assert rep.total_optical_depth == 0 and rep.survival == 1.0


def test_overrides_and_neutral():
    seg = PathSegment("s", Quantity(2, "pc"), [env.lookup("lic_helium")],
                      mfp_overrides=[("dust", Quantity(4, "pc"))])
    rep = link_budget([seg], E100)
    kinds = {c.label: c for c in rep.segments[0].contributions}
    assert kinds["lic_helium"].mfp.non_interacting and kinds["lic_helium"].optical_depth == 0
    assert kinds["dust"].optical_depth == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        PathSegment("bad", Quantity(0, "m"))


@given(st.floats(0.01, 0.99))
def test_optical_depth_additive(frac):
    pops = [env.lookup("ism_electrons"), env.lookup("solar_wind_protons")]
    bgs = [env.lookup("cxb")]
    L = 3.0 * PC
    whole = link_budget([PathSegment("w", Quantity(L, "m"), pops, bgs)], E100)
    split = link_budget([PathSegment("a", Quantity(frac * L, "m"), pops, bgs),
                         PathSegment("b", Quantity((1 - frac) * L, "m"), pops, bgs)], E100)
    assert split.total_optical_depth == pytest.approx(whole.total_optical_depth, rel=1e-12)


_DILUTE = [e for e in env.builtin_catalog() if e.name != "hii_electrons"]


@pytest.mark.parametrize("entry", _DILUTE, ids=lambda e: e.name)
def test_builtin_survives_proxima_distance(entry):
    is_pop = isinstance(entry, env.ParticlePopulation)
    seg = PathSegment("p", Quantity(1.3, "pc"), [entry] if is_pop else [],
                      [] if is_pop else [entry])
    assert link_budget([seg], E100).survival > 0.999


def test_dense_region_is_the_exception():
    seg = PathSegment("p", Quantity(1.3, "pc"), [env.lookup("hii_electrons")])
    survival = link_budget([seg], E100).survival
    assert survival == pytest.approx(math.exp(-1.3 / 48.7155), rel=1e-4)
    assert survival < 0.999
