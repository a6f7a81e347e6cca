"""Strain/stress transduction chain and its two calibration anchors."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepcim import piezo
from stepcim.constants import EPS0
from stepcim.errors import BiasRangeError, GeometryError
from stepcim.ferro import FerroParams

FE = FerroParams()
PZ = piezo.PiezoParams()


def test_kappa_from_reference_geometry():
    k = piezo.kappa_from_geometry(20e-9, 30e-9, 100e-9, 180e-9)
    assert k == pytest.approx(600.0 / 18000.0, rel=1e-12)
    assert k == pytest.approx(1.0 / 30.0, rel=1e-12)


def test_kappa_rejects_nail_at_least_hammer_sized():
    with pytest.raises(GeometryError):
        piezo.kappa_from_geometry(100e-9, 180e-9, 100e-9, 180e-9)
    with pytest.raises(GeometryError):
        piezo.kappa_from_geometry(-1e-9, 30e-9, 100e-9, 180e-9)


def test_kappa_linear_in_hammer_width():
    k1 = piezo.kappa_from_geometry(20e-9, 30e-9, 100e-9, 180e-9)
    k2 = piezo.kappa_from_geometry(20e-9, 30e-9, 100e-9, 90e-9)
    assert k2 == pytest.approx(2 * k1, rel=1e-12)


def test_focusing_gain_anchor():
    assert piezo.hn_amplification(1.0 / 30.0) == pytest.approx(11.0, rel=1e-12)
    assert piezo.hn_amplification(2.0 / 30.0) == pytest.approx(5.5, rel=1e-12)
    # gain parameter equal to the area ratio means no amplification
    assert piezo.hn_amplification(0.25, eta_hn=0.25) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(GeometryError):
        piezo.hn_amplification(1.5)


def test_transduction_anchor_all_sign_cases():
    # bias polarity times stored polarization sets the shift direction
    for p_sign, v, expect in [(+1, 0.4, +0.0484), (-1, 0.4, -0.0484),
                              (+1, -0.4, -0.0484), (-1, -0.4, +0.0484)]:
        r = piezo.transduce(p_sign, v, PZ, FE)
        assert r.dE_G == pytest.approx(expect, abs=1e-9)
    assert piezo.transduce(+1, 0.0, PZ, FE).dE_G == 0.0


def test_transduction_stress_chain_magnitudes():
    r = piezo.transduce(+1, 0.4, PZ, FE)
    # 48.4 meV at 0.8 eV/GPa -> 60.5 MPa channel stress; 11x focusing -> 5.5 MPa film
    assert r.sigma_TMD == pytest.approx(0.0484 / 0.8e-9, rel=1e-9)
    assert r.sigma_TMD / 1e6 == pytest.approx(60.5, rel=1e-9)
    assert r.sigma_PE / 1e6 == pytest.approx(5.5, rel=1e-9)
    assert r.sigma_TMD / r.sigma_PE == pytest.approx(11.0, rel=1e-9)
    assert r.dE_G == pytest.approx(PZ.alpha_TMD * r.sigma_TMD, rel=1e-12)


def test_write_level_bias_rejected():
    with pytest.raises(BiasRangeError):
        piezo.transduce(+1, FE.V_C, PZ, FE)
    with pytest.raises(BiasRangeError):
        piezo.transduce(-1, -0.8, PZ, FE)


@given(
    v=st.floats(-0.53, 0.53),
    p_sign=st.sampled_from([-1, +1]),
)
@settings(max_examples=200, deadline=None)
def test_polarity_reversal_antisymmetry(v, p_sign):
    a = piezo.transduce(p_sign, v, PZ, FE)
    b = piezo.transduce(-p_sign, -v, PZ, FE)
    assert a.dE_G == pytest.approx(b.dE_G, abs=1e-15)
    c = piezo.transduce(p_sign, -v, PZ, FE)
    assert c.dE_G == pytest.approx(-a.dE_G, abs=1e-15)


def test_shift_monotone_in_bias_and_area_ratio():
    mags = [abs(piezo.transduce(+1, v, PZ, FE).dE_G) for v in (0.0, 0.1, 0.2, 0.3, 0.4)]
    assert all(b >= a for a, b in zip(mags, mags[1:]))
    # calibrated-gain mode pins the end-to-end shift, so widening the area
    # ratio must not increase it; the physical chain shrinks it strictly
    phys = piezo.PiezoParams(calib_gain=None)
    for params, strict in ((PZ, False), (phys, True)):
        vals = []
        for kappa in (1 / 30, 2 / 30, 6 / 30):
            p = piezo.PiezoParams(kappa=kappa, calib_gain=params.calib_gain)
            vals.append(abs(piezo.transduce(+1, 0.4, p, FE).dE_G))
        if strict:
            assert vals[0] > vals[1] > vals[2]
        else:
            assert vals[0] >= vals[1] >= vals[2]


def test_physical_chain_mode_signs_and_strain():
    phys = piezo.PiezoParams(calib_gain=None)
    r = piezo.transduce(-1, 0.4, phys, FE)
    field = 0.4 / FE.t_PE
    assert r.S_PE == pytest.approx(-phys.d33 * field, rel=1e-12)
    assert r.sigma_PE == pytest.approx(-phys.c_clamp * phys.d33 * field / phys.s_E, rel=1e-12)
    assert r.sigma_TMD == pytest.approx(r.sigma_PE * 11.0, rel=1e-9)
    assert r.dE_G < 0.0


def test_displacement_field_linear_in_field():
    sigma = 5.5e6
    d0 = piezo.displacement_field(sigma, 0.0, PZ, FE)
    d1 = piezo.displacement_field(sigma, 1e5, PZ, FE)
    d2 = piezo.displacement_field(sigma, 2e5, PZ, FE)
    assert d2 - d1 == pytest.approx(d1 - d0, rel=1e-12)
    assert d1 - d0 == pytest.approx(EPS0 * FE.eps_r * 1e5, rel=1e-12)
    assert d0 == pytest.approx(PZ.d33 * sigma, rel=1e-12)


def test_geometry_validation_in_params():
    with pytest.raises(GeometryError):
        piezo.PiezoParams(kappa=1.0)
