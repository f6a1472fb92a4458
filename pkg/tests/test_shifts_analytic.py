import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import K_DELTA, K_RECT, K_STEP, RECT, packet
from ghvortex import barriers as bar
from ghvortex.barriers import Delta, Rect, Step
from ghvortex.errors import InvalidParameter
from ghvortex.shifts_analytic import (
    QUANTITIES, abcd_coefficients, gaussian_shifts, in_singular_band, reflection_zero_angles,
    singular_band_default, step_transmission_corrections, total_shifts, vortex_shifts,
)

LINEAR = ("Y", "xi", "tau")
ANGULAR = ("kY", "dkX", "eps")


def exact_transmitted_offsets(E, V0, theta, u, v):
    """Channel-frame offsets of the exactly refracted wavevector (Snell + energy)."""
    k0 = math.sqrt(2 * E)
    kx = (k0 + u) * math.cos(theta) - v * math.sin(theta)
    ky = (k0 + u) * math.sin(theta) + v * math.cos(theta)
    qx = math.sqrt(kx * kx - 2 * V0)
    kt = math.sqrt(2 * (E - V0))
    tt = math.asin(k0 * math.sin(theta) / kt)
    X = qx * math.cos(tt) + ky * math.sin(tt)
    Y = -qx * math.sin(tt) + ky * math.cos(tt)
    return X - kt, Y, kt


# --------------------------------------------------------------------------
# A, B, C, D
# --------------------------------------------------------------------------

@pytest.mark.parametrize("E, theta_deg", [(1.7, 25.0), (1.7, 5.0), (3.0, 40.0), (5.0, 60.0)])
def test_abcd_match_exact_refraction_hessian(E, theta_deg):
    V0 = 1.0
    th = math.radians(theta_deg)
    c = abcd_coefficients(E, V0, th)
    h = 1e-4

    def X(u, v):
        return exact_transmitted_offsets(E, V0, th, u, v)[0]

    def Y(u, v):
        return exact_transmitted_offsets(E, V0, th, u, v)[1]

    kt = exact_transmitted_offsets(E, V0, th, 0, 0)[2]
    A = kt * (X(h, 0) - 2 * X(0, 0) + X(-h, 0)) / h**2
    B = kt * (X(0, h) - 2 * X(0, 0) + X(0, -h)) / h**2
    C = 2 * kt * (X(h, h) - X(h, -h) - X(-h, h) + X(-h, -h)) / (4 * h * h)
    D = (Y(h, 0) - Y(-h, 0)) / (2 * h)
    assert c.A == pytest.approx(A, rel=1e-5, abs=1e-8)
    assert c.B == pytest.approx(B, rel=1e-5, abs=1e-8)
    assert c.C == pytest.approx(C, rel=1e-5, abs=1e-8)
    assert c.D == pytest.approx(D, rel=1e-7, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.05, 10.0), st.floats(0.01, 0.9))
def test_abcd_identities(E_over_V, frac):
    E, V0 = E_over_V, 1.0
    th = frac * bar.critical_angle(Step(V0), E)
    c = abcd_coefficients(E, V0, th)
    tt = bar.kinematics(Step(V0), E, th).theta_prime
    cot = 1 / math.tan(th)
    assert c.A == pytest.approx(cot**2 * c.B, rel=1e-12)
    assert c.C == pytest.approx(-2 * cot * c.B, rel=1e-12)
    assert c.D == pytest.approx(math.cos(tt) / math.sin(th) * c.B, rel=1e-12)


def test_abcd_normal_incidence_limit():
    c = abcd_coefficients(1.7, 1.0, 0.0)
    assert c.B == 0 and c.C == 0 and c.D == 0
    assert c.A == pytest.approx(-1 / 0.7, rel=1e-14)
    assert c.A == pytest.approx(-1.42857, abs=5e-6)
    near = abcd_coefficients(1.7, 1.0, 1e-5)
    assert near.A == pytest.approx(c.A, rel=1e-9)


def test_abcd_vanish_without_potential():
    c = abcd_coefficients(1.7, 0.0, 0.6)
    assert (c.A, c.B, c.C, c.D) == (0.0, 0.0, 0.0, 0.0)


def test_abcd_undefined_in_total_reflection():
    with pytest.raises(InvalidParameter):
        abcd_coefficients(1.7, 1.0, math.radians(50))
    with pytest.raises(InvalidParameter):
        abcd_coefficients(0.8, 1.0, 0.0)


# --------------------------------------------------------------------------
# gaussian addends
# --------------------------------------------------------------------------

def test_step_partial_regime_gaussian_linear_shifts_vanish():
    for deg in (0.0, 10.0, 20.0, 35.0):
        rep = gaussian_shifts(Step(1.0), packet(K_STEP, 628, theta_deg=deg))
        for c in ("r", "t"):
            assert abs(rep.channel(c).Y.gaussian) < 1e-14
            assert abs(rep.channel(c).tau.gaussian) < 1e-14


@pytest.mark.parametrize("k0delta", [100.0, 628.0, 3000.0])
def test_delta_reflected_gaussian_shift_example(k0delta):
    rep = gaussian_shifts(Delta(1.0), packet(K_DELTA, k0delta, theta_deg=45.0))
    kx = K_DELTA * math.cos(math.radians(45))
    im_dlnR = -K_DELTA * math.sin(math.radians(45)) / (kx**2 + 1)
    assert rep.r.Y.gaussian == pytest.approx(im_dlnR / K_DELTA, rel=1e-12)
    assert rep.r.Y.gaussian == pytest.approx(-0.12856, abs=1e-5)


def test_weak_delta_limit():
    rep = total_shifts(Delta(0.0), packet(K_DELTA, 628, theta_deg=30.0))
    assert rep.r.singular
    for q in QUANTITIES:
        assert rep.t.get(q).total == 0


def test_gaussian_addends_independent_of_charge():
    for b, k in ((Step(1.0), K_STEP), (Delta(1.0), K_DELTA), (RECT, K_RECT)):
        base = gaussian_shifts(b, packet(k, 628, ell=0, theta_deg=30))
        for ell in (-2, 1, 3):
            other = gaussian_shifts(b, packet(k, 628, ell=ell, theta_deg=30))
            for c in ("r", "t"):
                for q in QUANTITIES:
                    assert other.channel(c).get(q).gaussian == base.channel(c).get(q).gaussian


# --------------------------------------------------------------------------
# vortex addends
# --------------------------------------------------------------------------

CASES = [(Step(1.0), K_STEP, 20.0), (Step(1.0), K_STEP, 45.0), (Delta(1.0), K_DELTA, 30.0),
         (RECT, K_RECT, 50.0)]


@pytest.mark.parametrize("b, k, deg", CASES)
def test_vortex_angular_addends_scale_with_abs_charge(b, k, deg):
    g = gaussian_shifts(b, packet(k, 628, theta_deg=deg))
    for ell in (1, -1, 2, 3):
        v = vortex_shifts(b, packet(k, 628, ell=ell, theta_deg=deg))
        for c in ("r", "t"):
            if not v.channel(c).present:
                continue
            for q in ANGULAR:
                assert v.channel(c).get(q).vortex == pytest.approx(
                    abs(ell) * g.channel(c).get(q).gaussian, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("b, k, deg", CASES)
def test_vortex_charge_parity(b, k, deg):
    for ell in (1, 2, 3):
        p = vortex_shifts(b, packet(k, 628, ell=ell, theta_deg=deg))
        m = vortex_shifts(b, packet(k, 628, ell=-ell, theta_deg=deg))
        for c in ("r", "t"):
            if not p.channel(c).present:
                continue
            for q in LINEAR:
                assert m.channel(c).get(q).vortex == -p.channel(c).get(q).vortex
            for q in ANGULAR:
                assert m.channel(c).get(q).vortex == p.channel(c).get(q).vortex


def test_vortex_zero_for_gaussian_packet():
    rep = vortex_shifts(Delta(1.0), packet(K_DELTA, 628, ell=0, theta_deg=30))
    for c in ("r", "t"):
        for q in QUANTITIES:
            assert rep.channel(c).get(q).vortex == 0


def test_real_amplitude_vortex_delay():
    """Step below the critical angle: real R, yet a nonzero vortex delay."""
    p = packet(K_STEP, 628, gamma=0.4, ell=1, theta_deg=20)
    rep = total_shifts(Step(1.0), p)
    g = gaussian_shifts(Step(1.0), p)
    assert rep.r.tau.gaussian == 0
    expected = p.gamma * p.delta**2 / (2 * p.k0) * g.r.kY.gaussian
    assert rep.r.tau.vortex == pytest.approx(expected, rel=1e-12)
    assert rep.r.tau.vortex != 0


def test_delta_normal_incidence_vortex_shift():
    rep = total_shifts(Delta(1.0), packet(K_DELTA, 628, ell=1, theta_deg=0))
    assert abs(rep.r.Y.total) > 1e-3
    assert rep.r.Y.gaussian == 0


# --------------------------------------------------------------------------
# step-transmission corrections
# --------------------------------------------------------------------------

def test_corrections_only_for_step_transmission():
    for b, k in ((Delta(1.0), K_DELTA), (RECT, K_RECT), (Step(1.0), K_STEP)):
        rep = step_transmission_corrections(b, packet(k, 628, ell=1, theta_deg=25))
        for c in ("r", "t"):
            if c == "t" and isinstance(b, Step):
                continue
            for q in QUANTITIES:
                assert rep.channel(c).get(q).correction == 0


def test_corrections_for_gaussian_packet():
    rep = step_transmission_corrections(Step(1.0), packet(K_STEP, 628, ell=0, theta_deg=25))
    assert rep.t.kY.correction != 0
    assert rep.t.eps.correction != 0
    assert rep.t.Y.correction == 0
    # tau correction reduces to the D coupling of the (zero) gaussian Y shift
    assert rep.t.tau.correction == 0


def test_corrections_at_normal_incidence():
    rep = step_transmission_corrections(Step(1.0), packet(K_STEP, 628, ell=1, theta_deg=0))
    assert rep.t.Y.correction == 0
    assert rep.t.tau.correction == 0
    assert rep.t.kY.correction == 0


def test_corrections_vanish_without_potential():
    rep = step_transmission_corrections(Step(0.0), packet(K_STEP, 628, ell=2, theta_deg=30))
    for q in QUANTITIES:
        assert rep.t.get(q).correction == 0


@pytest.mark.parametrize("deg", [10.0, 25.0, 35.0])
def test_correction_charge_dependence(deg):
    b = Step(1.0)
    for ell in (1, 2):
        p = step_transmission_corrections(b, packet(K_STEP, 628, ell=ell, theta_deg=deg)).t
        m = step_transmission_corrections(b, packet(K_STEP, 628, ell=-ell, theta_deg=deg)).t
        assert m.Y.correction == pytest.approx(-p.Y.correction, rel=1e-14)
        assert m.tau.correction == pytest.approx(-p.tau.correction, rel=1e-14)
        assert m.kY.correction == p.kY.correction
        assert m.eps.correction == p.eps.correction
        g0 = step_transmission_corrections(b, packet(K_STEP, 628, ell=0, theta_deg=deg)).t
        # (1 + |l|) growth of the quadratic term
        assert p.eps.correction == pytest.approx((1 + ell) * g0.eps.correction, rel=1e-12)


# --------------------------------------------------------------------------
# totals and report structure
# --------------------------------------------------------------------------

def test_delta_gaussian_totals_equal_gaussian_addends():
    rep = total_shifts(Delta(1.0), packet(K_DELTA, 628, ell=0, theta_deg=35))
    for c in ("r", "t"):
        for q in QUANTITIES:
            a = rep.channel(c).get(q)
            assert a.total == a.gaussian


@pytest.mark.parametrize("b, k, deg", CASES + [(Step(1.0), K_STEP, 60.0)])
def test_conversion_identities(b, k, deg):
    rep = total_shifts(b, packet(k, 628, ell=1, theta_deg=deg))
    for c in ("r", "t"):
        ch = rep.channel(c)
        if not ch.present:
            continue
        for part in ("gaussian", "vortex", "correction"):
            assert getattr(ch.xi, part) == -ch.v_g * getattr(ch.tau, part)
            assert getattr(ch.eps, part) == pytest.approx(ch.v_g * getattr(ch.dkX, part),
                                                          rel=1e-15, abs=0)


def test_transmission_absent_in_total_reflection():
    rep = total_shifts(Step(1.0), packet(K_STEP, 628, theta_deg=60))
    assert rep.channel_present == {"r": True, "t": False}
    assert not rep.singular
    assert math.isfinite(rep.r.Y.total)


def test_singular_band_flags():
    p = packet(K_STEP, 628, theta_deg=0)
    band = singular_band_default(p)
    assert band == pytest.approx(5 / 628)
    tc = bar.critical_angle(Step(1.0), p.E0)
    near = total_shifts(Step(1.0), p.with_theta(tc - 0.5 * band))
    assert near.singular and near.r.singular and near.t.singular
    assert math.isfinite(near.r.Y.total)
    far = total_shifts(Step(1.0), p.with_theta(tc - 3 * band))
    assert not far.singular
    assert total_shifts(Step(1.0), p.with_theta(tc - 3 * band), band=4 * band).singular


def test_rect_reflection_zero_is_singular():
    E = K_RECT**2 / 2
    zeros = reflection_zero_angles(RECT, E)
    assert len(zeros) == 1
    R, _, _, _ = bar.scattering_amplitudes(RECT, K_RECT * math.cos(zeros[0]))
    assert abs(R) < 1e-12
    p = packet(K_RECT, 628, theta_deg=math.degrees(zeros[0]))
    rep = total_shifts(RECT, p)
    assert rep.r.singular and rep.singular
    assert not rep.t.singular
    assert in_singular_band(RECT, p, "r") and not in_singular_band(RECT, p, "t")


@pytest.mark.parametrize("b, k", [(Step(1.0), K_STEP), (Delta(1.0), K_DELTA), (RECT, K_RECT)])
def test_dimensional_scaling(b, k):
    s = 2.5
    if isinstance(b, Step):
        scaled = Step(b.V0 / s**2)
    elif isinstance(b, Delta):
        scaled = Delta(b.W0 / s)
    else:
        scaled = Rect(b.V0 / s**2, b.a * s)
    for ell in (0, 1, -2):
        p = packet(k, 628, ell=ell, theta_deg=28)
        q = packet(k / s, 628, ell=ell, theta_deg=28)
        assert q.delta == pytest.approx(s * p.delta)
        a, c = total_shifts(b, p), total_shifts(scaled, q)
        for ch in ("r", "t"):
            for name, power in (("Y", 1), ("xi", 1), ("kY", -1), ("dkX", -1)):
                x, y = a.channel(ch).get(name).total, c.channel(ch).get(name).total
                assert y == pytest.approx(x * s**power, rel=1e-10, abs=1e-300)
