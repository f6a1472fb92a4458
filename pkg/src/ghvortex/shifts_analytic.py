"""Closed-form Goos-Hanchen shifts and Wigner time delays.

Every shift is split into three addends: the Gaussian-packet value (Artmann
and Wigner formulas), the vortex-induced part, and the kinematic correction
that only the refracted (step-transmitted) packet picks up. The channel
frames follow the usual convention: the reflected frame has
``dkx_r = dkx`` and ``ky_r = -ky``; the transmitted frame is aligned with the
refracted central wavevector.

Longitudinal quantities are stored both as time delay ``tau`` / energy shift
``eps`` and as their comoving-coordinate equivalents
``xi = -v_g * tau`` and ``dkX = eps / v_g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import barriers as bar
from .barriers import BarrierSpec, Rect, Step
from .errors import InvalidParameter, SingularAmplitude
from .wavepacket import PacketSpec

NAN = float("nan")
CHANNELS = ("r", "t")
QUANTITIES = ("Y", "xi", "tau", "kY", "dkX", "eps")
AMPLITUDE_FLOOR = 1e-10


@dataclass(frozen=True)
class Addends:
    gaussian: float = 0.0
    vortex: float = 0.0
    correction: float = 0.0

    @property
    def total(self) -> float:
        return self.gaussian + self.vortex + self.correction

    def __add__(self, other: "Addends") -> "Addends":
        return Addends(self.gaussian + other.gaussian, self.vortex + other.vortex,
                       self.correction + other.correction)

    def scaled(self, factor: float) -> "Addends":
        return Addends(self.gaussian * factor, self.vortex * factor, self.correction * factor)


INVALID = Addends(NAN, NAN, NAN)


@dataclass(frozen=True)
class ChannelShifts:
    present: bool
    singular: bool
    v_g: float
    Y: Addends = field(default_factory=Addends)
    tau: Addends = field(default_factory=Addends)
    kY: Addends = field(default_factory=Addends)
    eps: Addends = field(default_factory=Addends)

    @property
    def xi(self) -> Addends:
        return self.tau.scaled(-self.v_g)

    @property
    def dkX(self) -> Addends:
        return self.eps.scaled(1.0 / self.v_g) if self.v_g else INVALID

    def get(self, name: str) -> Addends:
        return getattr(self, name)


@dataclass(frozen=True)
class ShiftReport:
    r: ChannelShifts
    t: ChannelShifts

    @property
    def singular(self) -> bool:
        return (self.r.present and self.r.singular) or (self.t.present and self.t.singular)

    @property
    def channel_present(self) -> dict:
        return {"r": self.r.present, "t": self.t.present}

    def channel(self, c: str) -> ChannelShifts:
        return self.r if c == "r" else self.t


@dataclass(frozen=True)
class AbcdCoefficients:
    A: float
    B: float
    C: float
    D: float


ZERO_ABCD = AbcdCoefficients(0.0, 0.0, 0.0, 0.0)


def abcd_coefficients(E: float, V0: float, theta: float) -> AbcdCoefficients:
    """Second-order refraction coefficients of the transmitted wavevector map.

    With ``n2 = E / (E - V0)`` (squared ratio of wavenumbers) one has
    ``1 - cos^2(theta)/cos^2(theta_t) = sin^2(theta) (1 - n2) / cos^2(theta_t)``,
    which removes the 0/0 of the cot/cosec forms at normal incidence.
    """
    if E <= V0:
        raise InvalidParameter("A, B, C, D are undefined without a transmitted wave (E <= V0)")
    n2 = E / (E - V0)
    s, c = math.sin(theta), math.cos(theta)
    ct2 = 1.0 - n2 * s * s
    if ct2 <= 0.0:
        raise InvalidParameter(f"theta = {theta!r} is beyond the critical angle")
    f = (1.0 - n2) / ct2
    return AbcdCoefficients(
        A=c * c * f,
        B=s * s * f,
        C=-2.0 * s * c * f,
        D=s * (1.0 - n2) / math.sqrt(ct2),
    )


# --------------------------------------------------------------------------

def singular_band_default(packet: PacketSpec) -> float:
    return 5.0 / (packet.k0 * packet.delta)


def reflection_zero_angles(barrier: BarrierSpec, E: float) -> list[float]:
    """Incidence angles where R vanishes (rectangle transmission resonances)."""
    if not isinstance(barrier, Rect):
        return []
    k = math.sqrt(2.0 * E)
    out = []
    n = 1
    while True:
        kx2 = 2.0 * barrier.V0 + (n * math.pi / barrier.a) ** 2
        if kx2 >= k * k:
            break
        out.append(math.acos(math.sqrt(kx2) / k))
        n += 1
    return out


def in_singular_band(barrier: BarrierSpec, packet: PacketSpec, channel: str,
                     band: float | None = None) -> bool:
    band = singular_band_default(packet) if band is None else band
    th = packet.theta
    if isinstance(barrier, Step):
        tc = bar.critical_angle(barrier, packet.E0)
        return tc is not None and tc > 0 and abs(th - tc) < band
    if isinstance(barrier, Rect) and channel == "r":
        return any(abs(th - z) < band for z in reflection_zero_angles(barrier, packet.E0))
    return False


@dataclass(frozen=True)
class _Context:
    present: bool
    singular: bool
    valid: bool
    v_g: float
    k_t: float
    cos_ratio: float  # cos(theta_t)/cos(theta)
    theta_t: float
    dtheta: complex
    dE: complex


def _context(barrier, packet, channel, band, floor):
    kin = bar.kinematics(barrier, packet.E0, packet.theta)
    k0 = packet.k0
    if channel == "t" and isinstance(barrier, Step) and not kin.propagating:
        return _Context(False, False, False, 0.0, 0.0, 1.0, packet.theta, 0j, 0j)
    if channel == "t" and isinstance(barrier, Step):
        theta_t, k_t = kin.theta_prime, kin.kprime
    else:
        theta_t, k_t = packet.theta, k0
    sing = in_singular_band(barrier, packet, channel, band)
    try:
        b = bar.log_derivatives(barrier, packet.E0, packet.theta, channels=(channel,),
                                floor=floor)
        d_th, d_E, valid = b.dtheta(channel), b.dE(channel), True
    except SingularAmplitude:
        d_th = d_E = complex(NAN, NAN)
        sing, valid = True, False
    return _Context(True, sing, valid, k_t, k_t, math.cos(theta_t) / math.cos(packet.theta),
                    theta_t, d_th, d_E)


def _gaussian_parts(packet, ctx, channel):
    """Return (Y0, kY0, tau0, eps0)."""
    k0, d, g = packet.k0, packet.delta, packet.gamma
    if channel == "r":
        Y0 = ctx.dtheta.imag / k0
        kY0 = -2.0 / (k0 * d * d) * ctx.dtheta.real
    else:
        Y0 = -ctx.cos_ratio / k0 * ctx.dtheta.imag
        kY0 = 2.0 / (k0 * d * d * ctx.cos_ratio) * ctx.dtheta.real
    tau0 = ctx.dE.imag
    eps0 = 2.0 * k0 * k0 / (g * g * d * d) * ctx.dE.real
    return Y0, kY0, tau0, eps0


def _vortex_parts(packet, ctx, channel, gauss):
    """Return (Y_l, kY_l, tau_l, eps_l)."""
    Y0, kY0, tau0, eps0 = gauss
    ell, g, d = packet.ell, packet.gamma, packet.delta
    if ell == 0:
        return 0.0, 0.0, 0.0, 0.0
    if channel == "r":
        pref = ell * g * d * d / (2.0 * packet.k0)
    else:
        # transmitted ellipticity gamma_t = gamma * (k_t cos theta)/(k cos theta_t):
        # the packet is compressed along X by the group-velocity ratio k_t/k
        pref = -ell * g * d * d / (2.0 * ctx.v_g) * (ctx.k_t * ctx.cos_ratio / packet.k0)
    return pref * eps0, abs(ell) * kY0, pref * kY0, abs(ell) * eps0


def _correction_parts(barrier, packet, ctx, gauss, vort):
    """Return (Y_c, kY_c, tau_c, eps_c) for the step-transmitted packet."""
    E, th = packet.E0, packet.theta
    c = abcd_coefficients(E, barrier.V0, th)
    k0, d, g, ell = packet.k0, packet.delta, packet.gamma, packet.ell
    v_g, v_gt = k0, ctx.v_g
    th_t = ctx.theta_t
    # second moments of the incident spectrum: <dkx^2> = (1+|l|)/(gamma delta)^2,
    # <ky^2> = (1+|l|)/delta^2, fed through the quadratic part of the wavevector map
    quad = (c.A / (g * g) + c.B) * (1 + abs(ell)) / (d * d)
    Y0, kY0, tau0, eps0 = gauss
    Yl, kYl, taul, epsl = vort
    kY_c = c.D * (eps0 + epsl) / v_g - math.tan(th_t) / (2.0 * ctx.k_t) * quad
    eps_c = v_gt / (2.0 * ctx.k_t) * quad
    # linear shifts: second-order part of the inverse Jacobian acting on the
    # vortex moments Re<i dkx d/dky> = -l/(2 gamma), Re<i ky d/ddkx> = l gamma/2
    cr, kr = ctx.cos_ratio, ctx.k_t / k0
    p2 = -cr * (c.D * kr + math.tan(th_t))
    Y_c = -cr * ell / (2.0 * ctx.k_t) * (g * c.B * kr - c.C * p2 / (2.0 * g))
    xi_c = -ell / (2.0 * k0) * (-(2.0 * c.A - c.D * cr * c.C) * p2 / (2.0 * g)
                                + (c.C - 2.0 * c.D * cr * c.B) * kr * g / 2.0)
    tau_c = c.D * (Y0 + Yl) / v_g - xi_c / v_gt
    return Y_c, kY_c, tau_c, eps_c


def _build(barrier, packet, band, parts, floor=AMPLITUDE_FLOOR):
    chans = {}
    for ch in CHANNELS:
        ctx = _context(barrier, packet, ch, band, floor)
        if not ctx.present:
            chans[ch] = ChannelShifts(False, False, 0.0, INVALID, INVALID, INVALID, INVALID)
            continue
        if not ctx.valid:
            chans[ch] = ChannelShifts(True, True, ctx.v_g, INVALID, INVALID, INVALID, INVALID)
            continue
        gauss = _gaussian_parts(packet, ctx, ch)
        vort = _vortex_parts(packet, ctx, ch, gauss)
        if ch == "t" and isinstance(barrier, Step):
            corr = _correction_parts(barrier, packet, ctx, gauss, vort)
        else:
            corr = (0.0, 0.0, 0.0, 0.0)
        cols = []
        for i in range(4):
            cols.append(Addends(
                gauss[i] if "gaussian" in parts else 0.0,
                vort[i] if "vortex" in parts else 0.0,
                corr[i] if "correction" in parts else 0.0,
            ))
        Y, kY, tau, eps = cols
        chans[ch] = ChannelShifts(True, ctx.singular, ctx.v_g, Y, tau, kY, eps)
    return ShiftReport(chans["r"], chans["t"])


def gaussian_shifts(barrier: BarrierSpec, packet: PacketSpec, *, band=None,
                    floor: float = AMPLITUDE_FLOOR) -> ShiftReport:
    """Artmann/Wigner shifts of a vortex-free packet (gaussian addends only)."""
    return _build(barrier, packet, band, ("gaussian",), floor)


def vortex_shifts(barrier: BarrierSpec, packet: PacketSpec, *, band=None,
                  floor: float = AMPLITUDE_FLOOR) -> ShiftReport:
    """Vortex-induced addends only; all zero for ``ell == 0``."""
    return _build(barrier, packet, band, ("vortex",), floor)


def step_transmission_corrections(barrier: BarrierSpec, packet: PacketSpec, *,
                                  band=None, floor: float = AMPLITUDE_FLOOR) -> ShiftReport:
    """A, B, C, D refraction corrections (nonzero only for step transmission)."""
    return _build(barrier, packet, band, ("correction",), floor)


def total_shifts(barrier: BarrierSpec, packet: PacketSpec, *, band=None,
                 corrections: bool = True, floor: float = AMPLITUDE_FLOOR) -> ShiftReport:
    """All addends. ``corrections=False`` gives the simplified-kinematics totals."""
    parts = ("gaussian", "vortex", "correction") if corrections else ("gaussian", "vortex")
    return _build(barrier, packet, band, parts, floor)
