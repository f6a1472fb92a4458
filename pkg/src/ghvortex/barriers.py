"""Plane-wave scattering at step, delta-function and rectangular barriers.

Units are hbar = m = 1 throughout: E = k**2 / 2 and group velocities equal
wavenumbers. A plane wave arrives from x < 0 at angle ``theta`` to the x axis.

All three potentials depend on x only, so for a fixed barrier the complex
amplitudes R and T are functions of the normal wavenumber ``kx`` alone. The
vectorised kernel :func:`scattering_amplitudes` works in that variable and
everything else (angle and energy derivatives, sweeps, the momentum-space
engine) is built on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidParameter, SingularAmplitude

GRAZING_GUARD = 1e-6
AMPLITUDE_FLOOR = 1e-10


def _positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidParameter(f"{name} must be positive and finite, got {value!r}")
    return value


def _nonnegative(name, value):
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise InvalidParameter(f"{name} must be finite and >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class Step:
    """Potential step ``V(x) = V0 * Heaviside(x)``; ``V0 = 0`` is the identity medium."""

    V0: float

    def __post_init__(self):
        object.__setattr__(self, "V0", _nonnegative("V0", self.V0))


@dataclass(frozen=True)
class Delta:
    """Delta barrier ``V(x) = W0 * delta(x)``."""

    W0: float

    def __post_init__(self):
        object.__setattr__(self, "W0", _nonnegative("W0", self.W0))


@dataclass(frozen=True)
class Rect:
    """Rectangular barrier of height ``V0`` occupying ``0 < x < a``."""

    V0: float
    a: float

    def __post_init__(self):
        object.__setattr__(self, "V0", _nonnegative("V0", self.V0))
        object.__setattr__(self, "a", _positive("a", self.a))


BarrierSpec = Union[Step, Delta, Rect]

_KINDS = {"step": Step, "delta": Delta, "rect": Rect}


def barrier_to_dict(barrier: BarrierSpec) -> dict:
    kind = {Step: "step", Delta: "delta", Rect: "rect"}[type(barrier)]
    out = {"kind": kind}
    out.update(vars(barrier))
    return out


def barrier_from_dict(data: dict) -> BarrierSpec:
    data = dict(data)
    try:
        cls = _KINDS[data.pop("kind")]
    except KeyError as exc:
        raise InvalidParameter(f"unknown or missing barrier kind: {exc}") from None
    try:
        return cls(**data)
    except TypeError as exc:
        raise InvalidParameter(str(exc)) from None


def has_refraction(barrier: BarrierSpec) -> bool:
    """True when the transmitted wave changes direction (step only)."""
    return isinstance(barrier, Step)


# --------------------------------------------------------------------------
# vectorised amplitudes in the normal wavenumber
# --------------------------------------------------------------------------

def _inner_wavenumber(kx, V0):
    """Normal wavenumber behind the interface, Im >= 0 (decays into x > 0)."""
    p = kx * kx - 2.0 * V0
    root = np.sqrt(np.abs(p))
    return np.where(p > 0, root + 0j, 1j * root), p


def _rect_sc(p, a):
    """S = sin(q a)/q and C = cos(q a) as real functions of p = q**2.

    Both are even in q, which makes the rectangle amplitudes independent of
    the square-root branch. Returns S, C and their p-derivatives.
    """
    p = np.asarray(p, dtype=float)
    z = a * a * p
    S = np.empty_like(p)
    C = np.empty_like(p)
    dS = np.empty_like(p)

    small = np.abs(z) < 0.5
    big_pos = (~small) & (p > 0)
    big_neg = (~small) & (p < 0)

    if np.any(small):
        zs = z[small]
        s_sum = np.zeros_like(zs)
        ds_sum = np.zeros_like(zs)
        c_sum = np.zeros_like(zs)
        term = np.ones_like(zs)  # (-z)^n
        for n in range(16):
            s_sum += term / math.factorial(2 * n + 1)
            c_sum += term / math.factorial(2 * n)
            if n + 1 < 16:
                # d/dp of (-z)^(n+1) = -(n+1) a^2 (-z)^n
                ds_sum += -(n + 1) * term / math.factorial(2 * n + 3)
            term = term * (-zs)
        S[small] = a * s_sum
        C[small] = c_sum
        dS[small] = a**3 * ds_sum
    if np.any(big_pos):
        r = np.sqrt(p[big_pos])
        S[big_pos] = np.sin(r * a) / r
        C[big_pos] = np.cos(r * a)
    if np.any(big_neg):
        r = np.sqrt(-p[big_neg])
        S[big_neg] = np.sinh(r * a) / r
        C[big_neg] = np.cosh(r * a)
    big = ~small
    dS[big] = (a * C[big] - S[big]) / (2.0 * p[big])
    dC = -0.5 * a * S
    return S, C, dS, dC


def scattering_amplitudes(barrier: BarrierSpec, kx):
    """Return ``(R, T, dR/dkx, dT/dkx)`` for incident normal wavenumbers ``kx``.

    ``kx`` must be positive. T is the flux-normalised amplitude, so that
    ``|R|**2 + |T|**2 == 1`` for every propagating wave. At the step T is set
    to zero (with zero derivative) once the transmitted wave is evanescent.
    """
    kx = np.asarray(kx, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if isinstance(barrier, Delta):
            # kx + i W0 never vanishes for real kx.
            den = kx + 1j * barrier.W0
            R = -1j * barrier.W0 / den
            T = kx / den
            dR = 1j * barrier.W0 / den**2
            dT = dR.copy()
            return R, T, dR, dT

        if isinstance(barrier, Step):
            q, p = _inner_wavenumber(kx, barrier.V0)
            # kx > 0 and Re q >= 0, so kx + q != 0.
            den = kx + q
            R = (kx - q) / den
            dR = -4.0 * barrier.V0 / (q * den**2)
            prop = p > 0
            T = np.where(prop, 2.0 * np.sqrt(kx * q) / den, 0.0 + 0j)
            dlnT = 0.5 / kx + 0.5 * kx / q**2 - 1.0 / q
            dT = np.where(prop, T * dlnT, 0.0 + 0j)
            return R, T, dR, dT

        if isinstance(barrier, Rect):
            V0, a = barrier.V0, barrier.a
            p = kx * kx - 2.0 * V0
            S, C, dS, dC = _rect_sc(p, a)
            # F = q * (original denominator); Re F and Im F = 2 kx C cannot both
            # vanish: C = 0 needs p > 0 and then |S| = 1/q > 0 with 2kx^2-2V0 > 0.
            F = (2.0 * kx * kx - 2.0 * V0) * S + 2j * kx * C
            dF = (
                4.0 * kx * S
                + (2.0 * kx * kx - 2.0 * V0) * 2.0 * kx * dS
                + 2j * C
                + 4j * kx * kx * dC
            )
            R = 2.0 * V0 * S / F
            dR = 2.0 * V0 * (2.0 * kx * dS * F - S * dF) / F**2
            phase = np.exp(-1j * kx * a)
            T = 2j * kx * phase / F
            dT = T * (1.0 / kx - 1j * a - dF / F)
            return R, T, dR, dT

    raise InvalidParameter(f"unsupported barrier {barrier!r}")


# --------------------------------------------------------------------------
# single plane wave
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneWaveKinematics:
    E: float
    theta: float
    k: float
    kx: float
    ky: float
    regime: str  # "propagating" or "evanescent"
    kprime: float | None
    theta_prime: float | None
    kprime_x: complex | None
    theta_c: float | None
    v_g: float
    v_g_t: float

    @property
    def omega(self) -> float:
        return self.E

    @property
    def propagating(self) -> bool:
        return self.regime == "propagating"


def _check_angle(theta, guard):
    theta = float(theta)
    if not math.isfinite(theta) or theta < 0.0:
        raise InvalidParameter(f"theta must be finite and >= 0, got {theta!r}")
    if theta >= math.pi / 2 - guard:
        raise InvalidParameter(
            f"theta = {theta!r} is within {guard:g} rad of grazing incidence"
        )
    return theta


def critical_angle(barrier: BarrierSpec, E: float) -> float | None:
    """Total-reflection angle arccos(sqrt(V0/E)); 0 when E <= V0; None for delta."""
    if isinstance(barrier, Delta):
        return None
    if E <= barrier.V0:
        return 0.0
    return math.acos(math.sqrt(barrier.V0 / E))


def kinematics(barrier: BarrierSpec, E: float, theta: float, *,
               grazing_guard: float = GRAZING_GUARD) -> PlaneWaveKinematics:
    """Central plane-wave geometry for energy ``E`` and incidence angle ``theta``."""
    E = _positive("E", E)
    theta = _check_angle(theta, grazing_guard)
    k = math.sqrt(2.0 * E)
    kx = k * math.cos(theta)
    ky = k * math.sin(theta) if theta != 0.0 else 0.0

    if isinstance(barrier, Delta):
        return PlaneWaveKinematics(E, theta, k, kx, ky, "propagating",
                                   None, None, None, None, k, k)

    V0 = barrier.V0
    p = kx * kx - 2.0 * V0
    if p > 0:
        regime = "propagating"
        kprime_x = complex(math.sqrt(p), 0.0)
    else:
        regime = "evanescent"
        kprime_x = complex(0.0, math.sqrt(-p))
    kprime = math.sqrt(2.0 * (E - V0)) if E > V0 else None
    theta_prime = None
    if kprime is not None and regime == "propagating":
        theta_prime = math.asin(min(1.0, k * math.sin(theta) / kprime))
    v_g_t = k
    if isinstance(barrier, Step):
        v_g_t = kprime if regime == "propagating" else 0.0
    return PlaneWaveKinematics(E, theta, k, kx, ky, regime, kprime, theta_prime,
                               kprime_x, critical_angle(barrier, E), k, v_g_t)


def amplitudes(barrier: BarrierSpec, kin: PlaneWaveKinematics) -> tuple[complex, complex]:
    """Complex (R, T) of the central plane wave described by ``kin``."""
    R, T, _, _ = scattering_amplitudes(barrier, kin.kx)
    return complex(R), complex(T)


# --------------------------------------------------------------------------
# logarithmic derivatives
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AmplitudeBundle:
    """R, T and their logarithmic derivatives in angle and energy.

    A derivative is ``None`` for a channel whose amplitude is below the floor
    and was not requested.
    """

    R: complex
    T: complex
    dlnR_dtheta: complex | None
    dlnT_dtheta: complex | None
    dlnR_dE: complex | None
    dlnT_dE: complex | None
    fd_max_rel_dev: float | None = None

    def dtheta(self, channel):
        return self.dlnR_dtheta if channel == "r" else self.dlnT_dtheta

    def dE(self, channel):
        return self.dlnR_dE if channel == "r" else self.dlnT_dE


def _log_ratio(a, b):
    return complex(np.log(a / b))


def log_derivatives(barrier: BarrierSpec, E: float, theta: float, *,
                    channels=("r", "t"), floor: float = AMPLITUDE_FLOOR,
                    check: bool = False, fd_step: float = 1e-6,
                    grazing_guard: float = GRAZING_GUARD) -> AmplitudeBundle:
    """Closed-form d ln{R,T}/d theta (fixed E) and d ln{R,T}/dE (fixed theta).

    Raises :class:`SingularAmplitude` when a requested channel's amplitude is
    below ``floor``. With ``check=True`` every derivative is recomputed by
    central differences and the largest relative deviation is stored in
    ``fd_max_rel_dev``.
    """
    kin = kinematics(barrier, E, theta, grazing_guard=grazing_guard)
    R, T, dR, dT = (complex(v) for v in scattering_amplitudes(barrier, kin.kx))
    # kx = sqrt(2E) cos(theta)
    dkx_dtheta = -kin.k * math.sin(theta)
    dkx_dE = math.cos(theta) / kin.k

    out = {}
    for ch, amp, damp in (("r", R, dR), ("t", T, dT)):
        if abs(amp) < floor:
            if ch in channels:
                raise SingularAmplitude(ch, abs(amp), floor)
            out[ch] = (None, None)
            continue
        L = damp / amp
        out[ch] = (L * dkx_dtheta, L * dkx_dE)

    dev = None
    if check:
        dev = 0.0
        hE = fd_step * E
        hT = fd_step
        for ch, idx in (("r", 0), ("t", 1)):
            lt, le = out[ch]
            if lt is None:
                continue

            def amp_at(e, th):
                kx = math.sqrt(2.0 * e) * math.cos(th)
                return complex(scattering_amplitudes(barrier, kx)[idx])

            # amplitudes are even in theta, so the stencil may cross theta = 0
            fd_t = _log_ratio(amp_at(E, theta + hT), amp_at(E, theta - hT)) / (2 * hT)
            fd_e = _log_ratio(amp_at(E + hE, theta), amp_at(E - hE, theta)) / (2 * hE)
            for exact, approx in ((lt, fd_t), (le, fd_e)):
                scale = max(abs(exact), 1e-300)
                if abs(exact) < 1e-8 and abs(approx) < 1e-8:
                    continue
                dev = max(dev, abs(exact - approx) / scale)

    return AmplitudeBundle(R, T, out["r"][0], out["t"][0], out["r"][1], out["t"][1], dev)
