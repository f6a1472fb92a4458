"""Momentum-space expectation values of scattered wavepackets.

Each plane wave of the incident spectrum is multiplied by its own reflection
or transmission amplitude (exact, or the first-order Taylor expansion about
the central wave). Positions are expectation values of ``i d/dk`` in the
channel frame; those derivatives are rewritten in incident-frame variables
``(dkx, ky)`` through the inverse Jacobian of the channel's wavevector map
and applied analytically to ``amplitude * spectrum``.

Integrals use the incident measure ``d dkx d ky``. Because the transmission
amplitude is flux-normalised, ``|T psi|^2 d2k`` is exactly the probability
carried into ``d2k_t``, so no Jacobian appears in the weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import barriers as bar
from .barriers import BarrierSpec, Step
from .errors import EvanescentLeakage, InvalidParameter, NormCollapse
from .grid import QuadratureGrid
from .shifts_analytic import ZERO_ABCD, AbcdCoefficients, abcd_coefficients
from .wavepacket import PacketSpec, spectrum_gradient

LEAKAGE_LIMIT = 1e-6
NORM_FLOOR = 1e-30
DEFAULT_GRID = QuadratureGrid()

AMPLITUDE_MODES = ("exact", "taylor")
KINEMATICS_MODES = ("full", "simplified")


@dataclass(frozen=True)
class ScatterMode:
    amplitude: str = "taylor"
    kinematics: str = "simplified"

    def __post_init__(self):
        if self.amplitude not in AMPLITUDE_MODES:
            raise InvalidParameter(f"amplitude mode must be one of {AMPLITUDE_MODES}")
        if self.kinematics not in KINEMATICS_MODES:
            raise InvalidParameter(f"kinematics mode must be one of {KINEMATICS_MODES}")


@dataclass(frozen=True)
class ChannelGeometry:
    """Central-wave data of one outgoing channel."""

    channel: str
    theta: float
    theta_t: float
    k0: float
    k_t: float
    abcd: AbcdCoefficients

    @property
    def cos_ratio(self):  # cos(theta_t) / cos(theta)
        return math.cos(self.theta_t) / math.cos(self.theta)


def channel_geometry(barrier: BarrierSpec, packet: PacketSpec, channel: str,
                     kinematics: str = "full") -> ChannelGeometry:
    kin = bar.kinematics(barrier, packet.E0, packet.theta)
    th = packet.theta
    if channel == "r" or not isinstance(barrier, Step):
        return ChannelGeometry(channel, th, th, packet.k0, packet.k0, ZERO_ABCD)
    if not kin.propagating:
        raise NormCollapse("no propagating transmitted central wave (total reflection)")
    abcd = abcd_coefficients(packet.E0, barrier.V0, th) if kinematics == "full" else ZERO_ABCD
    return ChannelGeometry(channel, th, kin.theta_prime, packet.k0, kin.kprime, abcd)


def kinematic_map(dkx, ky, packet: PacketSpec, barrier: BarrierSpec, *,
                  kinematics: str = "full"):
    """Map incident offsets to channel-frame offsets.

    Returns ``((dkx_t, ky_t), (dkx_r, ky_r))``. The transmitted map is the
    second-order paraxial expansion; ``kinematics="simplified"`` keeps only
    the linear part.
    """
    dkx = np.asarray(dkx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    g = channel_geometry(barrier, packet, "t", kinematics)
    c = g.abcd
    quad = c.A * dkx**2 + c.B * ky**2 + c.C * dkx * ky
    dkx_t = g.k0 / g.k_t * dkx + quad / (2.0 * g.k_t)
    ky_t = ky / g.cos_ratio + c.D * dkx - math.tan(g.theta_t) / (2.0 * g.k_t) * quad
    return (dkx_t, ky_t), (dkx, -ky)


@dataclass
class ScatteredSpectrum:
    """Sampled ``amplitude * spectrum`` and its incident-frame gradient."""

    channel: str
    packet: PacketSpec
    barrier: BarrierSpec
    mode: ScatterMode
    geometry: ChannelGeometry
    dkx: np.ndarray
    ky: np.ndarray
    weights: np.ndarray
    value: np.ndarray
    d_dkx: np.ndarray
    d_ky: np.ndarray
    leakage: float = 0.0
    evanescent_points: int = 0

    @property
    def norm(self) -> float:
        return float(np.sum(self.weights * (self.value.conj() * self.value).real))

    def channel_coordinates(self):
        """Channel-frame ``(dkx_c, ky_c)`` of every sample."""
        if self.channel == "r":
            return self.dkx, -self.ky
        (xt, yt), _ = kinematic_map(self.dkx, self.ky, self.packet, self.barrier,
                                    kinematics=self.mode.kinematics)
        return xt, yt


def _channel_index(channel):
    if channel not in ("r", "t"):
        raise InvalidParameter(f"channel must be 'r' or 't', got {channel!r}")
    return 0 if channel == "r" else 1


def scattered_spectrum(barrier: BarrierSpec, packet: PacketSpec, channel: str,
                       mode: ScatterMode = ScatterMode(),
                       grid: QuadratureGrid = DEFAULT_GRID, *,
                       leakage_limit: float = LEAKAGE_LIMIT) -> ScatteredSpectrum:
    """Apply per-plane-wave R or T to the incident spectrum on ``grid``."""
    idx = _channel_index(channel)
    if channel == "t" and isinstance(barrier, Step) and \
            not bar.kinematics(barrier, packet.E0, packet.theta).propagating:
        geom = ChannelGeometry(channel, packet.theta, float("nan"), packet.k0, 0.0, ZERO_ABCD)
    else:
        geom = channel_geometry(barrier, packet, channel, mode.kinematics)

    U, V, W = grid.mesh(*packet.spectral_widths)
    psi, psi_u, psi_v = spectrum_gradient(packet, U, V)
    cth, sth = math.cos(packet.theta), math.sin(packet.theta)
    kx = (packet.k0 + U) * cth - V * sth
    if np.any(kx <= 0):
        raise InvalidParameter("part of the spectrum is not incident on the barrier (kx <= 0)")

    leakage, n_evan = 0.0, 0
    if mode.amplitude == "exact":
        amps = bar.scattering_amplitudes(barrier, kx)
        S, dS = amps[idx], amps[idx + 2]
        if channel == "t" and isinstance(barrier, Step):
            evan = kx * kx <= 2.0 * barrier.V0
            n_evan = int(evan.sum())
            if n_evan:
                dens = W * (psi.conj() * psi).real
                leakage = float(dens[evan].sum() / dens.sum())
                if leakage > leakage_limit:
                    raise EvanescentLeakage(
                        f"{leakage:.2e} of the spectral power is evanescent in transmission"
                    )
    else:
        kx0 = packet.k0 * cth
        amps = bar.scattering_amplitudes(barrier, kx0)
        S0, dS0 = complex(amps[idx]), complex(amps[idx + 2])
        S = S0 + dS0 * (kx - kx0)
        dS = np.full_like(S, dS0)

    value = S * psi
    d_u = dS * cth * psi + S * psi_u
    d_v = -dS * sth * psi + S * psi_v
    return ScatteredSpectrum(channel, packet, barrier, mode, geom, U, V, W,
                             value, d_u, d_v, leakage, n_evan)


@dataclass(frozen=True)
class NumericShiftResult:
    channel: str
    Y: float
    xi: float
    kY: float
    dkX: float
    tau: float
    eps: float
    v_g: float
    norm: float
    leakage: float = 0.0
    imag_Y: float = 0.0     # Hermiticity residues: should vanish up to quadrature error
    imag_xi: float = 0.0

    def get(self, name: str) -> float:
        return getattr(self, name)


def _position(spec, N, du, dv) -> complex:
    """``<i (du d/ddkx + dv d/dky)>``; its real part is the Hermitian expectation."""
    return complex(np.sum(spec.weights * spec.value.conj() * 1j
                          * (du * spec.d_dkx + dv * spec.d_ky)) / N)


def _inverse_jacobian(u, v, g: ChannelGeometry):
    """Pointwise inverse of the Jacobian of :func:`kinematic_map` (transmitted).

    Returns ``(du/dX, dv/dX, du/dY, dv/dY)``: the incident-frame components of
    ``d/d dk_X^t`` and ``d/d k_Y^t``.
    """
    c = g.abcd
    tt = math.tan(g.theta_t)
    alpha = (2.0 * c.A * u + c.C * v) / (2.0 * g.k_t)
    beta = (2.0 * c.B * v + c.C * u) / (2.0 * g.k_t)
    j11 = g.k0 / g.k_t + alpha
    j12 = beta
    j21 = c.D - tt * alpha
    j22 = 1.0 / g.cos_ratio - tt * beta
    det = j11 * j22 - j12 * j21
    return j22 / det, -j21 / det, -j12 / det, j11 / det


def _log_jacobian_gradient(u, v, g: ChannelGeometry):
    """``(d/du, d/dv) ln|det J|`` of the transmitted map."""
    c = g.abcd
    tt = math.tan(g.theta_t)
    two_k = 2.0 * g.k_t
    alpha = (2.0 * c.A * u + c.C * v) / two_k
    beta = (2.0 * c.B * v + c.C * u) / two_k
    j11 = g.k0 / g.k_t + alpha
    j22 = 1.0 / g.cos_ratio - tt * beta
    j21 = c.D - tt * alpha
    det = j11 * j22 - beta * j21
    a_u, a_v = 2.0 * c.A / two_k, c.C / two_k
    b_u, b_v = c.C / two_k, 2.0 * c.B / two_k

    def d(a_d, b_d):
        return a_d * j22 - j11 * tt * b_d - b_d * j21 + beta * tt * a_d

    return d(a_u, b_u) / det, d(a_v, b_v) / det


def expectation_shifts(spec: ScatteredSpectrum, *, norm_floor: float = NORM_FLOOR
                       ) -> NumericShiftResult:
    """Position and wavevector expectation values in the channel frame."""
    N = spec.norm
    if not N > norm_floor:
        raise NormCollapse(f"channel {spec.channel!r} norm {N:.2e} is below {norm_floor:.0e}")
    u, v = spec.dkx, spec.ky
    dens = spec.weights * (spec.value.conj() * spec.value).real
    g = spec.geometry

    if spec.channel == "r":
        Y = _position(spec, N, 0.0, -1.0)
        xi = _position(spec, N, 1.0, 0.0)
        kY = -float(np.sum(dens * v) / N)
        dkX = float(np.sum(dens * u) / N)
        imag_Y, imag_xi = Y.imag, xi.imag
    else:
        ux, vx, uy, vy = _inverse_jacobian(u, v, g)
        Y = _position(spec, N, uy, vy)
        xi = _position(spec, N, ux, vx)
        (xt, yt), _ = kinematic_map(u, v, spec.packet, spec.barrier,
                                    kinematics=spec.mode.kinematics)
        kY = float(np.sum(dens * yt) / N)
        dkX = float(np.sum(dens * xt) / N)
        # In the channel measure d^2K = |det J| d^2k the wavefunction is
        # value / sqrt|det J|; that rescaling adds -(1/2) <grad_K ln|det J|>
        # to the imaginary part, which then vanishes for a Hermitian operator.
        lu, lv = _log_jacobian_gradient(u, v, g)
        imag_Y = Y.imag - 0.5 * float(np.sum(dens * (uy * lu + vy * lv)) / N)
        imag_xi = xi.imag - 0.5 * float(np.sum(dens * (ux * lu + vx * lv)) / N)

    v_g = g.k_t
    return NumericShiftResult(spec.channel, Y.real, xi.real, kY, dkX, -xi.real / v_g,
                              v_g * dkX, v_g, N, spec.leakage, imag_Y, imag_xi)


def numeric_shifts(barrier: BarrierSpec, packet: PacketSpec, channel: str,
                   mode: ScatterMode = ScatterMode(),
                   grid: QuadratureGrid = DEFAULT_GRID) -> NumericShiftResult:
    """Convenience: :func:`scattered_spectrum` followed by :func:`expectation_shifts`."""
    return expectation_shifts(scattered_spectrum(barrier, packet, channel, mode, grid))
