"""Shared fixtures and independent reference solutions for the test suite."""

import math
import warnings

import numpy as np
import pytest

from ghvortex.barriers import Delta, Rect, Step
from ghvortex.wavepacket import PacketSpec, ParaxialityWarning

# Canonical figure parameters (natural units, V0 = W0 = 1)
K_STEP = math.sqrt(3.4)      # E0/V0 = 1.7
K_DELTA = 3.0                # k0/W0 = 3
K_RECT = math.sqrt(6.0)      # E0/V0 = 3, k0 a = 5
RECT = Rect(1.0, 5.0 / K_RECT)


def packet(k0, k0delta, gamma=0.4, ell=1, theta_deg=0.0):
    """PacketSpec from the dimensionless size k0*Delta, without paraxiality warnings."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParaxialityWarning)
        return PacketSpec(k0, k0delta / k0, gamma, ell, math.radians(theta_deg))


def bc_solve(barrier, kx):
    """Reflection and transmission by solving the matching conditions directly.

    The wave ``exp(i kx x) + r exp(-i kx x)`` on the left is matched to the
    solution inside/behind the potential with a dense linear solve. Returns
    ``(r, t)`` where ``t`` multiplies the outgoing wave on the far side
    (``exp(i q x)`` for the step, ``exp(i kx x)`` otherwise), not flux-normalised.
    """
    kx = complex(kx)
    if isinstance(barrier, Step):
        q = np.sqrt(complex(kx * kx - 2.0 * barrier.V0))
        if q.imag < 0:
            q = -q
        # psi(0): 1 + r = t ; psi'(0): i kx (1 - r) = i q t
        M = np.array([[1.0, -1.0], [-1j * kx, -1j * q]])
        rhs = np.array([-1.0, -1j * kx])
        r, t = np.linalg.solve(M, rhs)
        return r, t, q
    if isinstance(barrier, Delta):
        # continuity and derivative jump psi'(0+) - psi'(0-) = 2 W0 psi(0)
        W0 = barrier.W0
        # i kx (t - 1 + r) = 2 W0 t
        M = np.array([[1.0, -1.0], [1j * kx, 1j * kx - 2.0 * W0]])
        rhs = np.array([-1.0, 1j * kx])
        r, t = np.linalg.solve(M, rhs)
        return r, t, kx
    if isinstance(barrier, Rect):
        return rect_solve(barrier, kx, branch=+1)
    raise TypeError(barrier)


def rect_solve(barrier, kx, branch=+1):
    """Rectangle matching with unknowns (r, A, B, t); ``branch`` picks the sign of q."""
    V0, a = barrier.V0, barrier.a
    q = np.sqrt(complex(kx * kx - 2.0 * V0))
    if q.imag < 0 or (q.imag == 0 and q.real < 0):
        q = -q
    q = branch * q
    e = np.exp
    M = np.array([
        [1.0, -1.0, -1.0, 0.0],
        [-1j * kx, -1j * q, 1j * q, 0.0],
        [0.0, e(1j * q * a), e(-1j * q * a), -e(1j * kx * a)],
        [0.0, 1j * q * e(1j * q * a), -1j * q * e(-1j * q * a), -1j * kx * e(1j * kx * a)],
    ], dtype=complex)
    rhs = np.array([-1.0, -1j * kx, 0.0, 0.0], dtype=complex)
    r, _, _, t = np.linalg.solve(M, rhs)
    return r, t, q


@pytest.fixture
def step():
    return Step(1.0)


@pytest.fixture
def delta():
    return Delta(1.0)


@pytest.fixture
def rect():
    return RECT
