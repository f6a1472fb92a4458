"""Goos-Hanchen shifts and Wigner time delays of Gaussian and vortex wavepackets.

Three routes compute the same quantities and check one another:
:mod:`~ghvortex.shifts_analytic` (closed forms), :mod:`~ghvortex.shifts_numeric`
(momentum-space expectation values) and :mod:`~ghvortex.oracle` (real-space
centroids of a directly synthesized field).
"""

from .barriers import Delta, Rect, Step, kinematics, log_derivatives, scattering_amplitudes
from .config import ScenarioConfig, SweepSpec, Tolerances
from .errors import (
    EvanescentLeakage, GHError, GridTooCoarse, InvalidParameter, NormCollapse, SingularAmplitude,
)
from .grid import QuadratureGrid
from .shifts_analytic import total_shifts
from .shifts_numeric import ScatterMode, numeric_shifts
from .wavepacket import PacketSpec

__version__ = "0.1.0"

__all__ = [
    "Delta", "Rect", "Step", "kinematics", "log_derivatives", "scattering_amplitudes",
    "ScenarioConfig", "SweepSpec", "Tolerances",
    "EvanescentLeakage", "GHError", "GridTooCoarse", "InvalidParameter", "NormCollapse",
    "SingularAmplitude", "QuadratureGrid", "total_shifts", "ScatterMode", "numeric_shifts",
    "PacketSpec",
]
