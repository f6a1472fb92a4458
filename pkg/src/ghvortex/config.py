"""Scenario configuration: one JSON document per run.

Angles are in degrees in the file and radians everywhere else. Units are
natural (hbar = m = 1), which the serialized form states explicitly.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .barriers import BarrierSpec, barrier_from_dict, barrier_to_dict
from .errors import InvalidParameter
from .grid import QuadratureGrid
from .shifts_numeric import ScatterMode
from .wavepacket import PacketSpec, ParaxialityWarning

UNITS_NOTE = "natural units: hbar = m = 1; energies k^2/2; angles in degrees"
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SweepSpec:
    """Inclusive, evenly spaced incidence angles in degrees (``n == 1`` is a single point)."""

    start_deg: float
    end_deg: float | None = None
    n_points: int = 1

    def __post_init__(self):
        end = self.start_deg if self.end_deg is None else self.end_deg
        object.__setattr__(self, "end_deg", float(end))
        object.__setattr__(self, "start_deg", float(self.start_deg))
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise InvalidParameter(f"n_points must be a positive integer, got {self.n_points!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        for v in (self.start_deg, self.end_deg):
            if not math.isfinite(v) or not 0.0 <= v < 90.0:
                raise InvalidParameter(f"incidence angles must lie in [0, 90) degrees, got {v!r}")

    def angles_deg(self) -> np.ndarray:
        if self.n_points == 1:
            return np.array([self.start_deg])
        return np.linspace(self.start_deg, self.end_deg, self.n_points)


@dataclass(frozen=True)
class Tolerances:
    singular_band: float | None = None   # rad; None -> 5/(k0 Delta)
    amplitude_floor: float = 1e-10
    leakage_limit: float = 1e-6
    norm_floor: float = 1e-30
    grazing_guard: float = 1e-6          # rad

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None and f.name == "singular_band":
                continue
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise InvalidParameter(f"tolerance {f.name} must be a finite number >= 0, got {v!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    barrier: BarrierSpec
    packet: PacketSpec
    sweep: SweepSpec
    mode: ScatterMode = field(default_factory=ScatterMode)
    grid: QuadratureGrid = field(default_factory=QuadratureGrid)
    output: str | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)

    def packets(self):
        """Yield ``(theta_deg, PacketSpec)`` for every sweep angle."""
        for deg in self.sweep.angles_deg():
            yield float(deg), self.packet.with_theta(math.radians(deg))

    def validate(self) -> "ScenarioConfig":
        """Check every sweep point against the packet preconditions before computing."""
        guard = self.tolerances.grazing_guard
        for deg, _ in self.packets():
            if math.radians(deg) > math.pi / 2 - guard:
                raise InvalidParameter(f"theta = {deg} deg is within the grazing guard band")
        return self

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        p = self.packet
        return {
            "schema": SCHEMA_VERSION,
            "units": UNITS_NOTE,
            "barrier": barrier_to_dict(self.barrier),
            "packet": {"k0": p.k0, "delta": p.delta, "gamma": p.gamma, "ell": p.ell},
            "sweep": asdict(self.sweep),
            "mode": {"amplitude": self.mode.amplitude, "kinematics": self.mode.kinematics},
            "grid": asdict(self.grid),
            "output": self.output,
            "tolerances": asdict(self.tolerances),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ParaxialityWarning)
                packet = PacketSpec(**d["packet"])
            return cls(
                barrier=barrier_from_dict(d["barrier"]),
                packet=packet,
                sweep=SweepSpec(**d["sweep"]),
                mode=ScatterMode(**d.get("mode", {})),
                grid=QuadratureGrid(**d.get("grid", {})),
                output=d.get("output"),
                tolerances=Tolerances(**d.get("tolerances", {})),
            ).validate()
        except (KeyError, TypeError) as exc:
            raise InvalidParameter(f"malformed configuration: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidParameter(f"configuration is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidParameter("configuration must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()
