"""Tensor-product quadrature grids scaled to a packet's widths."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameter

RULES = ("trapezoid", "gauss-legendre")


@dataclass(frozen=True)
class QuadratureGrid:
    """Odd-sized grid spanning ``+-extent`` widths on each axis.

    Widths are supplied at evaluation time, so one grid description serves the
    momentum-space engine, the OAM integral and the oracle alike.
    """

    nx: int = 257
    ny: int = 257
    extent: float = 6.0
    rule: str = "trapezoid"

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n or n < 65 or n % 2 == 0:
                raise InvalidParameter(f"{name} must be an odd integer >= 65, got {n!r}")
        if not self.extent >= 6.0:
            raise InvalidParameter(f"extent must cover at least 6 widths, got {self.extent!r}")
        if self.rule not in RULES:
            raise InvalidParameter(f"rule must be one of {RULES}, got {self.rule!r}")
        if self.rule == "trapezoid":
            for n in (self.nx, self.ny):
                if 2.0 * self.extent / (n - 1) >= 1.0 / 8.0:
                    raise InvalidParameter(
                        f"{n} points over +-{self.extent} widths leaves spacing >= width/8"
                    )

    def axis(self, n: int, width: float):
        """Nodes and weights on ``[-extent*width, extent*width]``."""
        half = self.extent * width
        if self.rule == "trapezoid":
            x = np.linspace(-half, half, n)
            w = np.full(n, x[1] - x[0])
            w[0] *= 0.5
            w[-1] *= 0.5
        else:
            t, w = np.polynomial.legendre.leggauss(n)
            x = half * t
            w = half * w
        return x, w

    def mesh(self, width_x: float, width_y: float):
        """Return ``(X, Y, W)`` 2-D arrays (ij indexing) of nodes and weights."""
        x, wx = self.axis(self.nx, width_x)
        y, wy = self.axis(self.ny, width_y)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return X, Y, np.outer(wx, wy)

    def refined(self) -> "QuadratureGrid":
        """The grid with (roughly) doubled resolution, keeping odd sizes."""
        return replace(self, nx=2 * self.nx - 1, ny=2 * self.ny - 1)

    @classmethod
    def parse(cls, text: str, **kw) -> "QuadratureGrid":
        """Build from ``"NxM"`` (as accepted by the command line)."""
        try:
            nx, ny = (int(s) for s in text.lower().split("x"))
        except ValueError:
            raise InvalidParameter(f"grid must look like 257x257, got {text!r}") from None
        return cls(nx=nx, ny=ny, **kw)
