"""Exception hierarchy shared by all modules."""


class GHError(Exception):
    """Base class for all ghvortex errors."""


class InvalidParameter(GHError, ValueError):
    """An input is non-finite, out of range, or violates a precondition."""


class SingularAmplitude(GHError):
    """A logarithmic derivative was requested where the amplitude vanishes."""

    def __init__(self, channel, magnitude, floor):
        self.channel = channel
        self.magnitude = magnitude
        self.floor = floor
        super().__init__(
            f"|{channel.upper()}| = {magnitude:.3e} is below the floor {floor:.1e}"
        )


class GridTooCoarse(GHError):
    """Quadrature did not converge under grid refinement."""


class EvanescentLeakage(GHError):
    """Too much spectral power falls on evanescent transmitted plane waves."""


class NormCollapse(GHError):
    """The scattered channel carries (numerically) no probability."""
