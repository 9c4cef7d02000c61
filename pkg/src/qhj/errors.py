"""Exception hierarchy shared by all qhj modules.

Every failure raised by this package derives from :class:`QhjError`, so
callers (including the command-line front end) can distinguish numerical
failures from programming errors with a single ``except`` clause.
"""

from __future__ import annotations


class QhjError(Exception):
    """Base class for all errors raised by the qhj package."""


class DomainError(QhjError):
    """A coordinate lies outside the natural domain of a potential family."""


class ForbiddenRegionError(QhjError):
    """The classical momentum was requested at a point with E < V(x)."""


class NoTurningPointsError(QhjError):
    """The energy does not admit a classically bound region."""


class NoSuchLevelError(QhjError):
    """The requested quantum number has no bound state at these parameters."""


class ScanExhaustedError(QhjError):
    """An energy bracket could not be found within the scan limits."""


class UnsupportedModelError(QhjError):
    """The operation is not defined for this family or parameter regime."""


class CorrectionUndefinedError(QhjError):
    """The correction factor G = sqrt(1 + F) - 1 is undefined at a point.

    Carries the offending abscissa in :attr:`x`.
    """

    def __init__(self, x: float, message: str | None = None) -> None:
        self.x = float(x)
        if message is None:
            message = f"1 + F <= 0 at x = {x:.6g}; G is undefined there"
        super().__init__(message)


class AmplitudeIntegrationError(QhjError):
    """Adaptive integration of the amplitude equation failed to converge."""
