"""Benchmark potential families: evaluation, classical momentum, turning points.

Five one-dimensional families are supported.  Each is described by a frozen
:class:`PotentialModel` value created through one of the factory functions
(:func:`harmonic`, :func:`morse`, :func:`coulomb_centrifugal`,
:func:`cot_squared`, :func:`quartic`).  Models are immutable and hashable,
so they are safe to share between threads and to use as cache keys.

Conventions used throughout the package:

* the classical momentum is the positive branch ``sqrt(2 m (E - V(x)))``;
* action integrals run over the half cycle between the two turning points
  ``x1 < x2``;
* ``hbar`` and ``mass`` default to 1 but are carried explicitly so every
  formula stays dimensionally honest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, ForbiddenRegionError, NoTurningPointsError

__all__ = [
    "Family",
    "PotentialModel",
    "TurningPair",
    "harmonic",
    "morse",
    "coulomb_centrifugal",
    "cot_squared",
    "quartic",
    "evaluate",
    "potential_derivatives",
    "classical_momentum",
    "turning_points",
    "bound_energy_range",
]


class Family(str, Enum):
    """The supported potential families.

    The enum values double as the names accepted by the command line.
    """

    HARMONIC = "harmonic"
    MORSE = "morse"
    COULOMB_CENTRIFUGAL = "hydrogen"
    COT_SQUARED = "cot2"
    QUARTIC = "quartic"


@dataclass(frozen=True)
class PotentialModel:
    """A potential family together with its parameters and unit constants.

    Only the fields meaningful for ``family`` are used:

    * ``HARMONIC``: ``omega`` (angular frequency), V(x) = m omega^2 x^2 / 2;
    * ``MORSE``: ``V0`` (well depth), ``a`` (inverse length),
      V(x) = V0 (exp(-2 a x) - 2 exp(-a x)), minimum -V0 at x = 0;
    * ``COULOMB_CENTRIFUGAL``: ``e2`` (charge squared), ``l`` (azimuthal
      integer), radial effective potential
      V(r) = -e2 / r + hbar^2 l (l + 1) / (2 m r^2) on r > 0;
    * ``COT_SQUARED``: ``V0``, ``a`` (box width), V(x) = V0 cot^2(pi x / a)
      on 0 < x < a with hard walls at both ends;
    * ``QUARTIC``: ``a``, V(x) = x^4 / a.

    Instances should be built with the factory functions below, which
    validate the parameters.
    """

    family: Family
    omega: float = 0.0
    V0: float = 0.0
    a: float = 0.0
    e2: float = 0.0
    l: int = 0
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self) -> None:
        if self.hbar <= 0.0 or self.mass <= 0.0:
            raise ValueError("hbar and mass must be strictly positive")

    def params_text(self) -> str:
        """Compact ``key=value`` rendering of the family parameters.

        Multiple parameters are joined with ``;`` so the string stays a
        single CSV cell.
        """
        if self.family is Family.HARMONIC:
            return f"omega={self.omega:.6g}"
        if self.family is Family.MORSE:
            return f"V0={self.V0:.6g};a={self.a:.6g}"
        if self.family is Family.COULOMB_CENTRIFUGAL:
            return f"e2={self.e2:.6g};l={self.l}"
        if self.family is Family.COT_SQUARED:
            return f"V0={self.V0:.6g};a={self.a:.6g}"
        return f"a={self.a:.6g}"


@dataclass(frozen=True)
class TurningPair:
    """The classical turning points ``x1 < x2`` of (model, E).

    ``x1_is_boundary`` marks the Coulomb l = 0 case, where the inner
    endpoint is the domain boundary r = 0 rather than a root of V(x) = E.
    """

    x1: float
    x2: float
    x1_is_boundary: bool = False


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a strictly positive finite number")
    return value


def harmonic(omega: float = 1.0, hbar: float = 1.0, mass: float = 1.0) -> PotentialModel:
    """Harmonic oscillator V(x) = m omega^2 x^2 / 2."""
    return PotentialModel(
        Family.HARMONIC,
        omega=_positive("omega", omega),
        hbar=_positive("hbar", hbar),
        mass=_positive("mass", mass),
    )


def morse(V0: float = 32.0, a: float = 1.0, hbar: float = 1.0, mass: float = 1.0) -> PotentialModel:
    """Morse well V(x) = V0 (exp(-2 a x) - 2 exp(-a x))."""
    return PotentialModel(
        Family.MORSE,
        V0=_positive("V0", V0),
        a=_positive("a", a),
        hbar=_positive("hbar", hbar),
        mass=_positive("mass", mass),
    )


def coulomb_centrifugal(
    e2: float = 1.0, l: int = 0, hbar: float = 1.0, mass: float = 1.0
) -> PotentialModel:
    """Radial Coulomb plus centrifugal barrier on r > 0."""
    l = int(l)
    if l < 0:
        raise ValueError("l must be a non-negative integer")
    return PotentialModel(
        Family.COULOMB_CENTRIFUGAL,
        e2=_positive("e2", e2),
        l=l,
        hbar=_positive("hbar", hbar),
        mass=_positive("mass", mass),
    )


def cot_squared(V0: float = 1.0, a: float = math.pi, hbar: float = 1.0, mass: float = 1.0) -> PotentialModel:
    """Hard-walled well V(x) = V0 cot^2(pi x / a) on 0 < x < a."""
    return PotentialModel(
        Family.COT_SQUARED,
        V0=_positive("V0", V0),
        a=_positive("a", a),
        hbar=_positive("hbar", hbar),
        mass=_positive("mass", mass),
    )


def quartic(a: float = 1.0, hbar: float = 1.0, mass: float = 1.0) -> PotentialModel:
    """Purely quartic oscillator V(x) = x^4 / a."""
    return PotentialModel(
        Family.QUARTIC,
        a=_positive("a", a),
        hbar=_positive("hbar", hbar),
        mass=_positive("mass", mass),
    )


def _check_domain(model: PotentialModel, x: np.ndarray) -> None:
    if model.family is Family.COT_SQUARED:
        if np.any(x <= 0.0) or np.any(x >= model.a):
            raise DomainError(
                f"cot2 potential is defined on 0 < x < a = {model.a:.6g} only"
            )
    elif model.family is Family.COULOMB_CENTRIFUGAL:
        if np.any(x <= 0.0):
            raise DomainError("radial potential is defined on r > 0 only")


def evaluate(model: PotentialModel, x):
    """Evaluate V(x) for a scalar or array argument.

    Raises :class:`DomainError` when any point lies outside the family's
    natural domain (cot2: 0 < x < a; Coulomb: x > 0).
    """
    arr = np.asarray(x, dtype=float)
    _check_domain(model, arr)
    f = model.family
    if f is Family.HARMONIC:
        v = 0.5 * model.mass * model.omega**2 * arr**2
    elif f is Family.MORSE:
        e = np.exp(-model.a * arr)
        v = model.V0 * (e * e - 2.0 * e)
    elif f is Family.COULOMB_CENTRIFUGAL:
        ll = model.l * (model.l + 1)
        v = -model.e2 / arr + model.hbar**2 * ll / (2.0 * model.mass * arr**2)
    elif f is Family.COT_SQUARED:
        c = 1.0 / np.tan(np.pi * arr / model.a)
        v = model.V0 * c * c
    else:
        v = arr**4 / model.a
    return float(v) if np.ndim(x) == 0 else v


def potential_derivatives(model: PotentialModel, x):
    """Return (V, V', V'') at ``x`` (scalar or array).

    Analytic derivatives are needed by the series starts of the integrators;
    they are exact, never finite differences.
    """
    arr = np.asarray(x, dtype=float)
    _check_domain(model, arr)
    f = model.family
    if f is Family.HARMONIC:
        k = model.mass * model.omega**2
        v, v1, v2 = 0.5 * k * arr**2, k * arr, np.full_like(arr, k)
    elif f is Family.MORSE:
        e = np.exp(-model.a * arr)
        v = model.V0 * (e * e - 2.0 * e)
        v1 = model.V0 * model.a * (-2.0 * e * e + 2.0 * e)
        v2 = model.V0 * model.a**2 * (4.0 * e * e - 2.0 * e)
    elif f is Family.COULOMB_CENTRIFUGAL:
        lam = model.hbar**2 * model.l * (model.l + 1) / model.mass
        v = -model.e2 / arr + 0.5 * lam / arr**2
        v1 = model.e2 / arr**2 - lam / arr**3
        v2 = -2.0 * model.e2 / arr**3 + 3.0 * lam / arr**4
    elif f is Family.COT_SQUARED:
        w = np.pi / model.a
        c = 1.0 / np.tan(w * arr)
        v = model.V0 * c * c
        v1 = -2.0 * model.V0 * w * c * (1.0 + c * c)
        v2 = 2.0 * model.V0 * w * w * (1.0 + c * c) * (1.0 + 3.0 * c * c)
    else:
        v = arr**4 / model.a
        v1 = 4.0 * arr**3 / model.a
        v2 = 12.0 * arr**2 / model.a
    if np.ndim(x) == 0:
        return float(v), float(v1), float(v2)
    return v, v1, v2


def classical_momentum(model: PotentialModel, E: float, x):
    """Positive-branch classical momentum sqrt(2 m (E - V(x))).

    Raises :class:`ForbiddenRegionError` when E < V(x) beyond a small
    round-off allowance; exact turning points return exactly 0.
    """
    v = evaluate(model, x)
    diff = np.asarray(E - np.asarray(v), dtype=float)
    tol = 1e-10 * max(1.0, abs(E))
    if np.any(diff < -tol):
        bad = float(np.min(diff))
        raise ForbiddenRegionError(
            f"point is classically forbidden: E - V = {bad:.3g} < 0"
        )
    p = np.sqrt(2.0 * model.mass * np.clip(diff, 0.0, None))
    return float(p) if np.ndim(x) == 0 else p


def momentum_squared(model: PotentialModel, E: float, x):
    """2 m (E - V(x)) clipped at zero; array-friendly helper for quadratures."""
    v = evaluate(model, x)
    return np.clip(2.0 * model.mass * (E - np.asarray(v)), 0.0, None)


def bound_energy_range(model: PotentialModel) -> tuple[float, float]:
    """Open interval of energies with a classically bound region."""
    f = model.family
    if f in (Family.HARMONIC, Family.QUARTIC, Family.COT_SQUARED):
        return 0.0, math.inf
    if f is Family.MORSE:
        return -model.V0, 0.0
    if model.l == 0:
        return -math.inf, 0.0
    v_min = -model.e2**2 * model.mass / (2.0 * model.hbar**2 * model.l * (model.l + 1))
    return v_min, 0.0


def turning_points(model: PotentialModel, E: float) -> TurningPair:
    """Locate the classical turning points by analytic inversion.

    All five families admit closed-form inversions of V(x) = E.  The
    Coulomb l = 0 case returns x1 = 0 flagged as a domain boundary.
    Raises :class:`NoTurningPointsError` when E has no bound region.
    """
    E = float(E)
    f = model.family
    lo, hi = bound_energy_range(model)
    if not (lo < E < hi):
        raise NoTurningPointsError(
            f"E = {E:.6g} admits no bound region for {f.value} "
            f"(bound range is {lo:.6g} .. {hi:.6g})"
        )
    if f is Family.HARMONIC:
        x0 = math.sqrt(2.0 * E / model.mass) / model.omega
        return TurningPair(-x0, x0)
    if f is Family.MORSE:
        root = math.sqrt(1.0 + E / model.V0)
        return TurningPair(-math.log(1.0 + root) / model.a, -math.log(1.0 - root) / model.a)
    if f is Family.COULOMB_CENTRIFUGAL:
        if model.l == 0:
            return TurningPair(0.0, -model.e2 / E, x1_is_boundary=True)
        lam = model.hbar**2 * model.l * (model.l + 1) / model.mass
        disc = model.e2**2 + 2.0 * E * lam
        disc = max(disc, 0.0)
        sq = math.sqrt(disc)
        return TurningPair((model.e2 - sq) / (-2.0 * E), (model.e2 + sq) / (-2.0 * E))
    if f is Family.COT_SQUARED:
        x1 = (model.a / math.pi) * math.atan(math.sqrt(model.V0 / E))
        return TurningPair(x1, model.a - x1)
    x0 = (model.a * E) ** 0.25
    return TurningPair(-x0, x0)
