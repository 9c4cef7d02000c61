"""Closed-form energy and residual formulas for the five potential families.

For each family this module evaluates the semiclassical (WKB) energy, the
residual-corrected energy, and the exact quantum energy where a closed form
exists, plus closed-form classical actions used as quadrature oracles.

Indexing convention: the public quantum number ``n`` is always the interior
node count of the wave function (n = 0, 1, 2, ...).  The cot-squared exact
spectrum is conventionally written with a 1-based index; that shift is
applied inside this module only.  For the radial Coulomb problem ``n`` means
the radial node count and the principal quantum number is n_r + l + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import NoSuchLevelError, NoTurningPointsError, UnsupportedModelError
from .potentials import Family, PotentialModel, bound_energy_range

__all__ = [
    "FormulaTriple",
    "closed_form_energies",
    "hydrogen_R_closed",
    "classical_action_closed",
]

# Constant for the quartic action I(E) = c * E^(3/4); the gamma-function
# factors are evaluated at import time rather than hard-coded.
_QUARTIC_GAMMA_FACTOR = math.sqrt(math.pi) * math.gamma(0.25) / (4.0 * math.gamma(1.75))


@dataclass(frozen=True)
class FormulaTriple:
    """Closed-form energies for one level of one family.

    ``e_corrected`` is present only when a residual R was supplied;
    ``e_exact`` is present only for families with a closed exact spectrum
    (all but the quartic).  ``indices`` records the indexing used: it always
    holds ``n`` (node count) and, for the radial Coulomb problem, also
    ``n_r``, ``l`` and ``n_principal``; for the cot-squared well it holds the
    1-based exact index ``n_exact``.
    """

    e_wkb: float
    e_corrected: float | None
    e_exact: float | None
    indices: dict = field(default_factory=dict)


def _quartic_action_constant(model: PotentialModel) -> float:
    return math.sqrt(2.0 * model.mass) * model.a**0.25 * _QUARTIC_GAMMA_FACTOR


def _morse_level_guard(model: PotentialModel, n: int) -> None:
    n_limit = math.sqrt(2.0 * model.mass * model.V0) / (model.a * model.hbar) - 0.5
    if n >= n_limit:
        raise NoSuchLevelError(
            f"morse(V0={model.V0:.6g}, a={model.a:.6g}) binds node counts "
            f"n < {n_limit:.6g}; n = {n} has no bound state"
        )


def cot_squared_lambda(model: PotentialModel) -> float:
    """Dimensionless well-strength parameter of the cot-squared spectrum.

    lambda = (sqrt(8 m V0 a^2 / (pi^2 hbar^2) + 1) - 1) / 4; equal to 1/2 at
    V0 = 1, a = pi, m = hbar = 1.
    """
    s = 8.0 * model.mass * model.V0 * model.a**2 / (math.pi**2 * model.hbar**2)
    return 0.25 * (math.sqrt(s + 1.0) - 1.0)


def closed_form_energies(
    model: PotentialModel, n: int, R: float | None = None
) -> FormulaTriple:
    """Evaluate the family's closed-form WKB / corrected / exact energies.

    ``n`` is the node count.  The corrected energy solves the classical
    action condition I(E) = (n + 1/2) pi hbar + R in closed form; it is
    omitted (None) when ``R`` is not supplied.
    """
    n = int(n)
    if n < 0:
        raise NoSuchLevelError("node count n must be non-negative")
    hbar, m = model.hbar, model.mass
    fam = model.family
    indices: dict = {"n": n}

    if fam is Family.HARMONIC:
        e_wkb = hbar * model.omega * (n + 0.5)
        e_corr = None if R is None else e_wkb + model.omega * R / math.pi
        return FormulaTriple(e_wkb, e_corr, e_wkb, indices)

    if fam is Family.MORSE:
        _morse_level_guard(model, n)

        def invert(u: float) -> float:
            # I(E) = (pi / a) sqrt(2 m) (sqrt(V0) - sqrt(-E)) = u
            root = math.sqrt(model.V0) - model.a * u / (math.pi * math.sqrt(2.0 * m))
            return -(root * root)

        e_wkb = invert((n + 0.5) * math.pi * hbar)
        e_corr = None if R is None else invert((n + 0.5) * math.pi * hbar + R)
        return FormulaTriple(e_wkb, e_corr, e_wkb, indices)

    if fam is Family.COULOMB_CENTRIFUGAL:
        l = model.l
        sql = math.sqrt(l * (l + 1))
        n_principal = n + l + 1
        indices.update({"n_r": n, "l": l, "n_principal": n_principal})

        def invert(shift: float) -> float:
            return -m * model.e2**2 / (2.0 * hbar**2 * (n + 0.5 + sql + shift) ** 2)

        e_wkb = invert(0.0)
        e_corr = None if R is None else invert(R / (math.pi * hbar))
        e_exact = -m * model.e2**2 / (2.0 * hbar**2 * n_principal**2)
        return FormulaTriple(e_wkb, e_corr, e_exact, indices)

    if fam is Family.COT_SQUARED:
        lam = cot_squared_lambda(model)
        kappa = math.pi**2 * hbar**2 / (2.0 * m * model.a**2)
        strength = math.sqrt(2.0 * m * model.a**2 * model.V0 / (math.pi**2 * hbar**2))

        def invert(shift: float) -> float:
            return kappa * (strength + n + 0.5 + shift) ** 2 - model.V0

        e_wkb = invert(0.0)
        e_corr = None if R is None else invert(R / (math.pi * hbar))
        n_exact = n + 1
        indices["n_exact"] = n_exact
        e_exact = kappa * (n_exact**2 + 4.0 * n_exact * lam - 2.0 * lam)
        return FormulaTriple(e_wkb, e_corr, e_exact, indices)

    c = _quartic_action_constant(model)
    e_wkb = ((n + 0.5) * math.pi * hbar / c) ** (4.0 / 3.0)
    e_corr = None
    if R is not None:
        e_corr = (((n + 0.5) * math.pi * hbar + R) / c) ** (4.0 / 3.0)
    return FormulaTriple(e_wkb, e_corr, None, indices)


def hydrogen_R_closed(l: int, hbar: float = 1.0) -> float:
    """Closed-form residual of the radial Coulomb problem.

    R = pi hbar (l + 1/2 - sqrt(l (l + 1))); independent of the node count.
    Equal to pi hbar / 2 at l = 0 and decreasing toward 0 as l grows.
    """
    l = int(l)
    if l < 0:
        raise ValueError("l must be a non-negative integer")
    return math.pi * hbar * (l + 0.5 - math.sqrt(l * (l + 1)))


def classical_action_closed(model: PotentialModel, E: float) -> float:
    """Closed-form half-cycle classical action I(E) for the family.

    Used as an independent oracle for the quadrature in
    :mod:`qhj.action_residual`.  Raises :class:`NoTurningPointsError` for
    energies outside the bound range.
    """
    E = float(E)
    lo, hi = bound_energy_range(model)
    if not (lo < E < hi):
        raise NoTurningPointsError(
            f"E = {E:.6g} is outside the bound range of {model.family.value}"
        )
    fam = model.family
    m = model.mass
    if fam is Family.HARMONIC:
        return math.pi * E / model.omega
    if fam is Family.MORSE:
        return (math.pi / model.a) * math.sqrt(2.0 * m) * (
            math.sqrt(model.V0) - math.sqrt(-E)
        )
    if fam is Family.COULOMB_CENTRIFUGAL:
        sql = math.sqrt(model.l * (model.l + 1))
        return math.pi * (
            model.e2 * math.sqrt(m / (-2.0 * E)) - model.hbar * sql
        )
    if fam is Family.COT_SQUARED:
        return model.a * (
            math.sqrt(2.0 * m * (E + model.V0)) - math.sqrt(2.0 * m * model.V0)
        )
    if fam is Family.QUARTIC:
        return _quartic_action_constant(model) * E**0.75
    raise UnsupportedModelError(f"no closed-form action for family {fam!r}")
