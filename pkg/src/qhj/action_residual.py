"""Classical action quadrature, WKB energies, and the residual correction R.

The classical action I(E) = integral of sqrt(2m(E - V)) between the turning
points is evaluated with a sin^2 change of variables that regularizes the
square-root endpoint behavior (and the r^(-1/2) origin singularity of the
bare Coulomb case), then 96-point Gauss-Legendre quadrature.  WKB and
corrected energies invert I(E) = (n + 1/2) pi hbar (+ R) with Brent's
method; I(E) is strictly increasing on each family's bound range.

The residual R = I(E_exact) - (n + 1/2) pi hbar is the exact correction to
the WKB quantization rule; computing it at an exact level (closed form where
one exists, the Numerov solver otherwise) is the direct route, independent
of any phase-amplitude machinery.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import eigensolver, formulas
from .errors import ScanExhaustedError
from .potentials import (
    Family,
    PotentialModel,
    bound_energy_range,
    momentum_squared,
    turning_points,
)

__all__ = [
    "ResidualReport",
    "CaseTable",
    "classical_action",
    "wkb_energy",
    "corrected_energy",
    "residual_route_B",
    "exact_energy",
    "residual_report",
    "classify_case",
]

_CASE_ZERO_TOL = 1e-4
_CASE_SPREAD_TOL = 1e-4


def _tol_scale() -> float:
    raw = os.environ.get("QHJ_TOL_OVERRIDE", "").strip()
    if not raw:
        return 1.0
    try:
        value = float(raw)
    except ValueError:
        return 1.0
    return value if value > 0.0 else 1.0


@lru_cache(maxsize=1)
def _gauss_rule() -> tuple[np.ndarray, np.ndarray]:
    """96-point Gauss-Legendre nodes and weights mapped to t in [0, pi/2]."""
    xi, wt = np.polynomial.legendre.leggauss(96)
    t = 0.25 * math.pi * (xi + 1.0)
    w = 0.25 * math.pi * wt
    return t, w


def classical_action(model: PotentialModel, E: float) -> float:
    """I(E): integral of the classical momentum between the turning points.

    Uses x = x1 + (x2 - x1) sin^2 t, which maps both square-root turning
    point singularities to smooth even functions of t; relative accuracy is
    about 1e-10 or better for every supported family.
    """
    tp = turning_points(model, E)
    x1, x2 = tp.x1, tp.x2
    span = x2 - x1
    t, w = _gauss_rule()
    s = np.sin(t)
    x = x1 + span * s * s
    p = np.sqrt(momentum_squared(model, E, x))
    jac = span * np.sin(2.0 * t)
    return float(np.sum(w * p * jac))


def _solve_action_equals(model: PotentialModel, target: float, n_hint: int) -> float:
    """Find the energy where I(E) equals ``target`` (I is increasing in E)."""
    seed = formulas.closed_form_energies(model, n_hint).e_wkb
    seed = eigensolver._clip_energy(model, seed)

    def g(E: float) -> float:
        return classical_action(model, E) - target

    g_seed = g(seed)
    if g_seed == 0.0:
        return seed
    lo = hi = seed
    step = 0.25 * max(abs(seed), 1.0)
    if g_seed > 0.0:
        for _ in range(60):
            new_lo = eigensolver._clip_energy(model, lo - step)
            if new_lo == lo:
                raise ScanExhaustedError(
                    f"{model.family.value}: action target {target:.6g} not "
                    "bracketed above the potential minimum"
                )
            lo = new_lo
            if g(lo) <= 0.0:
                break
            step *= 1.7
        else:
            raise ScanExhaustedError(
                f"{model.family.value}: failed to bracket action target {target:.6g}"
            )
    else:
        for _ in range(60):
            new_hi = eigensolver._clip_energy(model, hi + step)
            if new_hi == hi:
                raise ScanExhaustedError(
                    f"{model.family.value}: action target {target:.6g} exceeds "
                    "the bound-state range"
                )
            hi = new_hi
            if g(hi) >= 0.0:
                break
            step *= 1.7
        else:
            raise ScanExhaustedError(
                f"{model.family.value}: failed to bracket action target {target:.6g}"
            )
    if lo == hi:
        return lo
    xtol = 1e-12 * max(1.0, abs(seed)) * _tol_scale()
    return float(brentq(g, lo, hi, xtol=xtol))


def wkb_energy(model: PotentialModel, n: int) -> float:
    """Energy satisfying the WKB quantization rule I(E) = (n + 1/2) pi hbar."""
    n = int(n)
    target = (n + 0.5) * math.pi * model.hbar
    return _solve_action_equals(model, target, n)


def corrected_energy(model: PotentialModel, n: int, R: float) -> float:
    """Energy satisfying the corrected rule I(E) = (n + 1/2) pi hbar + R."""
    n = int(n)
    if not math.isfinite(R):
        raise ValueError("R must be finite")
    target = (n + 0.5) * math.pi * model.hbar + R
    return _solve_action_equals(model, target, n)


def residual_route_B(model: PotentialModel, n: int, E_exact: float) -> float:
    """R = I(E_exact) - (n + 1/2) pi hbar: the exact WKB correction."""
    n = int(n)
    return classical_action(model, E_exact) - (n + 0.5) * math.pi * model.hbar


def exact_energy(model: PotentialModel, n: int) -> float:
    """Best available exact level: closed form where one exists, else Numerov."""
    triple = formulas.closed_form_energies(model, int(n))
    if triple.e_exact is not None:
        return triple.e_exact
    return eigensolver.eigenvalue(model, int(n))


@dataclass(frozen=True)
class ResidualReport:
    """One level's action bookkeeping: I, the quantum integral, R by both
    routes, the closed form where available, and the case tag."""

    family: str
    params: str
    n: int
    E: float
    I_classical: float
    quantum_integral: float | None
    R_route_A: float | None
    R_route_B: float
    R_closed_form: float | None
    case_tag: str

    CSV_COLUMNS = (
        "family",
        "params",
        "n",
        "E",
        "I_classical",
        "quantum_integral",
        "R_A",
        "R_B",
        "R_closed",
        "case",
    )

    @staticmethod
    def csv_header() -> str:
        return ",".join(ResidualReport.CSV_COLUMNS)

    def csv_row(self, fmt: Callable[[float], str]) -> str:
        def opt(v: float | None) -> str:
            return "" if v is None else fmt(v)

        cells = (
            self.family,
            self.params,
            str(self.n),
            fmt(self.E),
            fmt(self.I_classical),
            opt(self.quantum_integral),
            opt(self.R_route_A),
            fmt(self.R_route_B),
            opt(self.R_closed_form),
            self.case_tag,
        )
        return ",".join(cells)

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "n": self.n,
            "E": self.E,
            "I_classical": self.I_classical,
            "quantum_integral": self.quantum_integral,
            "R_A": self.R_route_A,
            "R_B": self.R_route_B,
            "R_closed": self.R_closed_form,
            "case": self.case_tag,
        }


@dataclass(frozen=True)
class CaseTable:
    """Residuals over a node-count range with the three-way classification."""

    tag: str
    n_values: tuple[int, ...]
    residuals: tuple[float, ...]


def _classify(residuals: Sequence[float]) -> str:
    if all(abs(r) < _CASE_ZERO_TOL for r in residuals):
        return "zero"
    if max(residuals) - min(residuals) < _CASE_SPREAD_TOL:
        return "n_independent"
    return "n_dependent"


def classify_case(model: PotentialModel, n_range: Iterable[int]) -> CaseTable:
    """R_route_B per level over ``n_range``, tagged zero / n_independent /
    n_dependent by magnitude and spread thresholds of 1e-4."""
    ns = tuple(int(n) for n in n_range)
    if not ns:
        raise ValueError("n_range must be nonempty")
    rs = tuple(residual_route_B(model, n, exact_energy(model, n)) for n in ns)
    return CaseTable(tag=_classify(rs), n_values=ns, residuals=rs)


def residual_report(
    model: PotentialModel,
    n: int,
    with_fields: bool = False,
    case_tag: str | None = None,
) -> ResidualReport:
    """Assemble the full report row for one level.

    ``with_fields`` additionally solves the phase-amplitude fields at the
    exact level and fills the quantum action integral and the field-integral
    route for R; errors from that stage propagate to the caller.
    """
    n = int(n)
    E = exact_energy(model, n)
    action = classical_action(model, E)
    r_b = action - (n + 0.5) * math.pi * model.hbar
    quantum_integral = None
    r_a = None
    if with_fields:
        from . import qhje

        fields = qhje.qhj_fields(model, E)
        quantum_integral = qhje.quantum_action_integral(fields)
        r_a = qhje.residual_route_A(fields, model)
    r_closed = None
    if model.family is Family.COULOMB_CENTRIFUGAL:
        r_closed = formulas.hydrogen_R_closed(model.l, model.hbar)
    tag = case_tag if case_tag is not None else _classify([r_b])
    return ResidualReport(
        family=model.family.value,
        params=model.params_text(),
        n=n,
        E=E,
        I_classical=action,
        quantum_integral=quantum_integral,
        R_route_A=r_a,
        R_route_B=r_b,
        R_closed_form=r_closed,
        case_tag=tag,
    )
