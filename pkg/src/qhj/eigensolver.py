"""Numerov shooting solver for bound-state eigenvalues and eigenfunctions.

The solver integrates the stationary Schrodinger equation
``psi'' = (2 m / hbar^2) (V - E) psi`` with the three-term Numerov recursion
(local order h^6) from both ends of a family-specific grid, counts interior
nodes to bracket the requested level, and refines the energy with Brent's
method on the Wronskian mismatch of the two sweeps at a matching point near
the outer turning point.  Node-count bracketing precedes the refinement, so
the solver cannot converge to the wrong level.

Boundary behavior at the grid ends is family aware: deep classically
forbidden starts use a vanishing seed, hard walls and the radial origin use
the exact power-series behavior of the regular solution.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import formulas
from .errors import NoSuchLevelError, ScanExhaustedError
from .potentials import (
    Family,
    PotentialModel,
    bound_energy_range,
    evaluate,
    turning_points,
)

__all__ = [
    "Grid",
    "EigenState",
    "Direction",
    "default_grid",
    "numerov_sweep",
    "count_nodes",
    "eigenvalue",
    "eigenstate",
]

_RESCALE_LIMIT = 1e250
_DEFAULT_POINTS = {
    Family.HARMONIC: 6001,
    Family.MORSE: 6001,
    Family.COT_SQUARED: 8001,
    Family.QUARTIC: 6001,
    Family.COULOMB_CENTRIFUGAL: 14001,
}


def _tol_scale() -> float:
    """Global tolerance multiplier, settable through QHJ_TOL_OVERRIDE."""
    raw = os.environ.get("QHJ_TOL_OVERRIDE", "").strip()
    if not raw:
        return 1.0
    try:
        value = float(raw)
    except ValueError:
        return 1.0
    return value if value > 0.0 else 1.0


class Direction(str, Enum):
    LEFT_TO_RIGHT = "left_to_right"
    RIGHT_TO_LEFT = "right_to_left"


@dataclass(frozen=True)
class Grid:
    """Uniform coordinate grid with n_points samples on [x_min, x_max]."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not (self.x_max > self.x_min):
            raise ValueError("grid requires x_max > x_min")
        if self.n_points < 8:
            raise ValueError("grid requires at least 8 points")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return _grid_points(self)


@lru_cache(maxsize=64)
def _grid_points(grid: Grid) -> np.ndarray:
    x = np.linspace(grid.x_min, grid.x_max, grid.n_points)
    x.flags.writeable = False
    return x


@dataclass(frozen=True)
class EigenState:
    """A normalized bound state: node count, energy, samples on a grid."""

    n: int
    E: float
    psi: np.ndarray
    grid: Grid
    norm: bool = True


_MARGIN_EFOLDS = 16.0


def _decay_efolds(model: PotentialModel, E: float, x_from: float, x_to: float) -> float:
    """WKB decay exponent integral of kappa = sqrt(2m(V-E))/hbar over a span."""
    lo, hi = (x_from, x_to) if x_to > x_from else (x_to, x_from)
    x = np.linspace(lo, hi, 257)
    k2 = 2.0 * model.mass * (evaluate(model, x) - E) / model.hbar**2
    kappa = np.sqrt(np.clip(k2, 0.0, None))
    return float(np.trapezoid(kappa, x))


def _extend_margin(
    model: PotentialModel, E: float, x_turn: float, x_start: float, step: float
) -> float:
    """Push a margin endpoint outward until the decay integral is deep enough.

    The starting value comes from the family rule (barrier-height or
    well-width criterion); it is kept when it already provides
    _MARGIN_EFOLDS e-folds of amplitude suppression and extended in
    fractional well-width steps otherwise, so the artificial boundary
    condition cannot shift eigenvalues at the working tolerances.
    """
    x_out = x_start
    for _ in range(400):
        if _decay_efolds(model, E, x_turn, x_out) >= _MARGIN_EFOLDS:
            break
        x_out += step
    return x_out


def default_grid(model: PotentialModel, E: float, n_points: int | None = None) -> Grid:
    """Family-specific grid covering [x1, x2] plus decay margins at energy E.

    Confining families extend past the turning points until V >= E + 12 or
    by 40 percent of the well width, whichever is farther; the Morse right
    margin extends until the asymptotic decay factor drops below 1e-14; the
    cot-squared well uses exactly (0, a); the radial grid starts at
    1e-6 r2.  Every forbidden-region margin is then deepened as needed so
    the boundary supplies at least 16 e-folds of amplitude suppression.
    """
    fam = model.family
    if n_points is None:
        n_points = _DEFAULT_POINTS[fam]
    if fam is Family.COT_SQUARED:
        return Grid(0.0, model.a, n_points)
    tp = turning_points(model, E)
    width = tp.x2 - tp.x1
    if fam is Family.COULOMB_CENTRIFUGAL:
        r2 = tp.x2
        r_max = _extend_margin(model, E, r2, 3.0 * r2, 0.25 * max(width, r2))
        return Grid(1e-6 * r2, r_max, n_points)
    if fam is Family.HARMONIC:
        x_barrier = math.sqrt(2.0 * (E + 12.0) / model.mass) / model.omega
        x_out = max(x_barrier, tp.x2 + 0.4 * width)
        x_out = _extend_margin(model, E, tp.x2, x_out, 0.25 * width)
        return Grid(-x_out, x_out, n_points)
    if fam is Family.QUARTIC:
        x_barrier = (model.a * (E + 12.0)) ** 0.25
        x_out = max(x_barrier, tp.x2 + 0.4 * width)
        x_out = _extend_margin(model, E, tp.x2, x_out, 0.25 * width)
        return Grid(-x_out, x_out, n_points)
    # Morse: barrier-height rule on the steep left wall, asymptotic decay
    # length on the right, both deepened by the e-fold requirement.
    y = 1.0 + math.sqrt(1.0 + (E + 12.0) / model.V0)
    x_left = min(-math.log(y) / model.a, tp.x1 - 0.4 * width)
    x_left = _extend_margin(model, E, tp.x1, x_left, -0.25 * width)
    kappa = math.sqrt(-2.0 * model.mass * E) / model.hbar
    x_right = tp.x2 + 14.0 * math.log(10.0) / kappa
    x_right = _extend_margin(model, E, tp.x2, x_right, 0.25 * width)
    return Grid(x_left, x_right, n_points)


def _wall_series(model: PotentialModel, E: float) -> tuple[float, float]:
    """Exponent s and quadratic coefficient q of the near-wall behavior.

    Near a cot-squared wall the regular solution behaves as
    d^s (1 + q d^2) in the distance d from the wall, with s (s - 1) equal to
    the strength of the 1/d^2 divergence of 2 m (V - E) / hbar^2.
    """
    c2 = 2.0 * model.mass * model.V0 * model.a**2 / (math.pi**2 * model.hbar**2)
    s = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * c2))
    kappa0 = 2.0 * model.mass * (E + 2.0 * model.V0 / 3.0) / model.hbar**2
    q = -kappa0 / (4.0 * s + 2.0)
    return s, q


def _radial_series(model: PotentialModel, E: float) -> tuple[float, float, int]:
    """Coefficients of u = r^(l+1) (1 + c1 r + c2 r^2) near the origin."""
    gamma = model.mass * model.e2 / model.hbar**2
    kappa2 = -2.0 * model.mass * E / model.hbar**2
    l = model.l
    c1 = -gamma / (l + 1)
    c2 = (kappa2 - 2.0 * gamma * c1) / (4.0 * l + 6.0)
    return c1, c2, l


def _seed_index(f: np.ndarray, h: float, minimum: int) -> int:
    """First index where the local Numerov step is well resolved."""
    limit = 0.5 / (h * h)
    idx = minimum
    n = f.size
    while idx < n - 4 and abs(f[idx]) > limit:
        idx += 1
    return max(idx, minimum)


def _start_plan(
    model: PotentialModel, E: float, x: np.ndarray, f: np.ndarray, h: float, reversed_sweep: bool
) -> tuple[int, np.ndarray]:
    """Seed values for the first grid points of a sweep.

    Returns ``(j, values)`` where ``values`` fills indices 0..j and the
    Numerov recursion starts at index j (so f[j - 1] must be finite).  The
    coordinate array ``x`` and sign conventions are those of the sweep
    direction: for right-to-left sweeps the caller passes reversed arrays and
    distances are measured from the right endpoint.
    """
    fam = model.family
    if fam is Family.COT_SQUARED:
        at_wall = min(abs(x[0]), abs(x[0] - model.a)) < 1e-9 * model.a
        if at_wall:
            s, q = _wall_series(model, E)
            d = np.abs(x - x[0])
            j = _seed_index(f, h, 2)
            dj = d[: j + 1]
            return j, dj**s * (1.0 + q * dj * dj)
        return 1, np.array([0.0, 1e-8])
    if fam is Family.COULOMB_CENTRIFUGAL and not reversed_sweep:
        c1, c2, l = _radial_series(model, E)
        j = _seed_index(f, h, 2)
        r = x[: j + 1]
        return j, r ** (l + 1) * (1.0 + c1 * r + c2 * r * r)
    # Deep classically forbidden start: vanishing seed, arbitrary tiny slope.
    return 1, np.array([0.0, 1e-8])


def _numerov_recursion(f: np.ndarray, h: float, j: int, seed: np.ndarray) -> np.ndarray:
    """Run the Numerov three-term recursion from index j to the end."""
    n = f.size
    p = np.empty(n)
    p[: j + 1] = seed
    h2 = h * h
    fl = (h2 * f).tolist()
    pl = p[: j + 1].tolist()
    u_prev = 1.0 - fl[j - 1] / 12.0
    u_cur = 1.0 - fl[j] / 12.0
    w_prev = pl[j - 1] * u_prev
    w_cur = pl[j] * u_cur
    p_cur = pl[j]
    out = p
    for i in range(j, n - 1):
        w_next = 2.0 * w_cur - w_prev + fl[i] * p_cur
        u_next = 1.0 - fl[i + 1] / 12.0
        p_next = w_next / u_next
        if abs(p_next) > _RESCALE_LIMIT:
            scale = 1.0 / abs(p_next)
            out[: i + 1] *= scale
            w_next *= scale
            w_cur *= scale
            p_next *= scale
        out[i + 1] = p_next
        w_prev, w_cur, p_cur = w_cur, w_next, p_next
    return out


def numerov_sweep(
    model: PotentialModel,
    E: float,
    grid: Grid,
    direction: Direction | str = Direction.LEFT_TO_RIGHT,
) -> np.ndarray:
    """Integrate one solution across the grid with family-aware seeding.

    The returned samples are scaled so max |psi| = 1; overflow during the
    recursion is handled by rescaling the running pair, never by failing.
    """
    direction = Direction(direction)
    x = grid.points()
    h = grid.h
    fam = model.family
    if fam is Family.COT_SQUARED:
        # V diverges at the hard walls; psi vanishes there, so any grid
        # point sitting on a wall gets a placeholder that the series start
        # never feeds back into the recursion.
        f = np.zeros(grid.n_points)
        inner = (x > 0.0) & (x < model.a)
        f[inner] = (2.0 * model.mass / model.hbar**2) * (
            evaluate(model, x[inner]) - E
        )
    else:
        f = (2.0 * model.mass / model.hbar**2) * (evaluate(model, x) - E)
    if direction is Direction.RIGHT_TO_LEFT:
        xr = x[::-1].copy()
        fr = f[::-1].copy()
        j, seed = _start_plan(model, E, xr, fr, h, reversed_sweep=True)
        p = _numerov_recursion(fr, h, j, seed)[::-1]
    else:
        j, seed = _start_plan(model, E, x, f, h, reversed_sweep=False)
        p = _numerov_recursion(f, h, j, seed)
    peak = np.max(np.abs(p))
    if peak > 0.0:
        p = p / peak
    return p


def count_nodes(samples) -> int:
    """Count strict sign changes, ignoring endpoints and sub-noise samples.

    Samples with magnitude below 1e-12 of the global maximum are treated as
    zero and skipped, so grazing near-zeros are not double counted.
    """
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise ValueError("samples must be nonempty")
    interior = s[1:-1] if s.size > 2 else s
    peak = float(np.max(np.abs(s)))
    if peak == 0.0:
        return 0
    keep = interior[np.abs(interior) > 1e-12 * peak]
    if keep.size < 2:
        return 0
    signs = np.sign(keep)
    return int(np.sum(signs[1:] * signs[:-1] < 0.0))


def _shooting_nodes(psi_left: np.ndarray, i_match: int) -> int:
    """Node count of a left sweep with the noise floor set by the well region.

    The floor is referenced to the maximum over [0, i_match] rather than the
    global maximum, so the exponentially large forbidden-region tail cannot
    drown out the oscillations that carry the count, while a sign flip in
    the tail (the signature of crossing an eigenvalue) still registers.
    """
    peak = float(np.max(np.abs(psi_left[: i_match + 1])))
    if peak == 0.0:
        return 0
    interior = psi_left[1:-1]
    keep = interior[np.abs(interior) > 1e-12 * peak]
    if keep.size < 2:
        return 0
    signs = np.sign(keep)
    return int(np.sum(signs[1:] * signs[:-1] < 0.0))


def _match_index(model: PotentialModel, E: float, grid: Grid) -> int:
    """Grid index of the matching point: the outer turning point.

    This is the rightmost interior minimum of |V(x) - E| and sits at the
    final antinode of the wave function, far from its nodes.
    """
    tp = turning_points(model, E)
    idx = int(round((tp.x2 - grid.x_min) / grid.h))
    return min(max(idx, 5), grid.n_points - 6)


def _stencil_d1_at(p: np.ndarray, i: int, h: float) -> float:
    return (p[i - 2] - 8.0 * p[i - 1] + 8.0 * p[i + 1] - p[i + 2]) / (12.0 * h)


def _defect(model: PotentialModel, E: float, grid: Grid) -> tuple[float, int]:
    """Wronskian mismatch of the two sweeps at the matching point, and the
    shooting node count of the left sweep."""
    psi_l = numerov_sweep(model, E, grid, Direction.LEFT_TO_RIGHT)
    psi_r = numerov_sweep(model, E, grid, Direction.RIGHT_TO_LEFT)
    im = _match_index(model, E, grid)
    nodes = _shooting_nodes(psi_l, im)
    scale_l = np.max(np.abs(psi_l[: im + 1]))
    scale_r = np.max(np.abs(psi_r[im:]))
    psi_l = psi_l / scale_l
    psi_r = psi_r / scale_r
    window = slice(im - 2, im + 3)
    k = im - 2 + int(np.argmax(np.abs(psi_l[window])))
    if psi_l[k] * psi_r[k] < 0.0:
        psi_r = -psi_r
    d_l = _stencil_d1_at(psi_l, im, grid.h)
    d_r = _stencil_d1_at(psi_r, im, grid.h)
    w = d_l * psi_r[im] - d_r * psi_l[im]
    return w, nodes


def _closed_wkb_seed(model: PotentialModel, n: int) -> tuple[float, float]:
    """Closed-form WKB energy and a local level-spacing estimate."""
    e_n = formulas.closed_form_energies(model, n).e_wkb
    try:
        e_up = formulas.closed_form_energies(model, n + 1).e_wkb
        spacing = abs(e_up - e_n)
    except NoSuchLevelError:
        if n > 0:
            spacing = abs(e_n - formulas.closed_form_energies(model, n - 1).e_wkb)
        else:
            spacing = 0.1 * max(abs(e_n), 1.0)
    if spacing <= 0.0:
        spacing = 0.1 * max(abs(e_n), 1.0)
    return e_n, spacing


def _clip_energy(model: PotentialModel, E: float) -> float:
    """Clamp a trial energy strictly inside the family's bound-state range."""
    lo, hi = bound_energy_range(model)
    if math.isfinite(lo):
        E = max(E, lo + 1e-12 * max(abs(lo), 1.0))
    if math.isfinite(hi):
        E = min(E, hi - 1e-12 * max(abs(E), 1.0))
    return E


@lru_cache(maxsize=512)
def eigenvalue(model: PotentialModel, n: int) -> float:
    """Energy of the bound state with ``n`` interior nodes.

    Node-count bracketing locates the level, then Brent's method on the
    Wronskian mismatch refines it; absolute tolerance about 1e-12 scaled by
    the energy magnitude.
    """
    n = int(n)
    if n < 0:
        raise NoSuchLevelError("node count n must be non-negative")
    if model.family is Family.MORSE:
        n_limit = math.sqrt(2.0 * model.mass * model.V0) / (model.a * model.hbar) - 0.5
        if n >= n_limit:
            raise NoSuchLevelError(
                f"morse(V0={model.V0:.6g}, a={model.a:.6g}) binds node counts "
                f"n < {n_limit:.6g}; n = {n} has no bound state"
            )
    seed, spacing = _closed_wkb_seed(model, n)
    grid = default_grid(model, _clip_energy(model, seed))

    lo = _clip_energy(model, seed - 0.75 * spacing)
    hi = _clip_energy(model, seed + 0.75 * spacing)
    w_lo, n_lo = _defect(model, lo, grid)
    w_hi, n_hi = _defect(model, hi, grid)

    grow = spacing
    for _ in range(60):
        if n_lo <= n and n_hi >= n + 1:
            break
        if n_lo > n:
            new_lo = _clip_energy(model, lo - grow)
            if new_lo == lo:
                raise NoSuchLevelError(
                    f"{model.family.value}: no level with {n} nodes above the "
                    "potential minimum"
                )
            lo = new_lo
            w_lo, n_lo = _defect(model, lo, grid)
        if n_hi <= n:
            new_hi = _clip_energy(model, hi + grow)
            if new_hi == hi:
                raise NoSuchLevelError(
                    f"{model.family.value}: no bound level with {n + 1} nodes "
                    "below the dissociation threshold"
                )
            hi = new_hi
            w_hi, n_hi = _defect(model, hi, grid)
        grow *= 1.6
    else:
        raise ScanExhaustedError(
            f"{model.family.value}: could not bracket the level with n = {n} nodes"
        )

    # Bisect on the node count until the window isolates exactly this level
    # and is narrow relative to the local spacing.
    for _ in range(90):
        if n_lo == n and n_hi == n + 1 and (hi - lo) <= 0.25 * spacing:
            break
        mid = 0.5 * (lo + hi)
        w_mid, n_mid = _defect(model, mid, grid)
        if n_mid <= n:
            lo, w_lo, n_lo = mid, w_mid, n_mid
        else:
            hi, w_hi, n_hi = mid, w_mid, n_mid
    else:
        raise ScanExhaustedError(
            f"{model.family.value}: node-count bisection failed for n = {n}"
        )

    xtol = 1e-12 * max(1.0, abs(seed)) * _tol_scale()
    if w_lo * w_hi < 0.0:
        return float(
            brentq(lambda e: _defect(model, e, grid)[0], lo, hi, xtol=xtol)
        )
    # Fallback: pure node-count bisection down to tolerance.
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        _, n_mid = _defect(model, mid, grid)
        if n_mid <= n:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=256)
def eigenstate(model: PotentialModel, n: int) -> EigenState:
    """Normalized eigenfunction with ``n`` nodes, stitched from both sweeps."""
    E = eigenvalue(model, n)
    seed, _ = _closed_wkb_seed(model, n)
    grid = default_grid(model, _clip_energy(model, seed))
    psi_l = numerov_sweep(model, E, grid, Direction.LEFT_TO_RIGHT)
    psi_r = numerov_sweep(model, E, grid, Direction.RIGHT_TO_LEFT)
    im = _match_index(model, E, grid)
    if abs(psi_r[im]) > 1e-13:
        c = psi_l[im] / psi_r[im]
    else:
        c = _stencil_d1_at(psi_l, im, grid.h) / _stencil_d1_at(psi_r, im, grid.h)
    psi = np.concatenate([psi_l[:im], [psi_l[im]], c * psi_r[im + 1 :]])
    norm = math.sqrt(float(np.sum(psi * psi)) * grid.h)
    psi = psi / norm
    if abs(float(np.min(psi))) > float(np.max(psi)):
        psi = -psi
    got = count_nodes(psi)
    if got != n:
        raise ScanExhaustedError(
            f"{model.family.value}: converged state has {got} nodes, expected {n}"
        )
    psi.flags.writeable = False
    return EigenState(n=n, E=float(E), psi=psi, grid=grid, norm=True)
