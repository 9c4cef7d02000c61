"""Command-line front end for the phase-amplitude quantization pipeline.

Subcommands expose every pipeline stage as delimited output suitable for
scripts and CI: ``eigen`` (levels three ways), ``residual`` (action
bookkeeping and the WKB correction R per level), ``table`` (the two
reference tables with computed values side by side), ``fields`` (the full
phase-amplitude field dump for one level), and ``correct`` (corrected WKB
energies from a supplied or auto-computed R).

Output is CSV by default (comma separator, header row, LF line endings,
'.' decimal point) or JSON via ``--format json``; numbers print with 6
significant digits unless ``--full`` asks for round-trip precision.  The
``--plot`` flag on ``residual`` and ``fields`` additionally renders a PNG
figure next to the delimited output.

Exit codes: 0 on success, 2 on usage errors, 3 when a solver stage fails
(the stage is named on standard error).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from . import action_residual, eigensolver, formulas, potentials, qhje
from .action_residual import ResidualReport
from .errors import QhjError, UnsupportedModelError
from .potentials import Family, PotentialModel

_FAMILIES = ("harmonic", "morse", "hydrogen", "cot2", "quartic")

# Families whose residual changes from level to level, so a single literal
# --r value cannot cover a level range.
_N_DEPENDENT_FAMILIES = (Family.QUARTIC,)

# Reference Table 1: rows (n_principal, l, R) in published order.
_TABLE1_ROWS = (
    (1, 0, 1.570796),
    (2, 1, 0.269506),
    (3, 1, 0.269506),
    (3, 2, 0.158683),
    (4, 1, 0.269506),
    (4, 2, 0.158683),
    (4, 3, 0.112778),
    (5, 4, 0.0875375),
    (5, 3, 0.112778),
    (5, 2, 0.158683),
    (5, 1, 0.269506),
    (6, 5, 0.071548),
    (6, 4, 0.0875375),
    (6, 3, 0.112778),
    (6, 2, 0.158683),
    (6, 1, 0.269506),
)

# Reference Table 2: rows (n, E, R) for the quartic oscillator with a = 1.
_TABLE2_ROWS = (
    (0, 0.667986, 0.255796),
    (1, 2.393644, 0.044912),
    (2, 4.696795, 0.0331155),
    (3, 7.335730, 0.0235851),
    (4, 10.244308, 0.0184221),
)


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one command invocation."""

    model: PotentialModel
    levels: tuple[int, ...]
    fmt: str = "csv"
    output: str | None = None
    full: bool = False
    points: int | None = None
    plot: bool = False
    with_fields: bool = False

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("level selection must be non-empty")
        if any(n < 0 for n in self.levels):
            raise ValueError("node counts must be non-negative")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.fmt!r}")
        if self.points is not None and self.points < 8:
            raise ValueError("grid override must provide at least 8 points")


def _formatter(full: bool) -> Callable[[float], str]:
    spec = "%.17g" if full else "%.6g"

    def fmt(v: float) -> str:
        return spec % v

    return fmt


def _json_value(v: float | int | str | None):
    if v is None or isinstance(v, (int, str)):
        return v
    return float(v) if math.isfinite(v) else None


def _emit_rows(
    columns: Sequence[str],
    rows: Sequence[Sequence],
    config: RunConfig,
) -> None:
    fmt = _formatter(config.full)

    def cell(v) -> str:
        if v is None:
            return ""
        if isinstance(v, str):
            return v
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return fmt(float(v))

    if config.fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(cell(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    else:
        payload = [
            {c: _json_value(v) for c, v in zip(columns, row)} for row in rows
        ]
        text = json.dumps(payload, indent=2) + "\n"

    if config.output is None:
        sys.stdout.write(text)
    else:
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _plot_target(config: RunConfig, command: str) -> str:
    if config.output is not None:
        return str(Path(config.output).with_suffix(".png"))
    return f"qhj_{command}_{config.model.family.value}.png"


def _save_figure(fig, path: str) -> None:
    fig.savefig(path, dpi=150)
    print(f"qhj: figure written to {path}", file=sys.stderr)


def _new_figure(rows: int, cols: int):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(rows, cols, figsize=(5.0 * cols, 3.6 * rows))
    return fig, axes


# ---------------------------------------------------------------------------
# argument plumbing


def _add_family_arguments(sp: argparse.ArgumentParser) -> None:
    sp.add_argument(
        "--family", required=True, choices=_FAMILIES, help="potential family"
    )
    sp.add_argument("--omega", type=float, help="harmonic frequency (harmonic only)")
    sp.add_argument("--V0", type=float, help="well depth or strength (morse, cot2)")
    sp.add_argument("--a", type=float, help="length or stiffness scale (morse, cot2, quartic)")
    sp.add_argument("--e2", type=float, help="attraction strength (hydrogen only)")
    sp.add_argument("--l", type=int, help="angular momentum quantum number (hydrogen only)")
    sp.add_argument("--hbar", type=float, default=1.0, help="Planck constant (default 1)")
    sp.add_argument("--mass", type=float, default=1.0, help="particle mass (default 1)")


def _add_output_arguments(sp: argparse.ArgumentParser) -> None:
    sp.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    sp.add_argument("--output", help="write to this path instead of standard output")
    sp.add_argument(
        "--full",
        action="store_true",
        help="print full precision instead of 6 significant digits",
    )


def _add_level_arguments(sp: argparse.ArgumentParser, single: bool = False) -> None:
    noun = "level" if single else "level or inclusive range a..b"
    sp.add_argument(
        "--n",
        help=f"{noun}; for hydrogen this is the principal quantum number",
    )
    sp.add_argument(
        "--nr",
        type=int,
        help="radial node count (hydrogen alternative to --n)",
    )


def _build_model(args: argparse.Namespace, parser: argparse.ArgumentParser) -> PotentialModel:
    family = args.family
    given = {
        name: getattr(args, name)
        for name in ("omega", "V0", "a", "e2", "l")
        if getattr(args, name) is not None
    }
    allowed = {
        "harmonic": ("omega",),
        "morse": ("V0", "a"),
        "hydrogen": ("e2", "l"),
        "cot2": ("V0", "a"),
        "quartic": ("a",),
    }[family]
    foreign = sorted(set(given) - set(allowed))
    if foreign:
        parser.error(
            f"parameter --{foreign[0]} does not apply to family '{family}'"
        )
    common = {"hbar": args.hbar, "mass": args.mass}
    try:
        if family == "harmonic":
            return potentials.harmonic(given.get("omega", 1.0), **common)
        if family == "morse":
            return potentials.morse(given.get("V0", 32.0), given.get("a", 1.0), **common)
        if family == "hydrogen":
            return potentials.coulomb_centrifugal(
                given.get("e2", 1.0), given.get("l", 0), **common
            )
        if family == "cot2":
            return potentials.cot_squared(
                given.get("V0", 1.0), given.get("a", math.pi), **common
            )
        return potentials.quartic(given.get("a", 1.0), **common)
    except ValueError as exc:
        parser.error(str(exc))
    raise AssertionError("unreachable")


def _parse_level_token(token: str, parser: argparse.ArgumentParser) -> tuple[int, int]:
    text = token.strip()
    if ".." in text:
        head, _, tail = text.partition("..")
        try:
            lo, hi = int(head), int(tail)
        except ValueError:
            parser.error(f"cannot parse level range {token!r}; expected a..b")
        if hi < lo:
            parser.error(f"empty level range {token!r}")
        return lo, hi
    try:
        v = int(text)
    except ValueError:
        parser.error(f"cannot parse level {token!r}; expected an integer or a..b")
    return v, v


def _resolve_levels(
    args: argparse.Namespace,
    parser: argparse.ArgumentParser,
    model: PotentialModel,
    single: bool = False,
) -> tuple[int, ...]:
    """Translate --n / --nr into ascending node counts.

    For hydrogen, --n is the principal quantum number (node count
    n - l - 1); everywhere else it is the node count directly.  --nr
    addresses hydrogen levels by node count and is rejected elsewhere.
    """
    if args.nr is not None and args.n is not None:
        parser.error("--n and --nr are mutually exclusive")
    if args.nr is not None:
        if model.family is not Family.COULOMB_CENTRIFUGAL:
            parser.error("--nr applies to the hydrogen family only")
        if args.nr < 0:
            parser.error("--nr must be non-negative")
        return (args.nr,)
    if args.n is None:
        parser.error("a level selection (--n, or --nr for hydrogen) is required")
    lo, hi = _parse_level_token(args.n, parser)
    if model.family is Family.COULOMB_CENTRIFUGAL:
        if lo < model.l + 1:
            parser.error(
                f"principal quantum number must be at least l + 1 = {model.l + 1}"
            )
        lo, hi = lo - model.l - 1, hi - model.l - 1
    elif lo < 0:
        parser.error("node counts must be non-negative")
    levels = tuple(range(lo, hi + 1))
    if single and len(levels) != 1:
        parser.error("this command dumps a single level per run; pass one n")
    return levels


def _config_from_args(
    args: argparse.Namespace,
    parser: argparse.ArgumentParser,
    single_level: bool = False,
) -> RunConfig:
    model = _build_model(args, parser)
    levels = _resolve_levels(args, parser, model, single=single_level)
    try:
        return RunConfig(
            model=model,
            levels=levels,
            fmt=args.format,
            output=args.output,
            full=args.full,
            points=getattr(args, "points", None),
            plot=getattr(args, "plot", False),
            with_fields=getattr(args, "with_fields", False),
        )
    except ValueError as exc:
        parser.error(str(exc))
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# commands


def cmd_eigen(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _config_from_args(args, parser)
    model = config.model
    columns = ("n", "E_numerov", "E_wkb", "E_exact", "dE_wkb", "dE_exact")
    rows = []
    for n in config.levels:
        e_num = eigensolver.eigenvalue(model, n)
        triple = formulas.closed_form_energies(model, n)
        e_exact = triple.e_exact
        rows.append(
            (
                n,
                e_num,
                triple.e_wkb,
                e_exact,
                triple.e_wkb - e_num,
                None if e_exact is None else e_exact - e_num,
            )
        )
    _emit_rows(columns, rows, config)
    return 0


def cmd_residual(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _config_from_args(args, parser)
    model = config.model
    tag = action_residual.classify_case(model, config.levels).tag
    warned = False
    reports: list[ResidualReport] = []
    for n in config.levels:
        use_fields = config.with_fields
        if use_fields:
            try:
                reports.append(
                    action_residual.residual_report(
                        model, n, with_fields=True, case_tag=tag
                    )
                )
                continue
            except UnsupportedModelError as exc:
                if not warned:
                    print(f"qhj: residual: {exc}", file=sys.stderr)
                    warned = True
        reports.append(
            action_residual.residual_report(model, n, with_fields=False, case_tag=tag)
        )
    columns = ResidualReport.CSV_COLUMNS
    rows = [
        (
            r.family,
            r.params,
            r.n,
            r.E,
            r.I_classical,
            r.quantum_integral,
            r.R_route_A,
            r.R_route_B,
            r.R_closed_form,
            r.case_tag,
        )
        for r in reports
    ]
    _emit_rows(columns, rows, config)
    if config.plot:
        fig, ax = _new_figure(1, 1)
        ns = [r.n for r in reports]
        rs = [r.R_route_B for r in reports]
        ax.plot(ns, rs, "o-")
        ax.set_xlabel("n")
        ax.set_ylabel("R")
        ax.set_title(f"{model.family.value} ({model.params_text()}): case {tag}")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        _save_figure(fig, _plot_target(config, "residual"))
    return 0


def cmd_table(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = RunConfig(
        model=potentials.quartic() if args.name == "table2" else potentials.coulomb_centrifugal(),
        levels=(0,),
        fmt=args.format,
        output=args.output,
        full=args.full,
    )
    if args.name == "table1":
        columns = ("n", "l", "R_computed", "R_ref", "diff")
        rows = []
        for n_principal, l, r_ref in _TABLE1_ROWS:
            model = potentials.coulomb_centrifugal(l=l)
            nodes = n_principal - l - 1
            e_exact = -1.0 / (2.0 * n_principal * n_principal)
            r = action_residual.residual_route_B(model, nodes, e_exact)
            rows.append((n_principal, l, r, r_ref, r - r_ref))
    else:
        columns = ("n", "E_computed", "E_ref", "dE", "R_computed", "R_ref", "dR")
        rows = []
        model = potentials.quartic()
        for n, e_ref, r_ref in _TABLE2_ROWS:
            e = eigensolver.eigenvalue(model, n)
            r = action_residual.residual_route_B(model, n, e)
            rows.append((n, e, e_ref, e - e_ref, r, r_ref, r - r_ref))
    _emit_rows(columns, rows, config)
    return 0


def _classical_action_profile(
    model: PotentialModel, E: float, x: np.ndarray
) -> np.ndarray:
    """Cumulative classical action W(x) = integral of p_c from x1.

    Uses the turning-point regularizing substitution x = x1 + span sin^2 t
    on a fine t grid, then maps the cumulative values back to the requested
    abscissas.
    """
    x1, x2 = float(x[0]), float(x[-1])
    span = x2 - x1
    t = np.linspace(0.0, 0.5 * math.pi, 4001)
    xt = x1 + span * np.sin(t) ** 2
    integrand = np.sqrt(potentials.momentum_squared(model, E, xt)) * span * np.sin(2.0 * t)
    w = cumulative_trapezoid(integrand, t, initial=0.0)
    profile = CubicSpline(t, w)
    ratio = np.clip((x - x1) / span, 0.0, 1.0)
    return profile(np.arcsin(np.sqrt(ratio)))


def cmd_fields(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _config_from_args(args, parser, single_level=True)
    model = config.model
    n = config.levels[0]
    E = action_residual.exact_energy(model, n)
    fields = qhje.qhj_fields(model, E, config.points)
    x = fields.grid.points()
    w_classical = _classical_action_profile(model, E, x)
    p_classical = np.sqrt(potentials.momentum_squared(model, E, x))
    psi_rec = qhje.reconstruct_wavefunction(fields)
    state = eigensolver.eigenstate(model, n)
    psi_num = CubicSpline(state.grid.points(), state.psi)(x)
    columns = (
        "x",
        "X",
        "W_classical",
        "Xp",
        "p_classical",
        "Y",
        "F",
        "G",
        "psi_reconstructed",
        "psi_numerov",
    )
    rows = list(
        zip(
            x,
            fields.X,
            w_classical,
            fields.Xp,
            p_classical,
            fields.Y,
            fields.F,
            fields.G,
            psi_rec,
            psi_num,
        )
    )
    _emit_rows(columns, rows, config)
    if config.plot:
        fig, axes = _new_figure(2, 2)
        axes[0, 0].plot(x, fields.X, label="X")
        axes[0, 0].plot(x, w_classical, "--", label="W classical")
        axes[0, 0].set_title("accumulated action")
        axes[0, 1].plot(x, fields.Xp, label="X'")
        axes[0, 1].plot(x, p_classical, "--", label="p classical")
        axes[0, 1].set_title("local momentum")
        axes[1, 0].plot(x, fields.F, label="F")
        axes[1, 0].plot(x, fields.G, "--", label="G")
        axes[1, 0].axhline(0.0, color="k", lw=0.6)
        axes[1, 0].set_title("correction fields")
        axes[1, 1].plot(x, psi_rec, label="reconstructed")
        axes[1, 1].plot(x, psi_num, "--", label="reference")
        axes[1, 1].set_title(f"wave function (n = {n})")
        for ax in axes.flat:
            ax.legend(loc="best", fontsize=8)
            ax.grid(True, alpha=0.3)
        fig.suptitle(f"{model.family.value} ({model.params_text()}), E = {E:.6g}")
        fig.tight_layout()
        _save_figure(fig, _plot_target(config, "fields"))
    return 0


def _residuals_from_spec(
    spec_text: str,
    levels: Sequence[int],
    model: PotentialModel,
    parser: argparse.ArgumentParser,
) -> tuple[dict[int, float], bool]:
    """Resolve the --r option into a per-level residual map.

    Returns the map and whether values were auto-computed (descriptive
    mode, which also reports the round-trip error).
    """
    if spec_text == "auto":
        return {
            n: action_residual.residual_route_B(
                model, n, action_residual.exact_energy(model, n)
            )
            for n in levels
        }, True
    if spec_text.startswith("@"):
        path = spec_text[1:]
        try:
            content = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            parser.error(f"cannot read residual file {path!r}: {exc}")
        table: dict[int, float] = {}
        for ln, line in enumerate(content.splitlines(), 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.replace(",", " ").split()
            if len(parts) != 2:
                parser.error(f"{path}:{ln}: expected 'n,R' or 'n R'")
            try:
                table[int(parts[0])] = float(parts[1])
            except ValueError:
                parser.error(f"{path}:{ln}: expected 'n,R' or 'n R'")
        missing = [n for n in levels if n not in table]
        if missing:
            parser.error(
                f"residual file {path!r} has no entry for n = {missing[0]}"
            )
        return {n: table[n] for n in levels}, False
    try:
        value = float(spec_text)
    except ValueError:
        parser.error("--r expects 'auto', a number, or @file")
    if len(levels) > 1 and model.family in _N_DEPENDENT_FAMILIES:
        parser.error(
            f"family '{model.family.value}' has a level-dependent residual; "
            "a single --r value cannot cover a range (use --r auto or --r @file)"
        )
    return {n: value for n in levels}, False


def cmd_correct(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _config_from_args(args, parser)
    model = config.model
    residuals, auto = _residuals_from_spec(args.r, config.levels, model, parser)
    columns = ("n", "R", "E_corrected", "E_exact", "roundtrip")
    rows = []
    for n in config.levels:
        r = residuals[n]
        e_corr = action_residual.corrected_energy(model, n, r)
        if auto:
            e_exact = action_residual.exact_energy(model, n)
            rows.append((n, r, e_corr, e_exact, abs(e_corr - e_exact)))
        else:
            rows.append((n, r, e_corr, None, None))
    _emit_rows(columns, rows, config)
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhj",
        description=(
            "Bound-state energies, phase-amplitude fields, and the residual "
            "R that corrects WKB quantization, for five benchmark potentials."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eigen", help="bound levels: shooting, WKB, closed form")
    _add_family_arguments(sp)
    _add_level_arguments(sp)
    _add_output_arguments(sp)
    sp.set_defaults(func=cmd_eigen)

    sp = sub.add_parser(
        "residual", help="classical action, quantum integral, and R per level"
    )
    _add_family_arguments(sp)
    _add_level_arguments(sp)
    _add_output_arguments(sp)
    sp.add_argument(
        "--with-fields",
        action="store_true",
        help="also solve the phase-amplitude fields for the field-integral route",
    )
    sp.add_argument(
        "--plot", action="store_true", help="render R versus n as a PNG figure"
    )
    sp.set_defaults(func=cmd_residual)

    sp = sub.add_parser("table", help="reference tables with computed values")
    sp.add_argument("name", choices=("table1", "table2"), help="which table")
    _add_output_arguments(sp)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("fields", help="phase-amplitude field dump for one level")
    _add_family_arguments(sp)
    _add_level_arguments(sp, single=True)
    _add_output_arguments(sp)
    sp.add_argument(
        "--points", type=int, help="grid points for the field solve (default per family)"
    )
    sp.add_argument(
        "--plot", action="store_true", help="render the four field panels as a PNG figure"
    )
    sp.set_defaults(func=cmd_fields)

    sp = sub.add_parser("correct", help="corrected WKB energies from a residual")
    _add_family_arguments(sp)
    _add_level_arguments(sp)
    _add_output_arguments(sp)
    sp.add_argument(
        "--r",
        required=True,
        help="residual source: 'auto', a number, or @file with 'n,R' lines",
    )
    sp.set_defaults(func=cmd_correct)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except QhjError as exc:
        print(f"qhj: {args.command}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
