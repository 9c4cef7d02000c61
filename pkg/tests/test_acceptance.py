"""End-to-end acceptance checks, one printed verdict line per criterion.

Each test aggregates every state-level check for its criterion, prints a
single line of the form

    [criterion N] PASS <name>: <worst-case detail>

through the capture barrier so the verdict is visible in any pytest run,
and then asserts the aggregate.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from qhj import action_residual, eigensolver, formulas, qhje
from qhj.potentials import (
    cot_squared,
    coulomb_centrifugal,
    harmonic,
    momentum_squared,
    morse,
    quartic,
)

# Reference rows: (principal n, l, R) for the attractive Coulomb family and
# (n, E, R) for the quartic oscillator.
TABLE1_ROWS = (
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
TABLE2_ROWS = (
    (0, 0.667986, 0.255796),
    (1, 2.393644, 0.044912),
    (2, 4.696795, 0.0331155),
    (3, 7.335730, 0.0235851),
    (4, 10.244308, 0.0184221),
)


def _verdict(capsys, criterion: int, name: str, ok: bool, detail: str) -> None:
    line = f"[criterion {criterion}] {'PASS' if ok else 'FAIL'} {name}: {detail}"
    with capsys.disabled():
        print(line)
    assert ok, line


def _states_under_test():
    """All (label, model, node count) triples exercised by criteria 1-5."""
    states = []
    for n in range(11):
        states.append((f"harmonic n={n}", harmonic(), n))
    for n in range(6):
        states.append((f"morse n={n}", morse(), n))
    for n_p, l, _ in TABLE1_ROWS:
        if l == 0:
            continue
        states.append((f"hydrogen n={n_p} l={l}", coulomb_centrifugal(l=l), n_p - l - 1))
    for n in range(6):
        states.append((f"cot2 n={n}", cot_squared(), n))
    for n in range(5):
        states.append((f"quartic n={n}", quartic(), n))
    return states


def test_criterion_1_harmonic_levels_and_zero_residual(capsys):
    model = harmonic()
    worst_e = worst_rb = worst_ra = 0.0
    for n in range(11):
        E = eigensolver.eigenvalue(model, n)
        worst_e = max(worst_e, abs(E - (n + 0.5)))
        worst_rb = max(worst_rb, abs(action_residual.residual_route_B(model, n, n + 0.5)))
        fields = qhje.qhj_fields(model, E)
        worst_ra = max(worst_ra, abs(qhje.residual_route_A(fields, model)))
    ok = worst_e < 1e-8 and worst_rb < 1e-8 and worst_ra < 2e-3
    _verdict(
        capsys, 1, "harmonic spectrum and residual", ok,
        f"max|E-(n+1/2)|={worst_e:.3e} (tol 1e-8), "
        f"max|R_quadrature|={worst_rb:.3e} (tol 1e-8), "
        f"max|R_fields|={worst_ra:.3e} (tol 2e-3)",
    )


def test_criterion_2_morse_levels_and_zero_residual(capsys):
    model = morse()
    worst_e = worst_r = 0.0
    for n in range(6):
        E = eigensolver.eigenvalue(model, n)
        E_closed = action_residual.exact_energy(model, n)
        worst_e = max(worst_e, abs(E - E_closed))
        worst_r = max(worst_r, abs(action_residual.residual_route_B(model, n, E_closed)))
    ok = worst_e < 1e-6 and worst_r < 1e-5
    _verdict(
        capsys, 2, "morse spectrum and residual", ok,
        f"max|E-closed|={worst_e:.3e} (tol 1e-6), max|R|={worst_r:.3e} (tol 1e-5)",
    )


def test_criterion_3_hydrogen_reference_table(capsys):
    worst_row = worst_s = worst_closed = worst_corr = 0.0
    for n_p, l, r_ref in TABLE1_ROWS:
        model = coulomb_centrifugal(l=l)
        n_r = n_p - l - 1
        e_exact = -1.0 / (2.0 * n_p * n_p)
        r_b = action_residual.residual_route_B(model, n_r, e_exact)
        if l == 0:
            worst_s = max(worst_s, abs(r_b - 0.5 * math.pi))
        worst_row = max(worst_row, abs(r_b - r_ref))
        # closed form against the row at half a unit in the last printed digit
        decimals = len(f"{r_ref!r}".split(".")[1])
        half_ulp = 0.5 * 10.0**-decimals
        closed_dev = abs(formulas.hydrogen_R_closed(l) - r_ref)
        worst_closed = max(worst_closed, closed_dev - half_ulp)
        e_corr = action_residual.corrected_energy(model, n_r, r_b)
        worst_corr = max(worst_corr, abs(e_corr - e_exact))
    ok = (
        worst_row < 1e-5
        and worst_s < 1e-6
        and worst_closed <= 0.0
        and worst_corr < 1e-6
    )
    _verdict(
        capsys, 3, "hydrogen residual table", ok,
        f"max|R-ref|={worst_row:.3e} (tol 1e-5), "
        f"|R(l=0)-pi/2|={worst_s:.3e} (tol 1e-6), "
        f"closed form within printed precision: {worst_closed <= 0.0}, "
        f"max|E_corrected-E_exact|={worst_corr:.3e} (tol 1e-6)",
    )


def test_criterion_4_cot_squared_constant_residual(capsys):
    model = cot_squared()
    residuals = []
    worst_corr = 0.0
    for n in range(6):
        e_exact = action_residual.exact_energy(model, n)
        r_b = action_residual.residual_route_B(model, n, e_exact)
        residuals.append(r_b)
        worst_corr = max(
            worst_corr, abs(action_residual.corrected_energy(model, n, r_b) - e_exact)
        )
    worst_val = max(abs(r - 0.269506) for r in residuals)
    spread = max(residuals) - min(residuals)
    e2_dev = abs(eigensolver.eigenvalue(model, 2) - 7.0)
    ok = worst_val < 1e-5 and spread < 1e-4 and worst_corr < 1e-9 and e2_dev < 1e-7
    _verdict(
        capsys, 4, "cot-squared residual", ok,
        f"max|R-0.269506|={worst_val:.3e} (tol 1e-5), spread={spread:.3e} (tol 1e-4), "
        f"max|E_corrected-E_exact|={worst_corr:.3e} (tol 1e-9), "
        f"|E(n=2)-7|={e2_dev:.3e} (tol 1e-7)",
    )


def test_criterion_5_quartic_reference_table(capsys):
    model = quartic()
    worst_e = worst_r = worst_rt = 0.0
    for n, e_ref, r_ref in TABLE2_ROWS:
        E = eigensolver.eigenvalue(model, n)
        r_b = action_residual.residual_route_B(model, n, E)
        worst_e = max(worst_e, abs(E - e_ref))
        worst_r = max(worst_r, abs(r_b - r_ref))
        worst_rt = max(worst_rt, abs(action_residual.corrected_energy(model, n, r_b) - E))
    ok = worst_e < 5e-6 and worst_r < 1e-4 and worst_rt < 1e-6
    _verdict(
        capsys, 5, "quartic reference table", ok,
        f"max|E-ref|={worst_e:.3e} (tol 5e-6), max|R-ref|={worst_r:.3e} (tol 1e-4), "
        f"max roundtrip={worst_rt:.3e} (tol 1e-6)",
    )


def test_criterion_6_field_consistency_all_states(capsys):
    worst_phase = worst_routes = worst_eq = worst_psi = worst_fzero = 0.0
    min_zeros = 10**9
    for label, model, n in _states_under_test():
        E = eigensolver.eigenvalue(model, n)
        fields = qhje.qhj_fields(model, E)
        x = fields.grid.points()

        target = (n + 0.5) * math.pi * model.hbar
        worst_phase = max(worst_phase, abs(qhje.quantum_action_integral(fields) - target))

        r_a = qhje.residual_route_A(fields, model)
        r_b = action_residual.residual_route_B(model, n, E)
        worst_routes = max(worst_routes, abs(r_a - r_b))

        res = qhje.equation_residual(fields)
        k = max(1, int(0.02 * len(x)))
        worst_eq = max(worst_eq, float(np.max(res[k:-k])))

        psi = qhje.reconstruct_wavefunction(fields)
        state = eigensolver.eigenstate(model, n)
        ref = CubicSpline(state.grid.points(), state.psi)(x)
        j = int(0.05 * len(x))
        worst_psi = max(worst_psi, float(np.max(np.abs(psi[j:-j] - ref[j:-j]))))

        spF = CubicSpline(x, fields.F)
        roots = [r for r in spF.roots(extrapolate=False) if x[0] < r < x[-1]]
        min_zeros = min(min_zeros, len(roots))
        spXp = CubicSpline(x, fields.Xp)
        for r in roots:
            pc = math.sqrt(float(momentum_squared(model, E, float(r))))
            worst_fzero = max(worst_fzero, abs(float(spXp(r)) - pc) / pc)

    ok = (
        worst_phase < 1e-3
        and worst_routes < 2e-3
        and worst_eq < 1e-6
        and worst_psi < 1e-3
        and min_zeros >= 1
        and worst_fzero < 1e-3
    )
    _verdict(
        capsys, 6, "field consistency over 43 states", ok,
        f"max|X(x2)-(n+1/2)pi*hbar|={worst_phase:.3e} (tol 1e-3), "
        f"max|R_A-R_B|={worst_routes:.3e} (tol 2e-3), "
        f"max equation residual={worst_eq:.3e} (tol 1e-6), "
        f"max|psi-psi_ref|={worst_psi:.3e} (tol 1e-3), "
        f"min F zeros={min_zeros} (>=1), max X' vs p_c at zeros={worst_fzero:.3e}",
    )


def test_criterion_7_phase_quantization(capsys):
    worst = 0.0
    for model, count in ((harmonic(), 6), (quartic(), 4)):
        for n in range(count):
            dev = abs(qhje.quantize_via_qhj(model, n) - eigensolver.eigenvalue(model, n))
            worst = max(worst, dev)
    ok = worst < 1e-4
    _verdict(
        capsys, 7, "phase quantization vs shooting", ok,
        f"max|E_phase-E_shooting|={worst:.3e} (tol 1e-4)",
    )


def test_criterion_8_action_quadrature_oracle(capsys):
    rng = np.random.default_rng(20250821)
    cases = (
        (harmonic(), 0.3, 30.0),
        (quartic(), 0.3, 30.0),
        (morse(), -0.95 * 32.0, -0.02 * 32.0),
        (cot_squared(), 0.5, 40.0),
        (coulomb_centrifugal(l=1), -0.24, -0.005),
    )
    worst = 0.0
    for model, lo, hi in cases:
        for E in rng.uniform(lo, hi, size=20):
            quad = action_residual.classical_action(model, float(E))
            closed = formulas.classical_action_closed(model, float(E))
            worst = max(worst, abs(quad - closed) / abs(closed))
    ok = worst < 1e-8
    _verdict(
        capsys, 8, "action quadrature vs closed forms", ok,
        f"max relative deviation={worst:.3e} (tol 1e-8), 20 energies per family",
    )
