"""Classical action, WKB quantization, and the residual R by route B."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhj import action_residual, eigensolver, formulas
from qhj.action_residual import (
    CaseTable,
    ResidualReport,
    classical_action,
    classify_case,
    corrected_energy,
    exact_energy,
    residual_report,
    residual_route_B,
    wkb_energy,
)
from qhj.errors import UnsupportedModelError
from qhj.potentials import (
    bound_energy_range,
    cot_squared,
    coulomb_centrifugal,
    harmonic,
    morse,
    quartic,
)

_SAMPLE_ENERGIES = {
    "harmonic": (harmonic(), (0.7, 2.5, 11.0, 29.0)),
    "morse": (morse(), (-29.0, -15.125, -4.0, -1.2)),
    "hydrogen": (coulomb_centrifugal(l=1), (-0.22, -0.125, -0.03, -0.008)),
    "cot2": (cot_squared(), (1.2, 7.0, 18.0, 39.0)),
    "quartic": (quartic(), (0.668, 2.4, 10.2, 28.0)),
}


@pytest.mark.parametrize("name", sorted(_SAMPLE_ENERGIES))
def test_classical_action_matches_closed_form(name):
    model, energies = _SAMPLE_ENERGIES[name]
    for E in energies:
        quad = classical_action(model, E)
        closed = formulas.classical_action_closed(model, E)
        assert quad == pytest.approx(closed, rel=1e-10)


def test_classical_action_coulomb_s_wave():
    """The l = 0 action integral has an inverse-square-root endpoint
    singularity that the substitution rule must absorb."""
    model = coulomb_centrifugal(l=0)
    for E in (-0.5, -0.125, -0.02):
        quad = classical_action(model, E)
        closed = math.pi * math.sqrt(0.5 / abs(E))
        assert quad == pytest.approx(closed, rel=1e-9)


@pytest.mark.parametrize("name", sorted(_SAMPLE_ENERGIES))
def test_classical_action_strictly_increasing(name):
    """I(E) grows with E across the bound range (50-point mesh)."""
    model, _ = _SAMPLE_ENERGIES[name]
    lo, hi = bound_energy_range(model)
    if not math.isfinite(hi):
        hi = 40.0
    if not math.isfinite(lo):
        lo = -40.0
    span = hi - lo
    mesh = np.linspace(lo + 0.02 * span, hi - 0.02 * span, 50)
    values = [classical_action(model, float(e)) for e in mesh]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_wkb_energy_matches_closed_form():
    for model in (harmonic(), morse(), coulomb_centrifugal(l=1), cot_squared(), quartic()):
        for n in (0, 2, 4):
            solved = wkb_energy(model, n)
            closed = formulas.closed_form_energies(model, n).e_wkb
            assert solved == pytest.approx(closed, rel=1e-7, abs=1e-9)


def test_corrected_energy_round_trip():
    """Feeding route B's R back into the corrected condition returns the
    exact level."""
    for model, count in (
        (harmonic(), 4),
        (morse(), 4),
        (coulomb_centrifugal(l=1), 3),
        (cot_squared(), 4),
        (quartic(), 4),
    ):
        for n in range(count):
            e_exact = exact_energy(model, n)
            r = residual_route_B(model, n, e_exact)
            back = corrected_energy(model, n, r)
            assert back == pytest.approx(e_exact, rel=1e-7, abs=1e-7)


def test_residual_route_B_harmonic_vanishes():
    model = harmonic()
    for n in range(7):
        assert abs(residual_route_B(model, n, n + 0.5)) < 1e-10


def test_residual_route_B_morse_vanishes():
    model = morse()
    for n in range(6):
        e = formulas.closed_form_energies(model, n).e_exact
        assert abs(residual_route_B(model, n, e)) < 1e-10


def test_residual_route_B_hydrogen_matches_closed_form():
    for l in (1, 2, 3):
        model = coulomb_centrifugal(l=l)
        closed = formulas.hydrogen_R_closed(l)
        for nr in range(3):
            n_principal = nr + l + 1
            r = residual_route_B(model, nr, -0.5 / n_principal**2)
            assert r == pytest.approx(closed, abs=1e-6)


def test_residual_route_B_cot2_constant():
    model = cot_squared()
    values = [
        residual_route_B(model, n, exact_energy(model, n)) for n in range(6)
    ]
    assert max(values) - min(values) < 1e-8
    assert values[0] == pytest.approx(0.269506, abs=1e-5)


def test_exact_energy_dispatch():
    assert exact_energy(harmonic(), 2) == pytest.approx(2.5)
    assert exact_energy(morse(), 2) == pytest.approx(-15.125)
    assert exact_energy(cot_squared(), 2) == pytest.approx(7.0)
    # quartic has no closed form; the shooting value is returned
    assert exact_energy(quartic(), 0) == pytest.approx(
        eigensolver.eigenvalue(quartic(), 0), rel=1e-12
    )


def test_classify_case_tags():
    assert classify_case(harmonic(), range(5)).tag == "zero"
    assert classify_case(coulomb_centrifugal(l=1), range(4)).tag == "n_independent"
    assert classify_case(quartic(), range(4)).tag == "n_dependent"


def test_classify_case_structure():
    table = classify_case(harmonic(), (0, 1, 2))
    assert isinstance(table, CaseTable)
    assert table.n_values == (0, 1, 2)
    assert len(table.residuals) == 3


def test_classify_case_empty_range():
    with pytest.raises(ValueError):
        classify_case(harmonic(), ())


def test_residual_report_row():
    report = residual_report(coulomb_centrifugal(l=1), 2)
    assert report.family == "hydrogen"
    assert report.n == 2
    assert report.E == pytest.approx(-1.0 / 32.0)
    assert report.R_route_B == pytest.approx(0.269506, abs=1e-5)
    assert report.R_closed_form == pytest.approx(formulas.hydrogen_R_closed(1))
    assert report.quantum_integral is None
    assert report.R_route_A is None


def test_residual_report_with_fields():
    report = residual_report(harmonic(), 1, with_fields=True)
    assert report.quantum_integral == pytest.approx(1.5 * math.pi, abs=1e-6)
    assert abs(report.R_route_A) < 1e-6


def test_residual_report_s_wave_fields_rejected():
    with pytest.raises(UnsupportedModelError):
        residual_report(coulomb_centrifugal(l=0), 0, with_fields=True)


def test_residual_report_csv_round_trip():
    report = residual_report(harmonic(), 0, case_tag="zero")
    header = ResidualReport.csv_header()
    assert header.split(",") == list(ResidualReport.CSV_COLUMNS)
    row = report.csv_row(lambda v: "%.6g" % v)
    cells = row.split(",")
    assert len(cells) == len(ResidualReport.CSV_COLUMNS)
    assert cells[0] == "harmonic"
    assert cells[-1] == "zero"
    # unavailable columns stay empty
    assert cells[5] == "" and cells[6] == "" and cells[8] == ""
    payload = report.to_json_dict()
    assert payload["case"] == "zero"
    assert payload["R_A"] is None


def test_tolerance_override_scales_solvers(monkeypatch):
    model = quartic()
    baseline = wkb_energy(model, 1)
    monkeypatch.setenv("QHJ_TOL_OVERRIDE", "100.0")
    loose = wkb_energy(model, 1)
    # still well within the loosened tolerance band of the same root
    assert loose == pytest.approx(baseline, rel=1e-5)
    # malformed or non-positive values fall back to the default scaling
    monkeypatch.setenv("QHJ_TOL_OVERRIDE", "oops")
    assert wkb_energy(model, 1) == pytest.approx(baseline, rel=1e-10)
    monkeypatch.setenv("QHJ_TOL_OVERRIDE", "-3")
    assert wkb_energy(model, 1) == pytest.approx(baseline, rel=1e-10)


@given(
    name=st.sampled_from(sorted(_SAMPLE_ENERGIES)),
    frac=st.floats(min_value=0.05, max_value=0.9),
    bump=st.floats(min_value=0.01, max_value=0.08),
)
def test_action_monotone_property(name, frac, bump):
    """I(E + d) > I(E) for any d > 0 inside the bound range."""
    model, _ = _SAMPLE_ENERGIES[name]
    lo, hi = bound_energy_range(model)
    if not math.isfinite(hi):
        hi = 40.0
    if not math.isfinite(lo):
        lo = -40.0
    span = hi - lo
    e1 = lo + frac * span
    e2 = min(e1 + bump * span, hi - 1e-3 * span)
    if e2 <= e1:
        return
    assert classical_action(model, e2) > classical_action(model, e1)
