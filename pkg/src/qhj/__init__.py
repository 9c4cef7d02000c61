"""Quantum Hamilton-Jacobi toolkit: exact spectra, phase-amplitude fields,
and the residual correction to WKB quantization.

The package is organized as a pipeline:

- :mod:`qhj.potentials` defines the five benchmark potential families and
  their classical geometry (turning points, momentum, bound-energy range).
- :mod:`qhj.eigensolver` computes exact bound levels and eigenfunctions by
  Numerov shooting with node-count bracketing.
- :mod:`qhj.formulas` collects the closed-form WKB, corrected, and exact
  level expressions per family.
- :mod:`qhj.action_residual` evaluates the classical action I(E) and the
  residual R = I(E_exact) - (n + 1/2) pi hbar that corrects WKB
  quantization, and classifies each family's residual behavior.
- :mod:`qhj.qhje` solves the quantum Hamilton-Jacobi equation in
  phase-amplitude form: the quantum action X, its derivatives, the
  correction fields F and G, wave-function reconstruction, the
  field-integral route to R, and phase-based quantization.
- :mod:`qhj.cli` wraps every stage as a command-line tool.
"""

from __future__ import annotations

from .action_residual import (
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
from .eigensolver import (
    Direction,
    EigenState,
    Grid,
    count_nodes,
    default_grid,
    eigenstate,
    eigenvalue,
    numerov_sweep,
)
from .errors import (
    AmplitudeIntegrationError,
    CorrectionUndefinedError,
    DomainError,
    ForbiddenRegionError,
    NoSuchLevelError,
    NoTurningPointsError,
    QhjError,
    ScanExhaustedError,
    UnsupportedModelError,
)
from .formulas import (
    FormulaTriple,
    classical_action_closed,
    closed_form_energies,
    cot_squared_lambda,
    hydrogen_R_closed,
)
from .potentials import (
    Family,
    PotentialModel,
    TurningPair,
    bound_energy_range,
    classical_momentum,
    cot_squared,
    coulomb_centrifugal,
    evaluate,
    harmonic,
    momentum_squared,
    morse,
    potential_derivatives,
    quartic,
    turning_points,
)
from .qhje import (
    QhjFields,
    equation_residual,
    integrate_amplitude,
    milne_amplitude,
    qhj_fields,
    quantize_via_qhj,
    quantum_action_integral,
    reconstruct_wavefunction,
    residual_route_A,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeIntegrationError",
    "CaseTable",
    "CorrectionUndefinedError",
    "Direction",
    "DomainError",
    "EigenState",
    "Family",
    "ForbiddenRegionError",
    "FormulaTriple",
    "Grid",
    "NoSuchLevelError",
    "NoTurningPointsError",
    "PotentialModel",
    "QhjError",
    "QhjFields",
    "ResidualReport",
    "ScanExhaustedError",
    "TurningPair",
    "UnsupportedModelError",
    "bound_energy_range",
    "classical_action",
    "classical_action_closed",
    "classical_momentum",
    "classify_case",
    "closed_form_energies",
    "corrected_energy",
    "cot_squared",
    "cot_squared_lambda",
    "coulomb_centrifugal",
    "count_nodes",
    "default_grid",
    "eigenstate",
    "eigenvalue",
    "equation_residual",
    "evaluate",
    "exact_energy",
    "harmonic",
    "hydrogen_R_closed",
    "integrate_amplitude",
    "milne_amplitude",
    "momentum_squared",
    "morse",
    "numerov_sweep",
    "potential_derivatives",
    "qhj_fields",
    "quantize_via_qhj",
    "quantum_action_integral",
    "quartic",
    "reconstruct_wavefunction",
    "residual_report",
    "residual_route_A",
    "residual_route_B",
    "turning_points",
    "wkb_energy",
    "__version__",
]
