"""Spectral solvers for the planar two-electron quantum dot relative motion.

Exact polynomial solutions at the discrete admissible frequencies, a
Numerov shooting engine for arbitrary frequency (1/r, ln r or no
interaction, positive and negative energies), and a validation suite that
reproduces the bundled reference expectations.
"""

from .model import (
    NumericalEigenstate,
    NumericsError,
    PotentialKind,
    QuantumNumbers,
    RadialProblem,
    RadialWaveFunction,
    effective_potential,
)
from .heun import (
    CoefficientPolynomial,
    HeunSolution,
    admissible_roots,
    asymptotic_series_coefficients,
    build_solution,
    laguerre_asymptotic,
    quantized_energy,
    recurrence_coefficients,
    sample_u,
)
from .numerov import (
    ShotResult,
    SpectrumRequest,
    bound_states,
    find_eigenvalues,
    grid_resolvable_floor,
    integrate,
    normalize,
    trial_nodes,
)
from .validate import (
    ComparisonReport,
    ComparisonRow,
    all_reports,
    load_expectations,
    overlap,
    reproduce_bound_states,
    reproduce_polynomials,
    reproduce_table1,
    reproduce_table2,
    reproduce_table3,
    reproduce_table4,
)

__version__ = "0.1.0"

__all__ = [
    "CoefficientPolynomial",
    "ComparisonReport",
    "ComparisonRow",
    "HeunSolution",
    "NumericalEigenstate",
    "NumericsError",
    "PotentialKind",
    "QuantumNumbers",
    "RadialProblem",
    "RadialWaveFunction",
    "ShotResult",
    "SpectrumRequest",
    "admissible_roots",
    "all_reports",
    "asymptotic_series_coefficients",
    "bound_states",
    "build_solution",
    "effective_potential",
    "find_eigenvalues",
    "grid_resolvable_floor",
    "integrate",
    "laguerre_asymptotic",
    "load_expectations",
    "normalize",
    "overlap",
    "quantized_energy",
    "recurrence_coefficients",
    "reproduce_bound_states",
    "reproduce_polynomials",
    "reproduce_table1",
    "reproduce_table2",
    "reproduce_table3",
    "reproduce_table4",
    "sample_u",
    "trial_nodes",
]
