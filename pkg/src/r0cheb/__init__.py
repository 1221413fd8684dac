"""Basic reproduction numbers of structured populations by collocation.

The basic reproduction number of a structured population model is the
spectral radius of its next-generation operator B M^{-1}, built from a
birth (or infection) operator B and a transition (mortality, recovery)
operator M. This package reduces the generalized eigenproblem
B phi = lambda M phi to dense matrix eigenproblems by polynomial
collocation at Chebyshev extremal points and extracts the dominant
eigenpair.

Two model families ship as presets: an advection-diffusion cell
population on a bounded habitat (A1, A2, A3.1-A3.3) and an
age-structured epidemic with vertical transmission (B1, B2.1, B2.2,
B3). On top of the solver sit convergence and order diagnostics,
parameter sweeps and a CLI emitting JSON/CSV.
"""

from .analysis import (
    ConvergenceReport,
    Reference,
    SweepResult,
    VarySpec,
    assemble_problem,
    converge,
    estimate_order,
    exact_eigenfunction,
    exact_r0,
    make_problem,
    reference_value,
    sweep,
)
from .eigen import CONDITION_LIMIT, R0Result, eigenfunction, spectral_radius
from .exceptions import EigensolverError, IllConditionedError, NumericalError
from .model_a import ModelAProblem, assemble_a, preset_a
from .model_b import ModelBProblem, assemble_b, ngo_apply_explicit, preset_b, upper_bound_b
from .operators import OperatorPair, tabulated
from .spectral import (
    CollocationMesh,
    barycentric_interpolate,
    barycentric_weights,
    chebyshev_nodes,
    collocation_mesh,
    differentiation_matrix,
    quadrature_rule,
    quadrature_weights,
)

__version__ = "0.1.0"

__all__ = [
    "CONDITION_LIMIT",
    "CollocationMesh",
    "ConvergenceReport",
    "EigensolverError",
    "IllConditionedError",
    "ModelAProblem",
    "ModelBProblem",
    "NumericalError",
    "OperatorPair",
    "R0Result",
    "Reference",
    "SweepResult",
    "VarySpec",
    "assemble_a",
    "assemble_b",
    "assemble_problem",
    "barycentric_interpolate",
    "barycentric_weights",
    "chebyshev_nodes",
    "collocation_mesh",
    "converge",
    "differentiation_matrix",
    "eigenfunction",
    "estimate_order",
    "exact_eigenfunction",
    "exact_r0",
    "make_problem",
    "ngo_apply_explicit",
    "preset_a",
    "preset_b",
    "quadrature_rule",
    "quadrature_weights",
    "reference_value",
    "spectral_radius",
    "sweep",
    "tabulated",
    "upper_bound_b",
]
