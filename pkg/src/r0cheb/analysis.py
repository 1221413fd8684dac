"""Convergence studies, error metrics and parameter sweeps.

Tools to measure how the approximated spectral radius and eigenfunction
converge with the mesh degree, estimate empirical convergence orders
from log-log fits, and map the spectral radius over one- or
two-parameter grids of the built-in model presets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigen import R0Result, eigenfunction, spectral_radius
from .exceptions import NumericalError
from .model_a import ModelAProblem, assemble_a, preset_a
from .model_b import ModelBProblem, assemble_b, preset_b
from .operators import OperatorPair
from .spectral import collocation_mesh, quadrature_rule

__all__ = [
    "ConvergenceReport",
    "Reference",
    "SweepResult",
    "VarySpec",
    "assemble_problem",
    "converge",
    "estimate_order",
    "exact_eigenfunction",
    "exact_r0",
    "make_problem",
    "reference_value",
    "sweep",
]

DEFAULT_REFERENCE_DEGREE = 1000
DEFAULT_EVAL_POINTS = 1000


def make_problem(preset: str, overrides: dict | None = None):
    """Build a preset instance of either model family by name."""
    key = str(preset).strip().upper()
    if key.startswith("A"):
        return preset_a(key, overrides)
    if key.startswith("B"):
        return preset_b(key, overrides)
    raise ValueError(f"unknown preset {preset!r}")


def assemble_problem(problem, mesh) -> OperatorPair:
    """Assemble the matrix pair for either model family."""
    if isinstance(problem, ModelAProblem):
        return assemble_a(problem, mesh)
    if isinstance(problem, ModelBProblem):
        return assemble_b(problem, mesh)
    raise TypeError(f"unsupported problem type {type(problem).__name__}")


def exact_r0(problem) -> float | None:
    """Closed-form spectral radius for presets that admit one.

    The immortal cell case gives exactly 2, the proportional case
    2*beta/(beta + 1), and the proportionate epidemic case the rational
    expression in the survival exponent; other presets have no known
    closed form and return None.
    """
    if isinstance(problem, ModelAProblem):
        if problem.preset == "A1":
            return 2.0
        if problem.preset == "A2":
            b = problem.params["beta"]
            return 2.0 * b / (b + 1.0)
    if isinstance(problem, ModelBProblem) and problem.preset in ("B2.1", "B2.2"):
        a = problem.params["alpha"]
        k = problem.params["k"]
        ell = problem.length
        return 2.0 * k * (a + 1.0) * ell**5 / ((a + 2.0) * (a + 4.0) * (a + 5.0) * (a + 6.0))
    return None


def _phi_flux_balance(problem: ModelAProblem, degree: int = 256):
    """Eigenfunction exp(int_0^x c/D) of the diffusive cell presets.

    The zero-flux eigenfunction balances advective and diffusive flux
    pointwise; its exponent is evaluated per query with the affinely
    rescaled Clenshaw-Curtis rule. Only valid with positive diffusion.
    """
    unit_nodes, unit_weights = quadrature_rule(degree, 1.0)

    def phi(x):
        xq = np.asarray(x, dtype=float)
        flat = np.atleast_1d(xq).ravel()
        zgrid = flat[:, None] * unit_nodes[None, :]
        ratio = np.asarray(problem.c(zgrid), dtype=float) / np.asarray(
            problem.D(zgrid), dtype=float
        )
        vals = np.exp((ratio @ unit_weights) * flat)
        if xq.ndim == 0:
            return float(vals[0])
        return vals.reshape(xq.shape)

    return phi


def exact_eigenfunction(problem):
    """Known exact eigenfunction and normalization anchor, if any.

    Returns (phi, (x0, v0)) where phi already satisfies phi(x0) = v0, or
    None when the preset has no closed-form eigenfunction. Available for
    the diffusive cell presets A1/A2 (flux-balance exponential, unit
    value at 0) and the proportionate epidemic presets B2.1/B2.2 (a
    degree-5 polynomial anchored at midspan).
    """
    if isinstance(problem, ModelAProblem) and problem.preset in ("A1", "A2"):
        return _phi_flux_balance(problem), (0.0, 1.0)
    if isinstance(problem, ModelBProblem) and problem.preset in ("B2.1", "B2.2"):
        ell = problem.length

        def phi(x):
            x = np.asarray(x, dtype=float)
            return x**3 * (ell - x) * (4.0 * ell - 3.0 * x) / 12.0

        return phi, (0.5 * ell, 5.0 * ell**5 / 384.0)
    return None


@dataclass(frozen=True)
class Reference:
    """Reference value for convergence errors, with its provenance."""

    value: float
    provenance: str  # "exact" or "computed-at-<N>"


@dataclass
class ConvergenceReport:
    """Error-versus-degree table for one problem.

    ``r0_errors[k]`` is |R0_N - reference| for ``n_values[k]``;
    ``eigfun_errors`` (present only when an exact eigenfunction was
    supplied) holds sup-norm errors on the equidistant evaluation mesh.
    Failed degrees are recorded in ``failures`` and carry NaN entries.
    """

    n_values: list[int]
    r0_errors: np.ndarray
    eigfun_errors: np.ndarray | None
    reference: Reference
    eval_points: int
    failures: list[tuple[int, str]] = field(default_factory=list)
    eigfun_skipped: dict[int, str] = field(default_factory=dict)


def reference_value(
    problem,
    nbar: int = DEFAULT_REFERENCE_DEGREE,
    method: str = "ngo-product",
) -> float:
    """Spectral radius at one suitably large degree, as reference."""
    if nbar < 2:
        raise ValueError("reference degree must be at least 2")
    mesh = collocation_mesh(nbar, problem.length)
    return spectral_radius(assemble_problem(problem, mesh), method).r0


def converge(
    problem,
    n_values,
    reference: float | None = None,
    nbar: int = DEFAULT_REFERENCE_DEGREE,
    exact_phi=None,
    anchor: tuple[float, float] | None = None,
    eval_points: int = DEFAULT_EVAL_POINTS,
    method: str = "ngo-product",
) -> ConvergenceReport:
    """Errors of the spectral radius (and optionally the eigenfunction).

    ``reference`` is the exact spectral radius when known; otherwise a
    reference is computed once at degree ``nbar``. When ``exact_phi`` is
    given it must already be normalized at ``anchor`` = (x0, v0); the
    computed eigenfunction is rescaled to the same anchor and compared in
    the sup norm on ``eval_points`` equidistant points. A degree whose
    solve fails is recorded and skipped rather than aborting the study.
    """
    ns = [int(n) for n in n_values]
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_values must be non-empty and strictly ascending")
    if exact_phi is not None and anchor is None:
        raise ValueError("an exact eigenfunction needs a normalization anchor")

    if reference is not None:
        ref = Reference(float(reference), "exact")
    else:
        ref = Reference(reference_value(problem, nbar, method), f"computed-at-{nbar}")

    grid = np.linspace(0.0, problem.length, eval_points)
    phi_exact = np.asarray(exact_phi(grid), dtype=float) if exact_phi is not None else None

    r0_errors = np.full(len(ns), np.nan)
    phi_errors = np.full(len(ns), np.nan) if exact_phi is not None else None
    failures: list[tuple[int, str]] = []
    skipped: dict[int, str] = {}

    for k, n in enumerate(ns):
        try:
            mesh = collocation_mesh(n, problem.length)
            pair = assemble_problem(problem, mesh)
            result = spectral_radius(pair, method)
        except (ValueError, NumericalError) as exc:
            failures.append((n, str(exc)))
            continue
        r0_errors[k] = abs(result.r0 - ref.value)
        if phi_errors is None:
            continue
        if not result.dominant_is_real:
            skipped[n] = "dominant eigenvalue is complex"
            continue
        approx = eigenfunction(result, mesh, grid, anchor=anchor)
        phi_errors[k] = float(np.max(np.abs(approx - phi_exact)))

    return ConvergenceReport(
        n_values=ns,
        r0_errors=r0_errors,
        eigfun_errors=phi_errors,
        reference=ref,
        eval_points=eval_points,
        failures=failures,
        eigfun_skipped=skipped,
    )


def estimate_order(report: ConvergenceReport, window: tuple[int, int]) -> float:
    """Empirical convergence order from a log-log least-squares fit.

    Fits log(error) against log(N) over the degrees inside ``window``
    (inclusive) and returns the negated slope, so order p means the error
    decays like N**-p. Needs at least three finite positive errors.
    """
    lo, hi = window
    ns, errs = [], []
    for n, err in zip(report.n_values, np.asarray(report.r0_errors, dtype=float)):
        if lo <= n <= hi and np.isfinite(err) and err > 0.0:
            ns.append(n)
            errs.append(err)
    if len(ns) < 3:
        raise ValueError("need at least three positive errors inside the window")
    slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class VarySpec:
    """One swept parameter: an inclusive grid of ``points`` values."""

    name: str
    lo: float
    hi: float
    points: int
    log: bool = False

    def grid(self) -> np.ndarray:
        if self.points < 2:
            raise ValueError("a sweep needs at least 2 grid points")
        if self.log:
            if self.lo <= 0.0 or self.hi <= 0.0:
                raise ValueError("log grids need positive bounds")
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass
class SweepResult:
    """Spectral radius over a parameter grid.

    ``values`` is 1-d for one swept parameter or 2-d (row-major, first
    parameter along rows) for two. Grid points whose solve failed carry
    NaN and are listed in ``failures`` with their grid index.
    """

    param_names: tuple[str, ...]
    grids: tuple[np.ndarray, ...]
    values: np.ndarray
    n_used: int
    failures: list[tuple[tuple[int, ...], str]] = field(default_factory=list)


def sweep(
    preset: str,
    vary,
    n: int,
    overrides: dict | None = None,
    method: str = "ngo-product",
) -> SweepResult:
    """Spectral radius of a preset family over a 1-d or 2-d scalar grid.

    Each grid point rebuilds the preset with the swept scalar(s) merged
    into ``overrides`` and solves independently at degree ``n`` on a
    shared mesh. Failures at single points are recorded, not fatal.
    """
    specs = list(vary)
    if not 1 <= len(specs) <= 2:
        raise ValueError("sweep supports one or two varied parameters")
    base = dict(overrides or {})
    probe = make_problem(preset, base)
    mesh = collocation_mesh(int(n), probe.length)
    grids = tuple(spec.grid() for spec in specs)

    failures: list[tuple[tuple[int, ...], str]] = []

    def solve(point: dict) -> float:
        problem = make_problem(preset, {**base, **point})
        return spectral_radius(assemble_problem(problem, mesh), method).r0

    if len(specs) == 1:
        values = np.full(grids[0].size, np.nan)
        for i, v in enumerate(grids[0]):
            try:
                values[i] = solve({specs[0].name: float(v)})
            except (ValueError, NumericalError) as exc:
                failures.append(((i,), str(exc)))
    else:
        values = np.full((grids[0].size, grids[1].size), np.nan)
        for i, v1 in enumerate(grids[0]):
            for j, v2 in enumerate(grids[1]):
                try:
                    values[i, j] = solve(
                        {specs[0].name: float(v1), specs[1].name: float(v2)}
                    )
                except (ValueError, NumericalError) as exc:
                    failures.append(((i, j), str(exc)))

    return SweepResult(
        param_names=tuple(spec.name for spec in specs),
        grids=grids,
        values=values,
        n_used=int(n),
        failures=failures,
    )
