"""Spatially structured cell population model.

A population drifts and diffuses along a bounded habitat [0, l] while
proliferating by symmetric division. The linearized dynamics around
extinction split into a birth operator (B phi)(x) = 2 beta(x) phi(x) and
a transition operator (M phi)(x) = (c phi - D phi')' + (beta + mu) phi
with zero-flux conditions c phi - D phi' = 0 at both ends. This module
defines problem instances (built-in presets or custom coefficients) and
assembles the collocated matrix pair of the generalized eigenproblem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .operators import OperatorPair
from .spectral import CollocationMesh

__all__ = ["ModelAProblem", "assemble_a", "preset_a"]


@dataclass(frozen=True)
class ModelAProblem:
    """One instance of the cell population model.

    ``c`` (flow velocity, positive inside the habitat), ``D`` (diffusion,
    either positive everywhere or identically zero), ``beta`` (fertility)
    and ``mu`` (mortality) are functions of position accepting numpy
    arrays. ``params`` records the scalar factors a preset was built
    from.
    """

    length: float
    c: Callable
    D: Callable
    beta: Callable
    mu: Callable
    preset: str | None = None
    params: dict = field(default_factory=dict)


_A_DEFAULTS = {
    "A1": {"D": 1.0, "beta": 1.0, "l": 1.0},
    "A2": {"D": 1.0, "beta": 1.5, "mu": 1.0, "l": 1.0},
    "A3.1": {"D": 1.0, "beta": 10.0, "mu": 1.0, "l": 1.0},
    "A3.2": {"D": 1e-6, "beta": 10.0, "mu": 1.0, "l": 1.0},
    "A3.3": {"D": 0.0, "beta": 10.0, "mu": 1.0, "l": 1.0},
}


def preset_a(name: str, overrides: dict | None = None) -> ModelAProblem:
    """Built-in instances of the cell population model.

    A1 is the immortal case (no mortality), A2 the proportional case
    (fertility proportional to mortality), A3.1/A3.2/A3.3 the general
    case with diffusion factor 1, 1e-6 and 0. All use velocity
    c(x) = l - x, bump-shaped diffusion D(x) = D*(4x(l-x)/l^2 + 1), and
    a cubic fertility bump (A1, A3) or linear ramps (A2).

    ``overrides`` may replace the preset's scalar factors; keys are
    "D", "beta", "mu" (where the preset has one) and "l".
    """
    key = str(name).strip().upper()
    if key not in _A_DEFAULTS:
        raise ValueError(f"unknown model-A preset {name!r}; choose from {sorted(_A_DEFAULTS)}")
    params = dict(_A_DEFAULTS[key])
    for okey, value in (overrides or {}).items():
        if okey not in params:
            raise ValueError(
                f"preset {key} does not accept override {okey!r}; allowed: {sorted(params)}"
            )
        params[okey] = float(value)

    length = params["l"]
    if length <= 0.0:
        raise ValueError("domain length must be positive")
    d_tilde = params["D"]
    b_tilde = params["beta"]
    if d_tilde < 0.0 or b_tilde < 0.0 or params.get("mu", 0.0) < 0.0:
        raise ValueError("scalar factors must be non-negative")

    def c(x):
        return length - np.asarray(x, dtype=float)

    def diffusion(x):
        x = np.asarray(x, dtype=float)
        return d_tilde * (4.0 * x * (length - x) / length**2 + 1.0)

    def fertility_bump(x):
        x = np.asarray(x, dtype=float)
        return b_tilde * (13.5 / length**3 * x * x * (length - x) + 1.0)

    if key == "A1":
        beta = fertility_bump

        def mu(x):
            return np.zeros_like(np.asarray(x, dtype=float))

    else:
        m_tilde = params["mu"]

        def mu(x):
            return m_tilde * np.asarray(x, dtype=float) / length

        if key == "A2":

            def beta(x):
                return b_tilde * mu(x)

        else:
            beta = fertility_bump

    return ModelAProblem(
        length=length, c=c, D=diffusion, beta=beta, mu=mu, preset=key, params=params
    )


def _sample(fn: Callable, x: np.ndarray, what: str) -> np.ndarray:
    vals = np.asarray(fn(x), dtype=float)
    vals = np.broadcast_to(vals, x.shape).astype(float, copy=True)
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"{what} evaluates to non-finite values on the mesh")
    return vals


def assemble_a(problem: ModelAProblem, mesh: CollocationMesh) -> OperatorPair:
    """Assemble the collocated pair (B, M) of the cell population model.

    Interior rows of M discretize (c phi - D phi')' + (beta + mu) phi via
    the differentiation matrix; the first and last rows impose the
    zero-flux boundary conditions. B is diagonal with 2 beta at interior
    nodes and zero boundary rows.

    Without diffusion the problem is first-order transport and the
    outflow flux condition at x = l degenerates (it would produce a zero
    row whenever c(l) = 0); in that regime the last row instead carries
    the interior collocation equation at x = l, keeping only the inflow
    condition.
    """
    n = mesh.degree
    if n < 2:
        raise ValueError("the cell population model needs mesh degree N >= 2")
    if mesh.length != problem.length:
        raise ValueError("mesh interval does not match the problem domain")

    x = mesh.nodes
    diff = mesh.diffmat
    cv = _sample(problem.c, x, "velocity c")
    dv = _sample(problem.D, x, "diffusion D")
    bv = _sample(problem.beta, x, "fertility beta")
    mv = _sample(problem.mu, x, "mortality mu")

    if np.any(cv[1:-1] <= 0.0):
        raise ValueError("velocity c must be positive inside (0, l)")
    no_diffusion = bool(np.all(dv == 0.0))
    if not no_diffusion and np.any(dv <= 0.0):
        raise ValueError("diffusion D must be positive everywhere or identically zero")
    if np.any(bv < 0.0) or np.any(mv < 0.0):
        raise ValueError("beta and mu must be non-negative")
    if np.all(bv + mv == 0.0):
        raise ValueError("beta + mu must not vanish identically")

    # interior operator: H (C - D H) + diag(beta + mu)
    flux = np.diag(cv) - dv[:, None] * diff
    mat = diff @ flux
    idx = np.arange(n + 1)
    mat[idx, idx] += bv + mv

    row0 = -dv[0] * diff[0]
    row0 = row0.copy()
    row0[0] += cv[0]
    mat[0] = row0
    if not no_diffusion:
        rown = -dv[n] * diff[n]
        rown = rown.copy()
        rown[n] += cv[n]
        mat[n] = rown

    birth = np.zeros((n + 1, n + 1))
    interior = idx[1:n]
    birth[interior, interior] = 2.0 * bv[1:n]
    if no_diffusion:
        birth[n, n] = 2.0 * bv[n]

    return OperatorPair(B=birth, M=mat, mesh=mesh, active_indices=idx)
