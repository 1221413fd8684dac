"""Age-structured epidemic model with vertical transmission.

After normalizing away natural mortality, the infected density on the
age span [0, l] evolves under an infection operator
(B phi)(x) = integral of K(x, y) phi(y) dy and a recovery/transition
operator (M phi)(x) = phi'(x) + (gamma + delta)(x) phi(x) whose domain
carries the renewal condition phi(0) = theta * integral of beta * phi.
This module defines problem instances (built-in presets or custom
ingredients), assembles the collocated matrix pair, applies the
explicitly known next-generation operator as an independent reference,
and evaluates the closed-form upper bound on the spectral radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .operators import OperatorPair
from .spectral import (
    CollocationMesh,
    barycentric_interpolate,
    barycentric_weights,
    differentiation_matrix,
    quadrature_rule,
)

__all__ = [
    "ModelBProblem",
    "assemble_b",
    "ngo_apply_explicit",
    "preset_b",
    "upper_bound_b",
]

_NORMALIZER_DEGREE = 2000  # quadrature degree for preset normalizing constants
_BETA_UNIT_TOL = 1e-8


@dataclass(frozen=True)
class ModelBProblem:
    """One instance of the age-structured epidemic model.

    ``K`` is the effective infection kernel K(x, y) >= 0 (survival and
    contact structure folded in), ``gamma_plus_delta`` the combined
    removal-plus-recovery rate (it may blow up at the maximum age, in
    which case the last node must be excluded), ``beta`` the effective
    fertility (required when theta > 0) and ``Pi1`` the closed-form
    survival-in-infection probability used by the explicit
    next-generation operator. All callables must accept numpy arrays.
    """

    length: float
    K: Callable
    gamma_plus_delta: Callable
    theta: float
    beta: Callable | None = None
    Pi1: Callable | None = None
    exclude_last_node: bool = False
    preset: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.length <= 0.0:
            raise ValueError("maximum age must be positive")
        if self.theta > 0.0 and self.beta is None:
            raise ValueError("theta > 0 requires an effective fertility beta")


_B_ALLOWED = {
    "B1": ("k", "mu", "gamma", "delta", "theta", "l"),
    "B2.1": ("k", "alpha", "l"),
    "B2.2": ("k", "alpha", "l"),
    "B3": ("k", "alpha", "l0", "gamma", "delta", "theta", "l"),
}

_B_DEFAULTS = {
    "B1": {"k": 52.0, "mu": 28.0, "gamma": 1.0, "delta": 1.0, "theta": 1.0 / 7.0, "l": 1.0},
    "B2.1": {"k": 16065.0 / 64.0, "alpha": 0.25, "l": 1.0},
    "B2.2": {"k": 16065.0 / 64.0, "alpha": 1.0, "l": 1.0},
    "B3": {
        "k": 25.0,
        "alpha": 0.1,
        "l0": 0.1,
        "gamma": 1.0,
        "delta": 1.0,
        "theta": 0.5,
        "l": 1.0,
    },
}


def preset_b(name: str, overrides: dict | None = None) -> ModelBProblem:
    """Built-in instances of the age-structured epidemic model.

    B1 is the age-independent case (exponentially distributed lifetimes,
    separable kernel), B2.1/B2.2 the proportionate-mixing case with
    power-law survival (exponent 1/4 resp. 1) and a removal rate blowing
    up at the maximum age (so the last collocation node is excluded),
    and B3 the general case with a Gaussian same-age contact kernel and
    vertical transmission probability 1/2.

    ``overrides`` may replace the preset's scalars; the allowed keys per
    preset are the entries of its parameter dictionary.
    """
    key = str(name).strip().upper()
    if key not in _B_DEFAULTS:
        raise ValueError(f"unknown model-B preset {name!r}; choose from {sorted(_B_DEFAULTS)}")
    params = dict(_B_DEFAULTS[key])
    allowed = _B_ALLOWED[key]
    for okey, value in (overrides or {}).items():
        if okey not in allowed:
            raise ValueError(
                f"preset {key} does not accept override {okey!r}; allowed: {sorted(allowed)}"
            )
        params[okey] = float(value)
    pristine = not overrides

    length = params["l"]
    if length <= 0.0:
        raise ValueError("maximum age must be positive")
    k_tilde = params["k"]
    if k_tilde < 0.0:
        raise ValueError("kernel factor must be non-negative")

    if key == "B1":
        mu, gamma, delta, theta = params["mu"], params["gamma"], params["delta"], params["theta"]
        rate = gamma + delta

        def kernel(x, y):
            x = np.asarray(x, dtype=float)
            return k_tilde * mu * np.exp(-mu * np.asarray(y, dtype=float)) + 0.0 * x

        def beta(x):
            return mu * np.exp(-mu * np.asarray(x, dtype=float))

        def gamma_plus_delta(x):
            return np.full_like(np.asarray(x, dtype=float), rate)

        def pi1(x):
            return np.exp(-rate * np.asarray(x, dtype=float))

        problem = ModelBProblem(
            length=length,
            K=kernel,
            gamma_plus_delta=gamma_plus_delta,
            theta=theta,
            beta=beta,
            Pi1=pi1,
            exclude_last_node=False,
            preset=key,
            params=params,
        )

    elif key in ("B2.1", "B2.2"):
        alpha = params["alpha"]
        if alpha <= 0.0:
            raise ValueError("survival exponent alpha must be positive")
        int_pi0 = length / (alpha + 1.0)

        def kernel(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            return k_tilde * x**2 * (length - x) ** 2 * ((length - y) / length) ** alpha / int_pi0

        def gamma_plus_delta(x):
            return 1.0 / (length - np.asarray(x, dtype=float))

        def pi1(x):
            return (length - np.asarray(x, dtype=float)) / length

        problem = ModelBProblem(
            length=length,
            K=kernel,
            gamma_plus_delta=gamma_plus_delta,
            theta=0.0,
            beta=None,
            Pi1=pi1,
            exclude_last_node=True,
            preset=key,
            params=params,
        )

    else:  # B3
        alpha = params["alpha"]
        l0 = params["l0"]
        gamma, delta, theta = params["gamma"], params["delta"], params["theta"]
        if l0 <= 0.0:
            raise ValueError("contact range l0 must be positive")
        rate = gamma + delta

        def pi0(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros(x.shape)
            inside = x < length
            out[inside] = np.exp(-alpha * x[inside] / (length - x[inside]))
            return out

        def fertility_shape(x):
            x = np.asarray(x, dtype=float)
            return (x / length) ** 2 * np.exp(-6.0 * x / length)

        qx, qw = quadrature_rule(_NORMALIZER_DEGREE, length)
        int_pi0 = float(qw @ pi0(qx))
        int_b_pi0 = float(qw @ (fertility_shape(qx) * pi0(qx)))

        def kernel(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            return k_tilde * np.exp(-(((x - y) / l0) ** 2)) * pi0(y) / int_pi0

        def beta(x):
            x = np.asarray(x, dtype=float)
            return fertility_shape(x) * pi0(x) / int_b_pi0

        def gamma_plus_delta(x):
            return np.full_like(np.asarray(x, dtype=float), rate)

        def pi1(x):
            return np.exp(-rate * np.asarray(x, dtype=float))

        problem = ModelBProblem(
            length=length,
            K=kernel,
            gamma_plus_delta=gamma_plus_delta,
            theta=theta,
            beta=beta,
            Pi1=pi1,
            exclude_last_node=False,
            preset=key,
            params=params,
        )

    _validate_preset(problem, pristine)
    return problem


def _validate_preset(problem: ModelBProblem, pristine: bool) -> None:
    qx, qw = quadrature_rule(_NORMALIZER_DEGREE, problem.length)
    if problem.beta is not None:
        if pristine:
            total = float(qw @ np.asarray(problem.beta(qx), dtype=float))
            if abs(total - 1.0) > _BETA_UNIT_TOL:
                raise ValueError(
                    f"effective fertility must integrate to one (got {total!r})"
                )
        if problem.theta > 0.0 and problem.Pi1 is not None:
            discounted = float(
                qw @ (np.asarray(problem.beta(qx), float) * np.asarray(problem.Pi1(qx), float))
            )
            if problem.theta * discounted >= 1.0:
                raise ValueError("theta * integral(beta * Pi1) must stay below one")


def assemble_b(problem: ModelBProblem, mesh: CollocationMesh) -> OperatorPair:
    """Assemble the collocated pair (B, M) of the epidemic model.

    Rows i >= 1 of B carry the quadrature of the infection kernel,
    w_j K(x_i, x_j); its first row is zero. Rows i >= 1 of M discretize
    phi' + (gamma + delta) phi, and row 0 realizes the quadrature of the
    renewal condition. When ``exclude_last_node`` is set the last node is
    dropped: rows and columns shrink to the active index set, the
    quadrature keeps the remaining entries of the full-mesh weights
    (kernels of interest vanish at the dropped endpoint), and the
    differentiation block is that of the reduced node set, so the scheme
    never constrains the interpolant at the dropped node. This keeps
    rates that blow up at the maximum age out of the computation.
    """
    n = mesh.degree
    if n < 1:
        raise ValueError("the epidemic model needs mesh degree N >= 1")
    if mesh.length != problem.length:
        raise ValueError("mesh interval does not match the problem age span")

    active = np.arange(n) if problem.exclude_last_node else np.arange(n + 1)
    m = active.size
    if m < 2:
        raise ValueError("not enough active nodes; increase the mesh degree")
    xa = mesh.nodes[active]
    wa = mesh.weights[active]

    if problem.exclude_last_node:
        # closed-form barycentric weights of the mesh minus its last node:
        # deleting a node multiplies each remaining weight by (x_j - x_drop)
        lam = np.ones(n + 1)
        lam[1::2] = -1.0
        lam[0] *= 0.5
        lam[-1] *= 0.5
        diffmat = differentiation_matrix(xa, weights=lam[:n] * (xa - mesh.length))
    else:
        diffmat = mesh.diffmat

    rates = np.asarray(problem.gamma_plus_delta(xa), dtype=float)
    rates = np.broadcast_to(rates, xa.shape).astype(float, copy=True)
    if not np.all(np.isfinite(rates)):
        raise ValueError(
            "gamma + delta is non-finite at a retained node; exclude the last node "
            "or adjust the rate"
        )

    xg, yg = np.meshgrid(xa, xa, indexing="ij")
    kvals = np.asarray(problem.K(xg, yg), dtype=float)
    if kvals.shape != (m, m):
        raise ValueError("kernel K must broadcast over node grids")
    if not np.all(np.isfinite(kvals)) or np.any(kvals < 0.0):
        raise ValueError("kernel K must be finite and non-negative on the mesh")

    birth = np.zeros((m, m))
    birth[1:] = wa[None, :] * kvals[1:]

    mat = diffmat.copy()
    diag = np.arange(1, m)
    mat[diag, diag] += rates[1:]
    row0 = np.zeros(m)
    row0[0] = 1.0
    if problem.theta != 0.0:
        bv = np.asarray(problem.beta(xa), dtype=float)
        if not np.all(np.isfinite(bv)) or np.any(bv < 0.0):
            raise ValueError("beta must be finite and non-negative on the mesh")
        row0 -= problem.theta * wa * bv
    mat[0] = row0

    return OperatorPair(B=birth, M=mat, mesh=mesh, active_indices=active)


def _as_function(problem: ModelBProblem, psi, mesh: CollocationMesh):
    if callable(psi):
        return psi
    samples = np.asarray(psi, dtype=float)
    active = (
        np.arange(mesh.degree)
        if problem.exclude_last_node
        else np.arange(mesh.degree + 1)
    )
    xa = mesh.nodes[active]
    if samples.shape != xa.shape:
        raise ValueError("psi samples must match the active mesh nodes")
    wbar = barycentric_weights(xa)
    return lambda z: barycentric_interpolate(xa, samples, z, weights=wbar)


def ngo_apply_explicit(
    problem: ModelBProblem,
    psi,
    mesh: CollocationMesh,
    fine_degree: int = 400,
) -> np.ndarray:
    """Apply the explicitly known next-generation operator to psi.

    Evaluates, at the active mesh nodes x_i,

        integral of K(x_i, y) Pi1(y) (C + integral_0^y psi/Pi1) dy,

    where the constant C resolves the renewal condition. Every integral
    is a Clenshaw-Curtis quadrature on a dedicated fine mesh (the inner
    antiderivative uses the affinely rescaled unit rule per node), so the
    routine is an independent reference for the matrix product B M^{-1}.

    ``psi`` may be a vectorized callable or samples over the active mesh
    nodes. Requires the closed-form Pi1 of the problem; where Pi1
    vanishes at the maximum age the outer integrand is continued by its
    zero limit.
    """
    if problem.Pi1 is None:
        raise ValueError("the explicit next-generation operator needs a closed-form Pi1")
    psi_fun = _as_function(problem, psi, mesh)
    length = problem.length
    active = (
        np.arange(mesh.degree)
        if problem.exclude_last_node
        else np.arange(mesh.degree + 1)
    )
    xa = mesh.nodes[active]

    unit_nodes, unit_weights = quadrature_rule(fine_degree, 1.0)
    yq, wq = quadrature_rule(fine_degree, length)
    pi1q = np.asarray(problem.Pi1(yq), dtype=float)
    positive = pi1q > 0.0

    # antiderivative of psi/Pi1 at each fine node via the rescaled rule
    zgrid = yq[:, None] * unit_nodes[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.asarray(psi_fun(zgrid), dtype=float) / np.asarray(
            problem.Pi1(zgrid), dtype=float
        )
    if not np.all(np.isfinite(integrand[positive])):
        raise ValueError("psi/Pi1 is non-finite inside the age span")
    cumulative = (integrand @ unit_weights) * yq

    renewal = 0.0
    if problem.theta != 0.0:
        bq = np.asarray(problem.beta(yq), dtype=float)
        discounted = float(wq @ (bq * pi1q))
        denom = 1.0 - problem.theta * discounted
        if denom <= 0.0:
            raise ValueError("renewal constant undefined: theta * integral(beta * Pi1) >= 1")
        with np.errstate(invalid="ignore"):
            terms = np.where(positive, bq * pi1q * cumulative, 0.0)
        renewal = problem.theta * float(wq @ terms) / denom

    with np.errstate(invalid="ignore"):
        damped = np.where(positive, pi1q * (renewal + cumulative), 0.0)
    xg, yg = np.meshgrid(xa, yq, indexing="ij")
    kvals = np.asarray(problem.K(xg, yg), dtype=float)
    return kvals @ (wq * damped)


def upper_bound_b(problem: ModelBProblem, mesh: CollocationMesh) -> float:
    """Closed-form upper bound on the spectral radius.

    Tensorized quadrature of the double integral of
    K(x, y) * (theta Pi1(y) / (1 - theta * integral(beta * Pi1)) + 1):
    the expected total number of infections of one generation, vertical
    transmission included. Always at least as large as the computed
    spectral radius.
    """
    x = mesh.nodes
    w = mesh.weights
    xg, yg = np.meshgrid(x, x, indexing="ij")
    kvals = np.asarray(problem.K(xg, yg), dtype=float)
    if np.any(kvals < 0.0):
        raise ValueError("kernel K must be non-negative")
    factor = np.ones_like(x)
    if problem.theta != 0.0:
        if problem.Pi1 is None:
            raise ValueError("the upper bound needs a closed-form Pi1 when theta > 0")
        pi1 = np.asarray(problem.Pi1(x), dtype=float)
        discounted = float(w @ (np.asarray(problem.beta(x), dtype=float) * pi1))
        denom = 1.0 - problem.theta * discounted
        if denom <= 0.0:
            raise ValueError("upper bound undefined: theta * integral(beta * Pi1) >= 1")
        factor = factor + problem.theta * pi1 / denom
    return float(w @ kvals @ (w * factor))
