"""Chebyshev collocation toolbox on an interval [0, l].

Provides the four ingredients needed to discretize differential and
integral operators by polynomial collocation at Chebyshev extremal
points: node generation, spectral differentiation matrices,
Clenshaw-Curtis quadrature weights and barycentric Lagrange
interpolation. All routines work on the physical interval [0, l]; the
classical [-1, 1] formulas are mapped by the affine change of variable.

References
----------
- Trefethen, "Spectral Methods in MATLAB", SIAM, 2000.
- Berrut & Trefethen, "Barycentric Lagrange Interpolation",
  SIAM Review 46(3), 2004.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "CollocationMesh",
    "barycentric_interpolate",
    "barycentric_weights",
    "chebyshev_nodes",
    "collocation_mesh",
    "differentiation_matrix",
    "quadrature_rule",
    "quadrature_weights",
]


def chebyshev_nodes(degree: int, length: float) -> np.ndarray:
    """Chebyshev extremal points mapped to [0, length], ascending.

    The i-th node is length*(1 - cos(i*pi/degree))/2, evaluated through
    the half-angle identity and mirrored about the midpoint, so that the
    endpoints are exactly 0 and length (and the middle node exactly
    length/2 for even degree). Boundary rows of the discretized operators
    rely on this exact endpoint identity.
    """
    n = operator.index(degree)
    if n < 1:
        raise ValueError("degree must be a positive integer")
    length = float(length)
    if not np.isfinite(length) or length <= 0.0:
        raise ValueError("interval length must be positive")
    m = n // 2
    k = np.arange(m + 1)
    x = np.empty(n + 1)
    x[: m + 1] = length * np.square(np.sin(0.5 * np.pi * k / n))
    x[m + 1 :] = length - x[: n - m][::-1]
    x[0] = 0.0
    x[n] = length
    if n % 2 == 0:
        x[m] = 0.5 * length
    return x


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    """Barycentric weights w_j = 1 / prod_{k != j} (x_j - x_k).

    Each pairwise difference is scaled by four over the node span, which
    keeps the products in floating-point range for meshes of thousands of
    points; only weight ratios enter differentiation and interpolation,
    so the common scale factor is immaterial.
    """
    x = np.asarray(nodes, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("nodes must be a non-empty 1-d array")
    if not np.all(np.isfinite(x)):
        raise ValueError("nodes must be finite")
    if x.size == 1:
        return np.ones(1)
    span = x.max() - x.min()
    if span == 0.0:
        raise ValueError("nodes must be distinct")
    diff = (x[:, None] - x[None, :]) * (4.0 / span)
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0.0):
        raise ValueError("nodes must be distinct")
    return 1.0 / diff.prod(axis=1)


def differentiation_matrix(nodes: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """First-derivative collocation matrix for distinct nodes.

    Entry (i, j) is the derivative of the j-th Lagrange basis polynomial
    at node i, assembled from barycentric weights. Diagonal entries use
    the negative-sum trick, so each row sums to zero exactly and the
    matrix annihilates constants; the result is exact for polynomials up
    to the mesh degree.

    When ``weights`` is given it must hold barycentric weights for the
    nodes (up to a common factor); Chebyshev meshes use their closed-form
    alternating-sign weights through this hook.
    """
    x = np.asarray(nodes, dtype=float)
    w = barycentric_weights(x) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != x.shape:
        raise ValueError("weights must match nodes")
    if x.size == 1:
        return np.zeros((1, 1))
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    if np.any(dx == 0.0):
        raise ValueError("nodes must be distinct")
    mat = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(mat, 0.0)
    np.fill_diagonal(mat, -mat.sum(axis=1))
    return mat


def _clenshaw_curtis_weights(degree: int, length: float) -> np.ndarray:
    """Closed-form Clenshaw-Curtis weights for the degree-N extremal mesh.

    Cosine-series evaluation of the exact Lagrange-basis integrals on
    [-1, 1], scaled by length/2; exact for polynomials up to the degree.
    """
    n = degree
    w = np.ones(n + 1)
    kmax = n // 2
    if kmax >= 1:
        theta = np.arange(n + 1) * (np.pi / n)
        k = np.arange(1, kmax + 1)
        b = np.full(kmax, 2.0)
        if n % 2 == 0:
            b[-1] = 1.0
        w = w - np.cos(2.0 * np.outer(theta, k)) @ (b / (4.0 * k * k - 1.0))
    w *= length / n
    w[0] *= 0.5
    w[-1] *= 0.5
    # the rule is symmetric; enforce it exactly
    return 0.5 * (w + w[::-1])


def _moment_weights(nodes: np.ndarray, length: float) -> np.ndarray:
    """Interpolatory weights for arbitrary distinct nodes in [0, length].

    Solves the moment system in the Chebyshev basis of the interval,
    which stays well conditioned whenever the nodes support stable
    polynomial interpolation.
    """
    x = nodes
    t = 2.0 * x / length - 1.0
    m = x.size
    vand = np.empty((m, m))
    vand[0] = 1.0
    if m > 1:
        vand[1] = t
    for k in range(2, m):
        vand[k] = 2.0 * t * vand[k - 1] - vand[k - 2]
    moments = np.zeros(m)
    even = np.arange(0, m, 2)
    moments[even] = length / (1.0 - even.astype(float) ** 2)
    return np.linalg.solve(vand, moments)


def quadrature_weights(nodes: np.ndarray, length: float) -> np.ndarray:
    """Interpolatory quadrature weights over [0, length] for the nodes.

    w @ f(nodes) equals the integral of f over [0, length] for every
    polynomial f of degree <= len(nodes) - 1. Chebyshev extremal meshes
    are detected and dispatched to the closed-form Clenshaw-Curtis
    formula; any other distinct node set goes through the Chebyshev-basis
    moment system.
    """
    x = np.asarray(nodes, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("nodes must be a non-empty 1-d array")
    length = float(length)
    if not np.isfinite(length) or length <= 0.0:
        raise ValueError("interval length must be positive")
    if not np.all(np.isfinite(x)):
        raise ValueError("nodes must be finite")
    if x.min() < 0.0 or x.max() > length:
        raise ValueError("nodes must lie inside [0, length]")
    if np.unique(x).size != x.size:
        raise ValueError("nodes must be distinct")
    n = x.size - 1
    if n >= 1 and np.array_equal(x, chebyshev_nodes(n, length)):
        return _clenshaw_curtis_weights(n, length)
    return _moment_weights(x, length)


@lru_cache(maxsize=32)
def _rule_cached(degree: int, length: float):
    nodes = chebyshev_nodes(degree, length)
    weights = _clenshaw_curtis_weights(degree, length)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def quadrature_rule(degree: int, length: float):
    """Nodes and Clenshaw-Curtis weights of the degree-N rule on [0, length].

    Cached; repeated requests (normalizing constants, oracles, sweeps)
    return the same read-only arrays.
    """
    return _rule_cached(operator.index(degree), float(length))


def barycentric_interpolate(
    nodes: np.ndarray,
    values: np.ndarray,
    queries,
    weights: np.ndarray | None = None,
):
    """Evaluate the interpolating polynomial through (nodes, values).

    Uses the second barycentric form. A query that coincides with a node
    returns the stored value bit-exactly, with no division by zero.
    Scalar queries give a float, arrays keep their shape.
    """
    x = np.asarray(nodes, dtype=float)
    f = np.asarray(values, dtype=float)
    if f.shape != x.shape:
        raise ValueError("values must match nodes")
    w = barycentric_weights(x) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != x.shape:
        raise ValueError("weights must match nodes")
    q = np.asarray(queries, dtype=float)
    flat = np.atleast_1d(q).ravel()
    diff = flat[:, None] - x[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = w / diff
        out = (ratios @ f) / ratios.sum(axis=1)
    rows, cols = np.nonzero(diff == 0.0)
    out[rows] = f[cols]
    if q.ndim == 0:
        return float(out[0])
    return out.reshape(q.shape)


@dataclass(frozen=True)
class CollocationMesh:
    """Chebyshev collocation mesh on [0, length] for one polynomial degree.

    Bundles the nodes, the spectral differentiation matrix and the
    Clenshaw-Curtis quadrature weights. Instances are immutable (the
    arrays are read-only) and safe to share across threads.
    """

    degree: int
    length: float
    nodes: np.ndarray
    diffmat: np.ndarray
    weights: np.ndarray


def collocation_mesh(degree: int, length: float) -> CollocationMesh:
    """Build the degree-N Chebyshev collocation mesh on [0, length].

    The differentiation matrix comes from the closed-form alternating
    barycentric weights of the extremal points (halved at the ends) with
    the negative-sum diagonal; construction is deterministic, the same
    (degree, length) always yields identical bytes.
    """
    x = chebyshev_nodes(degree, length)
    lam = np.ones(degree + 1)
    lam[1::2] = -1.0
    lam[0] *= 0.5
    lam[-1] *= 0.5
    diffmat = differentiation_matrix(x, weights=lam)
    weights = _clenshaw_curtis_weights(degree, length)
    for arr in (x, diffmat, weights):
        arr.setflags(write=False)
    return CollocationMesh(
        degree=int(degree),
        length=float(length),
        nodes=x,
        diffmat=diffmat,
        weights=weights,
    )
