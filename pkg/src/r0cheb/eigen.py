"""Dominant eigenpairs of the collocated operator pencils.

The generalized problem B phi = lambda M phi is reduced to a standard
dense eigenproblem on one of the two similar matrices B M^{-1} (the
discrete next-generation matrix) or M^{-1} B; both share the spectrum
whenever M is invertible and serve as mutual cross-checks. The full
spectrum is computed with the LAPACK nonsymmetric solver (balancing,
Hessenberg reduction, shifted QR) and the spectral radius extracted.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, get_lapack_funcs, lu_factor, lu_solve

from .exceptions import EigensolverError, IllConditionedError
from .operators import OperatorPair
from .spectral import CollocationMesh, barycentric_interpolate, barycentric_weights

__all__ = ["CONDITION_LIMIT", "R0Result", "eigenfunction", "spectral_radius"]

CONDITION_LIMIT = 1e13
_METHODS = ("ngo-product", "m-inverse-left")

_REAL_TOL = 1e-8  # relative imaginary part below which the eigenvalue counts as real
_TIE_TOL = 1e-12  # modulus window within which eigenvalues tie for dominance


@dataclass(frozen=True)
class R0Result:
    """Dominant eigenpair of one collocated problem.

    ``r0`` is the spectral radius. When the dominant eigenvalue is real,
    ``eigvec`` holds the generalized eigenvector over the active nodes,
    normalized to unit maximum entry with positive sign at its largest
    component, and ``residual`` the scaled defect
    ||B phi - r0 M phi||_inf / ||phi||_inf; both are None otherwise.
    """

    r0: float
    eigvec: np.ndarray | None
    residual: float | None
    method: str
    dominant_is_real: bool
    N: int
    active_indices: np.ndarray


def _factorize(mat: np.ndarray):
    """LU-factor M with partial pivoting and estimate its conditioning.

    The rows are equilibrated to unit max-norm first: collocation rows of
    different derivative order differ by powers of the mesh size, and the
    accuracy of a pivoted solve is invariant under row scaling, so the
    meaningful solvability measure is the condition of the equilibrated
    matrix. Returns the LU factors of the scaled matrix together with the
    row scales.
    """
    scale = np.max(np.abs(mat), axis=1)
    if np.any(scale == 0.0) or not np.all(np.isfinite(scale)):
        raise IllConditionedError(
            "transition matrix has a zero or non-finite row", np.inf
        )
    scaled = mat / scale[:, None]
    anorm = np.linalg.norm(scaled, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(scaled, check_finite=False)
    (gecon,) = get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, anorm)
    if info != 0:
        raise IllConditionedError("condition estimation failed", np.inf)
    cond = np.inf if rcond <= 0.0 else 1.0 / float(rcond)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise IllConditionedError(
            f"transition matrix is singular to working precision "
            f"(row-equilibrated 1-norm condition estimate {cond:.3e})",
            cond,
        )
    return (lu, piv), scale


def _normalize(vec: np.ndarray) -> np.ndarray:
    lead = int(np.argmax(np.abs(vec)))
    return vec / vec[lead]


def spectral_radius(pair: OperatorPair, method: str = "ngo-product") -> R0Result:
    """Spectral radius and dominant eigenpair of the pencil (B, M).

    ``method`` selects the similar matrix: "ngo-product" solves
    X M = B for X = B M^{-1} (column-wise via the transposed LU factors)
    and is the default; "m-inverse-left" solves M X = B for X = M^{-1} B
    as an independent cross-check path. All eigenvalues of X are
    computed; the result reports the largest modulus, breaking ties
    within a tiny modulus window towards the largest real part.
    """
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {_METHODS}")
    bmat = np.asarray(pair.B, dtype=float)
    mmat = np.asarray(pair.M, dtype=float)
    if bmat.shape != mmat.shape or bmat.ndim != 2 or bmat.shape[0] != bmat.shape[1]:
        raise ValueError("B and M must be square matrices of equal size")
    if not (np.all(np.isfinite(bmat)) and np.all(np.isfinite(mmat))):
        raise ValueError("B and M must be finite")

    factors, scale = _factorize(mmat)
    if method == "ngo-product":
        # X M = B with M = diag(scale) @ Mtilde: X = (B Mtilde^{-1}) / scale
        product = lu_solve(factors, bmat.T, trans=1, check_finite=False).T / scale[None, :]
    else:
        product = lu_solve(factors, bmat / scale[:, None], trans=0, check_finite=False)

    try:
        eigvals, eigvecs = np.linalg.eig(product)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"dense eigensolver failed to converge: {exc}") from None

    moduli = np.abs(eigvals)
    radius = float(moduli.max())
    ties = np.flatnonzero(moduli >= radius - _TIE_TOL * max(1.0, radius))
    lead = int(ties[np.argmax(eigvals[ties].real)])
    lam = eigvals[lead]
    dominant_is_real = abs(lam.imag) <= _REAL_TOL * (1.0 + abs(lam))

    eigvec = residual = None
    if dominant_is_real:
        raw = eigvecs[:, lead]
        # strip the arbitrary complex phase before taking the real part
        raw = raw / raw[int(np.argmax(np.abs(raw)))]
        phi = raw.real
        if method == "ngo-product":
            # the computed vector is psi = M phi; map back
            phi = lu_solve(factors, phi / scale, check_finite=False)
        eigvec = _normalize(phi)
        defect = bmat @ eigvec - radius * (mmat @ eigvec)
        residual = float(
            np.linalg.norm(defect, np.inf) / np.linalg.norm(eigvec, np.inf)
        )

    return R0Result(
        r0=radius,
        eigvec=eigvec,
        residual=residual,
        method=method,
        dominant_is_real=bool(dominant_is_real),
        N=pair.mesh.degree,
        active_indices=pair.active_indices,
    )


def eigenfunction(
    result: R0Result,
    mesh: CollocationMesh,
    queries,
    anchor: tuple[float, float] | None = None,
):
    """Evaluate the collocation eigenfunction at the query points.

    Reconstructs the polynomial through the eigenvector over the active
    nodes by barycentric interpolation. ``anchor`` = (x0, v0) rescales
    the interpolant so that it takes the value v0 at x0 (e.g. unit value
    at the left endpoint), which fixes the normalization against a known
    reference eigenfunction.
    """
    if result.eigvec is None:
        raise ValueError("no real dominant eigenvector is available for this result")
    if mesh.degree != result.N:
        raise ValueError("mesh degree does not match the result")
    nodes = mesh.nodes[result.active_indices]
    wbar = barycentric_weights(nodes)
    values = barycentric_interpolate(nodes, result.eigvec, queries, weights=wbar)
    if anchor is not None:
        x0, v0 = anchor
        p0 = barycentric_interpolate(nodes, result.eigvec, float(x0), weights=wbar)
        if p0 == 0.0:
            raise ValueError("eigenfunction vanishes at the anchor point")
        values = values * (float(v0) / p0)
    return values
