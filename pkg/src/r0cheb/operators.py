"""Shared containers for discretized operator pencils."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import CollocationMesh

__all__ = ["OperatorPair", "tabulated"]


@dataclass(frozen=True)
class OperatorPair:
    """Dense matrices (B, M) of one collocated model instance.

    B collects the birth/infection terms and is entrywise non-negative;
    M collects transport/transition terms together with the boundary
    condition rows. ``active_indices`` lists the mesh nodes the rows and
    columns correspond to (the epidemic model may drop the last node).
    """

    B: np.ndarray
    M: np.ndarray
    mesh: CollocationMesh
    active_indices: np.ndarray

    @property
    def size(self) -> int:
        return self.B.shape[0]

    @property
    def active_nodes(self) -> np.ndarray:
        return self.mesh.nodes[self.active_indices]


def tabulated(nodes, values):
    """Wrap per-node coefficient samples as a coefficient function.

    The returned callable answers only for the exact node set the table
    was built on; anything else raises. Interpolation is deliberately not
    provided, so tabulated coefficients cannot introduce hidden
    interpolation error: the table must be given at the assembly mesh
    nodes.
    """
    xs = np.array(nodes, dtype=float)
    vs = np.array(values, dtype=float)
    if vs.shape != xs.shape:
        raise ValueError("values must match nodes")
    xs.setflags(write=False)
    vs.setflags(write=False)

    def coefficient(x):
        xq = np.asarray(x, dtype=float)
        if xq.shape == xs.shape and np.array_equal(xq, xs):
            return vs.copy()
        raise ValueError("tabulated coefficient evaluated off its node set")

    return coefficient
