"""Rao-Wilton-Glisson basis functions on closed triangle meshes.

Each interior edge carries one divergence-conforming basis function

    beta_n(r) = +l_n / (2 A+) (r - p+)   on the plus triangle,
    beta_n(r) = -l_n / (2 A-) (r - p-)   on the minus triangle,

with l_n the edge length, A+- the triangle areas and p+- the vertices
opposite the edge.  The component normal to the shared edge equals one on
both sides, so the expansion carries no line charge; the surface
divergence is +-l_n / A+- per triangle.

For an edge (a, b) with a < b, the plus triangle is the one whose winding
traverses a -> b.  On a consistently oriented closed mesh this picks
exactly one triangle per side, making coefficient signs reproducible
across runs and file formats.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .mesh import TriangleMesh, edge_table

logger = logging.getLogger(__name__)

__all__ = ["RwgSpace", "build_space", "rwg_eval"]


@dataclass
class RwgSpace:
    """RWG function space on a closed oriented mesh.

    Attributes
    ----------
    mesh : TriangleMesh
    edges : ndarray, shape (N, 2)
        Edge vertex indices, low index first.
    lengths : ndarray, shape (N,)
    tri_plus, tri_minus : ndarray, shape (N,)
        Triangle indices on either side of each edge.
    free_plus, free_minus : ndarray, shape (N,)
        Vertex index opposite the edge in the plus and minus triangle.
    tri_edges : ndarray, shape (F, 3)
        Global edge index for each local slot; slot i is the edge opposite
        local vertex i.
    tri_signs : ndarray, shape (F, 3)
        +1 where the triangle is the plus side of the slot's edge.
    tri_free : ndarray, shape (F, 3)
        Free vertex index per slot (equals the triangle's local vertex i).
    """

    mesh: TriangleMesh
    edges: np.ndarray
    lengths: np.ndarray
    tri_plus: np.ndarray
    tri_minus: np.ndarray
    free_plus: np.ndarray
    free_minus: np.ndarray
    tri_edges: np.ndarray
    tri_signs: np.ndarray
    tri_free: np.ndarray

    @property
    def n_functions(self) -> int:
        return len(self.edges)

    def coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-slot vector factor and divergence.

        Returns
        -------
        coeff : ndarray, shape (F, 3)
            sign * l / (2 A); beta on slot (f, i) is coeff * (r - p).
        div : ndarray, shape (F, 3)
            Surface divergence sign * l / A.
        """
        areas = self.mesh.areas()
        ell = self.lengths[self.tri_edges]
        coeff = self.tri_signs * ell / (2.0 * areas[:, None])
        return coeff, 2.0 * coeff


def build_space(mesh: TriangleMesh) -> RwgSpace:
    """Build the RWG space; the mesh must be closed and oriented.

    Raises
    ------
    ValueError
        If any edge is not shared by exactly two triangles, or the
        winding is inconsistent (run :meth:`TriangleMesh.oriented` first).
    """
    report = mesh.validate()
    if not report.is_closed:
        bad = report.boundary_edges or report.nonmanifold_edges
        raise ValueError(f"mesh is not a closed 2-manifold; offending edge(s): {bad}")
    if not report.is_oriented:
        raise ValueError("mesh winding is inconsistent; call TriangleMesh.oriented() first")
    if report.degenerate_triangles:
        raise ValueError(f"{report.degenerate_triangles} degenerate triangle(s)")

    tris = mesh.triangles
    incidence = edge_table(mesh)
    edges = sorted(incidence)
    index = {e: i for i, e in enumerate(edges)}
    N = len(edges)

    edges_arr = np.array(edges, dtype=np.int64)
    tri_plus = np.full(N, -1, dtype=np.int64)
    tri_minus = np.full(N, -1, dtype=np.int64)
    free_plus = np.full(N, -1, dtype=np.int64)
    free_minus = np.full(N, -1, dtype=np.int64)

    F = len(tris)
    tri_edges = np.zeros((F, 3), dtype=np.int64)
    tri_signs = np.zeros((F, 3), dtype=np.int64)
    tri_free = np.zeros((F, 3), dtype=np.int64)

    for t in range(F):
        for i in range(3):
            # slot i: edge opposite vertex i, traversed (i+1) -> (i+2)
            a, b = int(tris[t, (i + 1) % 3]), int(tris[t, (i + 2) % 3])
            key = (min(a, b), max(a, b))
            n = index[key]
            plus = a == key[0]  # winding traverses low -> high
            tri_edges[t, i] = n
            tri_signs[t, i] = 1 if plus else -1
            tri_free[t, i] = tris[t, i]
            if plus:
                tri_plus[n] = t
                free_plus[n] = tris[t, i]
            else:
                tri_minus[n] = t
                free_minus[n] = tris[t, i]

    if np.any(tri_plus < 0) or np.any(tri_minus < 0):
        raise ValueError("mesh winding is inconsistent; call TriangleMesh.oriented() first")

    lengths = np.linalg.norm(
        mesh.vertices[edges_arr[:, 0]] - mesh.vertices[edges_arr[:, 1]], axis=1
    )
    logger.info("RWG space: %d functions on %d triangles", N, F)
    return RwgSpace(
        mesh=mesh,
        edges=edges_arr,
        lengths=lengths,
        tri_plus=tri_plus,
        tri_minus=tri_minus,
        free_plus=free_plus,
        free_minus=free_minus,
        tri_edges=tri_edges,
        tri_signs=tri_signs,
        tri_free=tri_free,
    )


def rwg_eval(space: RwgSpace, triangle: int, points: np.ndarray):
    """Evaluate the three basis functions living on one triangle.

    Parameters
    ----------
    space : RwgSpace
    triangle : int
    points : ndarray, shape (P, 3)
        Evaluation points, assumed to lie on the triangle.

    Returns
    -------
    edge_index : ndarray, shape (3,)
        Global edge indices of the local slots.
    values : ndarray, shape (3, P, 3)
        Basis vectors at the points.
    div : ndarray, shape (3,)
        Surface divergence of each slot (constant per triangle).
    """
    points = np.atleast_2d(points)
    coeff, div = space.coefficients()
    free = space.mesh.vertices[space.tri_free[triangle]]  # (3, 3)
    values = coeff[triangle][:, None, None] * (points[None, :, :] - free[:, None, :])
    return space.tri_edges[triangle], values, div[triangle]
