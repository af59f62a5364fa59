"""Programmatic test geometries.

All builders return closed, consistently oriented meshes with outward
normals.  Sizes default to a unit wavelength, so a feature of 0.2 here is
0.2 wavelengths when the solver runs at k0 = 2 pi.
"""

from __future__ import annotations

import numpy as np

from .mesh import TriangleMesh

__all__ = ["cube", "icosphere", "wedge", "pyramid", "open_plate"]


class _VertexPool:
    """Deduplicating vertex table keyed on rounded coordinates."""

    def __init__(self, decimals: int = 9):
        self.decimals = decimals
        self._index: dict = {}
        self.vertices: list = []

    def add(self, p) -> int:
        key = tuple(np.round(np.asarray(p, dtype=float), self.decimals))
        if key not in self._index:
            self._index[key] = len(self.vertices)
            self.vertices.append(np.asarray(p, dtype=float))
        return self._index[key]


def _mesh_from(pool: _VertexPool, tris: list) -> TriangleMesh:
    mesh = TriangleMesh(np.array(pool.vertices), np.array(tris, dtype=np.int64))
    return mesh.oriented()


def _grid_quad(pool, tris, corner, e1, e2, n1, n2, crossed=False):
    """Tile the parallelogram corner + [0,1]e1 + [0,1]e2 with triangles.

    Plain splitting yields 2 triangles per cell, crossed splitting adds a
    cell-centre vertex and yields 4.
    """
    corner = np.asarray(corner, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    for i in range(n1):
        for j in range(n2):
            p00 = corner + e1 * (i / n1) + e2 * (j / n2)
            p10 = corner + e1 * ((i + 1) / n1) + e2 * (j / n2)
            p01 = corner + e1 * (i / n1) + e2 * ((j + 1) / n2)
            p11 = corner + e1 * ((i + 1) / n1) + e2 * ((j + 1) / n2)
            a, b, c, d = (pool.add(p) for p in (p00, p10, p11, p01))
            if crossed:
                m = pool.add((p00 + p11) / 2.0)
                tris += [[a, b, m], [b, c, m], [c, d, m], [d, a, m]]
            else:
                tris += [[a, b, c], [a, c, d]]


def _grid_triangle(pool, tris, v0, v1, v2, n):
    """Split the triangle (v0, v1, v2) into n**2 congruent sub-triangles."""
    v0 = np.asarray(v0, dtype=float)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)

    def point(i, j):
        # barycentric lattice: i steps towards v1, j towards v2
        return v0 + (v1 - v0) * (i / n) + (v2 - v0) * (j / n)

    for i in range(n):
        for j in range(n - i):
            a = pool.add(point(i, j))
            b = pool.add(point(i + 1, j))
            c = pool.add(point(i, j + 1))
            tris.append([a, b, c])
            if i + j < n - 1:
                d = pool.add(point(i + 1, j + 1))
                tris.append([b, d, c])


def cube(edge: float = 1.0, refine: int = 1) -> TriangleMesh:
    """Axis-aligned cube centred at the origin; 12 * refine**2 triangles."""
    if refine < 1:
        raise ValueError("refine must be >= 1")
    h = edge / 2.0
    pool = _VertexPool()
    tris: list = []
    # (corner, e1, e2) per face, chosen so e1 x e2 points outward
    faces = [
        ([-h, -h, -h], [0, edge, 0], [edge, 0, 0]),  # z = -h
        ([-h, -h, +h], [edge, 0, 0], [0, edge, 0]),  # z = +h
        ([-h, -h, -h], [edge, 0, 0], [0, 0, edge]),  # y = -h
        ([-h, +h, -h], [0, 0, edge], [edge, 0, 0]),  # y = +h
        ([-h, -h, -h], [0, 0, edge], [0, edge, 0]),  # x = -h
        ([+h, -h, -h], [0, edge, 0], [0, 0, edge]),  # x = +h
    ]
    for corner, e1, e2 in faces:
        _grid_quad(pool, tris, corner, e1, e2, refine, refine)
    return _mesh_from(pool, tris)


def icosphere(radius: float = 1.0, frequency: int = 3) -> TriangleMesh:
    """Geodesic sphere: icosahedron faces split into frequency**2 triangles.

    Triangle count is 20 * frequency**2; basis function count is
    30 * frequency**2.  Vertices lie exactly on the sphere, so the faceted
    surface is inscribed.
    """
    if frequency < 1:
        raise ValueError("frequency must be >= 1")
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    base = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=float,
    )
    base /= np.linalg.norm(base[0])
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    # Lattice points are keyed on exact integer barycentric weights so that
    # points shared across icosahedron faces dedupe without any floating
    # point tolerance.
    f = frequency
    index: dict = {}
    verts: list = []

    def lattice(face, a, b, c) -> int:
        key = tuple(sorted((int(v), w) for v, w in zip(face, (a, b, c)) if w > 0))
        if key not in index:
            index[key] = len(verts)
            p = (a * base[face[0]] + b * base[face[1]] + c * base[face[2]]) / f
            verts.append(p)
        return index[key]

    tris: list = []
    for face in faces:
        for i in range(f):
            for j in range(f - i):
                p0 = lattice(face, f - i - j, i, j)
                p1 = lattice(face, f - i - j - 1, i + 1, j)
                p2 = lattice(face, f - i - j - 1, i, j + 1)
                tris.append([p0, p1, p2])
                if i + j < f - 1:
                    p3 = lattice(face, f - i - j - 2, i + 1, j + 1)
                    tris.append([p1, p3, p2])
    out = np.array(verts)
    out *= radius / np.linalg.norm(out, axis=1, keepdims=True)
    mesh = TriangleMesh(out, np.array(tris, dtype=np.int64))
    return mesh.oriented()


def wedge(
    width: float = 0.2,
    height: float = 0.2,
    depth: float = 0.06,
) -> TriangleMesh:
    """Wedge: right-triangle cross-section extruded along z.

    Cross-section legs are ``width`` (x) and ``height`` (y) with the right
    angle at the origin; the extrusion depth is ``depth``.  The default
    subdivision (caps 2x2, walls 2x2 cells, hypotenuse wall crossed)
    yields exactly 40 triangles and 60 basis functions.
    """
    W, H, D = width, height, depth
    pool = _VertexPool()
    tris: list = []
    # caps (2 x 4 triangles)
    _grid_triangle(pool, tris, [0, 0, 0], [W, 0, 0], [0, H, 0], 2)
    _grid_triangle(pool, tris, [0, 0, D], [W, 0, D], [0, H, D], 2)
    # leg walls (2 x 8)
    _grid_quad(pool, tris, [0, 0, 0], [W, 0, 0], [0, 0, D], 2, 2)
    _grid_quad(pool, tris, [0, 0, 0], [0, H, 0], [0, 0, D], 2, 2)
    # hypotenuse wall, crossed split (16)
    _grid_quad(pool, tris, [W, 0, 0], [-W, H, 0], [0, 0, D], 2, 2, crossed=True)
    return _mesh_from(pool, tris)


def pyramid(base: float = 0.135, height: float = 0.19) -> TriangleMesh:
    """Square-based pyramid, apex on +z.

    The base square is split on a 2x2 grid (8 triangles) and each slanted
    face at its edge midpoints (4 x 4 triangles), giving 24 triangles and
    36 basis functions.
    """
    b = base / 2.0
    apex = np.array([0.0, 0.0, height])
    corners = [
        np.array([-b, -b, 0.0]),
        np.array([+b, -b, 0.0]),
        np.array([+b, +b, 0.0]),
        np.array([-b, +b, 0.0]),
    ]
    pool = _VertexPool()
    tris: list = []
    _grid_quad(pool, tris, corners[0], corners[1] - corners[0], corners[3] - corners[0], 2, 2)
    for i in range(4):
        _grid_triangle(pool, tris, corners[i], corners[(i + 1) % 4], apex, 2)
    return _mesh_from(pool, tris)


def open_plate(side: float = 1.0, refine: int = 2) -> TriangleMesh:
    """Flat square plate; intentionally not closed (for negative tests)."""
    pool = _VertexPool()
    tris: list = []
    _grid_quad(pool, tris, [-side / 2, -side / 2, 0], [side, 0, 0], [0, side, 0], refine, refine)
    return TriangleMesh(np.array(pool.vertices), np.array(tris, dtype=np.int64))
