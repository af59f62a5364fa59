"""Triangle surface meshes: loading, validation, orientation.

A mesh is a flat vertex table plus a triangle index table.  The solver
requires closed, consistently oriented 2-manifolds with outward normals;
``orient`` repairs winding and global sign, ``validate`` reports what it
found without modifying anything.

Supported file formats are OFF and Gmsh ASCII v2.2 (element type 2,
3-node triangles; all other element types are ignored).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

__all__ = ["TriangleMesh", "MeshReport", "load_mesh", "edge_table"]


@dataclass
class TriangleMesh:
    """Indexed triangle surface.

    Attributes
    ----------
    vertices : ndarray, shape (V, 3)
    triangles : ndarray, shape (F, 3)
        Vertex indices; winding defines the facet normal by the right-hand
        rule.
    """

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self) -> None:
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise ValueError("vertices must have shape (V, 3)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise ValueError("triangles must have shape (F, 3)")
        if self.triangles.size and self.triangles.max() >= len(self.vertices):
            raise ValueError("triangle index out of range")
        if self.triangles.size and self.triangles.min() < 0:
            raise ValueError("negative triangle index")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def corners(self) -> np.ndarray:
        """Triangle corner coordinates, shape (F, 3, 3)."""
        return self.vertices[self.triangles]

    def areas(self) -> np.ndarray:
        c = self.corners()
        cross = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
        return 0.5 * np.linalg.norm(cross, axis=1)

    def normals(self) -> np.ndarray:
        """Unit facet normals, shape (F, 3)."""
        c = self.corners()
        cross = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
        norm = np.linalg.norm(cross, axis=1, keepdims=True)
        if np.any(norm <= 0.0):
            raise ValueError("degenerate triangle with zero area")
        return cross / norm

    def centroids(self) -> np.ndarray:
        return self.corners().mean(axis=1)

    def diameters(self) -> np.ndarray:
        """Longest edge per triangle, shape (F,)."""
        c = self.corners()
        e = np.stack(
            [c[:, 1] - c[:, 0], c[:, 2] - c[:, 1], c[:, 0] - c[:, 2]], axis=1
        )
        return np.linalg.norm(e, axis=2).max(axis=1)

    def scale(self) -> float:
        """Bounding box diagonal, used to normalise tolerances."""
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.linalg.norm(span))

    def signed_volume(self) -> float:
        """Divergence-theorem volume; positive for outward-oriented closed surfaces."""
        c = self.corners()
        return float(np.einsum("fi,fi->", np.cross(c[:, 0], c[:, 1]), c[:, 2]) / 6.0)

    def validate(self) -> "MeshReport":
        return _validate(self)

    def oriented(self) -> "TriangleMesh":
        """Return a copy with consistent winding and outward normals.

        Winding is propagated from triangle 0 across shared edges; a final
        global flip enforces positive signed volume.  Requires a closed
        2-manifold (raises ValueError otherwise).
        """
        report = self.validate()
        if not report.is_closed:
            raise ValueError("orientation repair requires a closed surface")

        tris = self.triangles.copy()
        edge_to_tris = _edge_incidence(tris)

        flipped = np.zeros(len(tris), dtype=bool)
        visited = np.zeros(len(tris), dtype=bool)
        stack = [0]
        visited[0] = True
        while stack:
            t = stack.pop()
            for k in range(3):
                a, b = tris[t, k], tris[t, (k + 1) % 3]
                key = (min(a, b), max(a, b))
                for u in edge_to_tris[key]:
                    if u == t or visited[u]:
                        continue
                    # Consistent orientation means the neighbour traverses
                    # the shared edge in the opposite direction.
                    if _traverses(tris[u], a, b):
                        tris[u, [1, 2]] = tris[u, [2, 1]]
                        flipped[u] = True
                    visited[u] = True
                    stack.append(u)
        if not visited.all():
            raise ValueError("surface is not edge-connected; cannot orient")

        out = TriangleMesh(self.vertices.copy(), tris)
        if out.signed_volume() < 0.0:
            out.triangles[:, [1, 2]] = out.triangles[:, [2, 1]]
            flipped = ~flipped
        if flipped.any():
            logger.info("orientation repair flipped %d of %d triangles", int(flipped.sum()), len(tris))
        return out


@dataclass
class MeshReport:
    """Result of :meth:`TriangleMesh.validate`."""

    n_vertices: int
    n_triangles: int
    n_edges: int
    is_closed: bool
    is_oriented: bool
    euler_characteristic: int
    duplicate_vertices: int
    degenerate_triangles: int
    boundary_edges: list = field(default_factory=list)
    nonmanifold_edges: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.is_closed
            and self.is_oriented
            and self.duplicate_vertices == 0
            and self.degenerate_triangles == 0
        )


def _traverses(tri: np.ndarray, a: int, b: int) -> bool:
    """True if the triangle's winding contains the directed edge a -> b."""
    for k in range(3):
        if tri[k] == a and tri[(k + 1) % 3] == b:
            return True
    return False


def _edge_incidence(tris: np.ndarray) -> dict:
    edge_to_tris: dict = {}
    for t, tri in enumerate(tris):
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (min(a, b), max(a, b))
            edge_to_tris.setdefault(key, []).append(t)
    return edge_to_tris


def edge_table(mesh: TriangleMesh) -> dict:
    """Map (low vertex, high vertex) -> list of incident triangle indices."""
    return _edge_incidence(mesh.triangles)


def _validate(mesh: TriangleMesh) -> MeshReport:
    tris = mesh.triangles
    edge_to_tris = _edge_incidence(tris)

    boundary = [e for e, ts in edge_to_tris.items() if len(ts) == 1]
    nonmanifold = [e for e, ts in edge_to_tris.items() if len(ts) > 2]
    is_closed = not boundary and not nonmanifold and len(tris) > 0

    # Oriented: every interior edge is traversed once per direction.
    is_oriented = True
    for (a, b), ts in edge_to_tris.items():
        if len(ts) != 2:
            continue
        t0, t1 = ts
        if _traverses(tris[t0], a, b) == _traverses(tris[t1], a, b):
            is_oriented = False
            break

    # Duplicate vertices within a tolerance tied to the mesh scale.
    scale = mesh.scale() or 1.0
    quant = np.round(mesh.vertices / (1e-12 * scale)).astype(np.int64)
    n_unique = len(np.unique(quant, axis=0))
    duplicates = mesh.n_vertices - n_unique

    degenerate = int(np.count_nonzero(mesh.areas() < 1e-12 * scale * scale))

    V = mesh.n_vertices
    E = len(edge_to_tris)
    F = mesh.n_triangles
    return MeshReport(
        n_vertices=V,
        n_triangles=F,
        n_edges=E,
        is_closed=is_closed,
        is_oriented=is_oriented,
        euler_characteristic=V - E + F,
        duplicate_vertices=duplicates,
        degenerate_triangles=degenerate,
        boundary_edges=boundary[:8],
        nonmanifold_edges=nonmanifold[:8],
    )


def load_mesh(path: str | Path, fmt: str | None = None) -> TriangleMesh:
    """Load a triangle mesh from OFF or Gmsh ASCII v2.2.

    Parameters
    ----------
    path : str or Path
    fmt : {"off", "gmsh22", None}
        File format; None infers from the extension (.off, .msh).

    Returns
    -------
    TriangleMesh
        As stored in the file; call :meth:`TriangleMesh.oriented` before
        building basis functions.
    """
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower()
        if suffix == ".off":
            fmt = "off"
        elif suffix == ".msh":
            fmt = "gmsh22"
        else:
            raise ValueError(f"cannot infer mesh format from suffix {suffix!r}")
    text = path.read_text()
    if fmt == "off":
        mesh = _parse_off(text)
    elif fmt == "gmsh22":
        mesh = _parse_gmsh22(text)
    else:
        raise ValueError(f"unknown mesh format {fmt!r}")
    logger.info("loaded %s: %d vertices, %d triangles", path.name, mesh.n_vertices, mesh.n_triangles)
    return mesh


def _strip_comments(text: str, marker: str) -> list:
    lines = []
    for raw in text.splitlines():
        line = raw.split(marker, 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def _parse_off(text: str) -> TriangleMesh:
    lines = _strip_comments(text, "#")
    if not lines or lines[0].upper() != "OFF":
        raise ValueError("not an OFF file: missing OFF header")
    counts = lines[1].split()
    nv, nf = int(counts[0]), int(counts[1])
    if len(lines) < 2 + nv + nf:
        raise ValueError("truncated OFF file")
    verts = np.array([[float(x) for x in lines[2 + i].split()[:3]] for i in range(nv)])
    tris = []
    for i in range(nf):
        parts = lines[2 + nv + i].split()
        k = int(parts[0])
        if k != 3:
            raise ValueError(f"OFF face {i} has {k} vertices; only triangles are supported")
        tris.append([int(parts[1]), int(parts[2]), int(parts[3])])
    return TriangleMesh(verts, np.array(tris, dtype=np.int64))


def _parse_gmsh22(text: str) -> TriangleMesh:
    lines = text.splitlines()
    i = 0
    n = len(lines)
    version_seen = False
    nodes: dict = {}
    tris = []
    while i < n:
        tag = lines[i].strip()
        if tag == "$MeshFormat":
            parts = lines[i + 1].split()
            if not parts[0].startswith("2."):
                raise ValueError(f"unsupported Gmsh format version {parts[0]}; need ASCII 2.2")
            if parts[1] != "0":
                raise ValueError("binary Gmsh files are not supported")
            version_seen = True
            i += 3  # header line, version line, $EndMeshFormat
        elif tag == "$Nodes":
            count = int(lines[i + 1])
            for j in range(count):
                parts = lines[i + 2 + j].split()
                nodes[int(parts[0])] = [float(parts[1]), float(parts[2]), float(parts[3])]
            i += count + 3
        elif tag == "$Elements":
            count = int(lines[i + 1])
            for j in range(count):
                parts = lines[i + 2 + j].split()
                etype = int(parts[1])
                if etype != 2:  # 3-node triangle
                    continue
                ntags = int(parts[2])
                conn = parts[3 + ntags : 6 + ntags]
                tris.append([int(c) for c in conn])
            i += count + 3
        else:
            i += 1
    if not version_seen:
        raise ValueError("not a Gmsh ASCII v2.2 file: missing $MeshFormat")
    if not nodes:
        raise ValueError("Gmsh file contains no nodes")
    if not tris:
        raise ValueError("Gmsh file contains no triangles (element type 2)")
    # Node ids need not be contiguous; remap to a dense table.
    ids = sorted(nodes)
    remap = {node_id: k for k, node_id in enumerate(ids)}
    verts = np.array([nodes[node_id] for node_id in ids])
    tri_idx = np.array([[remap[a] for a in tri] for tri in tris], dtype=np.int64)
    return TriangleMesh(verts, tri_idx)
