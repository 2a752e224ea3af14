"""Structured triangulations of the unit square and the P1 Lagrange space."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class TriMesh:
    """Conforming triangle mesh with counter-clockwise elements."""

    vertices: np.ndarray  # (nv, 2)
    triangles: np.ndarray  # (nt, 3) int
    h: float
    boundary: frozenset  # boundary vertex indices
    structured_n: int | None = None  # subdivisions per side, if grid-built

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    def element_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def element_diameters(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e0 = np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
        e1 = np.linalg.norm(p[:, 2] - p[:, 1], axis=1)
        e2 = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
        return np.maximum(e0, np.maximum(e1, e2))


def build_structured_mesh(n: int) -> TriMesh:
    """Uniform (n+1)^2 grid on [0,1]^2, each cell split along one diagonal."""
    if n < 1:
        raise DomainError(f"need at least one subdivision per side, got {n}")
    coords = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(coords, coords, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    tris = []
    for j in range(n):
        for i in range(n):
            v00 = vid(i, j)
            v10 = vid(i + 1, j)
            v01 = vid(i, j + 1)
            v11 = vid(i + 1, j + 1)
            # fixed diagonal v00-v11, both triangles counter-clockwise
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    triangles = np.array(tris, dtype=np.int64)

    boundary = set()
    for k in range(n + 1):
        boundary.update({vid(k, 0), vid(k, n), vid(0, k), vid(n, k)})

    return TriMesh(
        vertices=vertices,
        triangles=triangles,
        h=math.sqrt(2.0) / n,
        boundary=frozenset(boundary),
        structured_n=n,
    )


@dataclass(frozen=True)
class FemSpace:
    """Continuous Lagrange space on a triangle mesh; only degree 1 is wired."""

    mesh: TriMesh
    degree: int = 1

    def __post_init__(self):
        if self.degree != 1:
            raise DomainError("only P1 Lagrange elements are supported")

    @property
    def num_dofs(self) -> int:
        return self.mesh.num_vertices

    @property
    def dof_coordinates(self) -> np.ndarray:
        return self.mesh.vertices

    def interpolate(self, func) -> np.ndarray:
        """Nodal interpolant of a callable on (n, 2) point arrays."""
        return np.asarray(func(self.dof_coordinates), dtype=float)
