"""Legacy ASCII VTK output for triangle meshes and contour CSV dumps."""

from __future__ import annotations

import numpy as np

from .mesh import TriMesh


def write_vtk(path, mesh: TriMesh, point_data: dict, title: str = "compoflow field"):
    """Write an unstructured-grid snapshot with named point scalars."""
    nv = mesh.num_vertices
    nt = mesh.num_triangles
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"{title}\n")
        fh.write("ASCII\n")
        fh.write("DATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {nv} double\n")
        for x, y in mesh.vertices:
            fh.write(f"{x:.10g} {y:.10g} 0\n")
        fh.write(f"CELLS {nt} {4 * nt}\n")
        for a, b, c in mesh.triangles:
            fh.write(f"3 {a} {b} {c}\n")
        fh.write(f"CELL_TYPES {nt}\n")
        fh.write("5\n" * nt)
        fh.write(f"POINT_DATA {nv}\n")
        for name, values in point_data.items():
            values = np.asarray(values, dtype=float)
            fh.write(f"SCALARS {name} double 1\n")
            fh.write("LOOKUP_TABLE default\n")
            for v in values:
                fh.write(f"{v:.10g}\n")


def write_contour_csv(path, segments):
    """Write zero-contour segments as x0,y0,x1,y1 rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# compoflow contour segments v1\n")
        fh.write("x0,y0,x1,y1\n")
        for (x0, y0), (x1, y1) in segments:
            fh.write(f"{x0:.6g},{y0:.6g},{x1:.6g},{y1:.6g}\n")
