"""SUPG-stabilized P1 level-set advection on the unit square."""

from .mesh import TriMesh, FemSpace, build_structured_mesh
from .fields import (
    VelocityField,
    signed_distance_circle,
    vortex_velocity,
    zalesak_setup,
)
from .assembly import FemOperators, assemble_operators, supg_tau
from .stepping import (
    LevelSetState,
    OperatorCache,
    BackwardEulerFemFlow,
    HeunFemFlow,
    be1_fem_step,
    hm1_fem_step,
)
from .measures import (
    l2_error,
    interface_measures,
    contour_length,
    evaluate_structured,
    region_symmetric_difference,
)
from .vtkio import write_vtk, write_contour_csv

__all__ = [
    "TriMesh",
    "FemSpace",
    "build_structured_mesh",
    "VelocityField",
    "signed_distance_circle",
    "vortex_velocity",
    "zalesak_setup",
    "FemOperators",
    "assemble_operators",
    "supg_tau",
    "LevelSetState",
    "OperatorCache",
    "BackwardEulerFemFlow",
    "HeunFemFlow",
    "be1_fem_step",
    "hm1_fem_step",
    "l2_error",
    "interface_measures",
    "contour_length",
    "evaluate_structured",
    "region_symmetric_difference",
    "write_vtk",
    "write_contour_csv",
]
