"""Hybridizable discontinuous Galerkin solver for coupled Stokes-Darcy flow."""
from .mesh import FaceClass, Mesh2D, Region, build_structured_mesh, load_mesh
from .forms import MeshGeometry, PhysicalParams
from .assembly import BlockSystem, DofMap, ProblemData, assemble, build_dof_map, compatibility_check

__version__ = "0.1.0"

__all__ = [
    "FaceClass", "Mesh2D", "Region", "build_structured_mesh", "load_mesh",
    "MeshGeometry", "PhysicalParams",
    "BlockSystem", "DofMap", "ProblemData", "assemble", "build_dof_map", "compatibility_check",
]
