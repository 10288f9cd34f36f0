"""Signorini obstacle problems on polygonal domains: geometry, meshing,
scalar and elastic contact solvers, and inverse-problem experiments."""

__version__ = "0.1.0"

from .geometry import PolygonalSet, Provenance, boolean_ops, circle, compute_G0, compute_V, polygon  # noqa: E402
from .mesh import BoundaryTag, Mesh, refine, triangulate  # noqa: E402
from .scalar import recover_flux, solve_scalar  # noqa: E402
from .elastic import LameField, RigidMotion, fit_rigid_motion, recover_traction, solve_elastic  # noqa: E402
from .scene import Scene, load_scene  # noqa: E402
from .inverse import ExperimentConfig, Verdict, distinguishability, reconstruct  # noqa: E402

__all__ = [
    "__version__", "PolygonalSet", "Provenance", "boolean_ops", "circle", "polygon", "compute_G0",
    "compute_V", "BoundaryTag", "Mesh", "triangulate", "refine", "solve_scalar", "recover_flux",
    "LameField", "RigidMotion", "solve_elastic", "recover_traction", "fit_rigid_motion", "Scene",
    "load_scene", "ExperimentConfig", "Verdict", "distinguishability", "reconstruct",
]
