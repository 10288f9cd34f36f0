"""Closed-form reference for the concentric annulus with constant data."""
from __future__ import annotations

import math

import numpy as np

from .fem import p1_gradients
from .mesh import Mesh

__all__ = ["radial_solution", "relative_l2_error", "l2_norm"]


def radial_solution(pts: np.ndarray, r0: float, R: float, f: float):
    """Exact u and obstacle flux for u = f on |x| = R around a disk of radius r0.

    For f >= 0 the constraint is inactive and u = f.  For f < 0 the whole
    obstacle is in contact: u = f ln(r/r0) / ln(R/r0), with flux
    ∂_ν u = -f / (r0 ln(R/r0)) on |x| = r0 (ν pointing toward the center).
    Points are given relative to the common center.
    """
    r = np.linalg.norm(np.asarray(pts, dtype=float), axis=1)
    if f >= 0:
        return np.full(len(r), float(f)), 0.0
    L = math.log(R / r0)
    return f * np.log(r / r0) / L, -f / (r0 * L)


def l2_norm(mesh: Mesh, v: np.ndarray) -> float:
    """Exact L2 norm of the P1 interpolant of nodal values v."""
    area, _ = p1_gradients(mesh.nodes, mesh.triangles)
    vt = np.asarray(v)[mesh.triangles]
    return float(np.sqrt(np.sum(area / 12.0 * ((vt**2).sum(1) + vt.sum(1) ** 2))))


def relative_l2_error(mesh: Mesh, u: np.ndarray, exact: np.ndarray) -> float:
    return l2_norm(mesh, u - exact) / l2_norm(mesh, exact)
