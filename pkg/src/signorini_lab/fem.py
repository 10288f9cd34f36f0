"""P1 finite-element assembly on a Mesh.

Displacement degrees of freedom are interleaved: node i owns (2i, 2i+1).
Strains use engineering shear, so the 2D isotropic material matrix is
``[[2mu+lam, lam, 0], [lam, 2mu+lam, 0], [0, 0, mu]]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh

__all__ = [
    "p1_gradients",
    "element_gradients",
    "stiffness_scalar",
    "LameField",
    "strain_displacement",
    "stiffness_elastic",
    "element_strains",
    "element_stresses",
]


def p1_gradients(nodes: np.ndarray, triangles: np.ndarray):
    """Areas (m,) and constant basis gradients (m, 3, 2) of P1 hat functions."""
    p = nodes[triangles]
    x, y = p[:, :, 0], p[:, :, 1]
    # gradient of basis k is (y_{k+1}-y_{k+2}, x_{k+2}-x_{k+1}) / 2A
    b = np.roll(y, -1, axis=1) - np.roll(y, -2, axis=1)
    c = np.roll(x, -2, axis=1) - np.roll(x, -1, axis=1)
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    grads = np.stack([b, c], axis=2) / (2.0 * area)[:, None, None]
    return area, grads


def element_gradients(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """Constant gradient of the P1 interpolant of nodal values ``u`` per triangle."""
    _, g = p1_gradients(mesh.nodes, mesh.triangles)
    return np.einsum("mk,mkd->md", u[mesh.triangles], g)


def stiffness_scalar(mesh: Mesh) -> sp.csr_matrix:
    area, g = p1_gradients(mesh.nodes, mesh.triangles)
    Ke = area[:, None, None] * np.einsum("mid,mjd->mij", g, g)
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = mesh.n_nodes
    return sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()


@dataclass(frozen=True, eq=False)
class LameField:
    """Piecewise-constant Lame parameters, one value per triangle."""

    mu: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if mu.shape != lam.shape or mu.ndim != 1:
            raise ValueError("mu and lambda must be per-triangle arrays of equal length")
        if not (np.all(mu > 0) and np.all(lam > 0)):
            raise ValueError("Lame parameters must be positive on every triangle")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "lam", lam)

    @classmethod
    def constant(cls, mesh: Mesh, mu: float = 1.0, lam: float = 1.0) -> "LameField":
        m = mesh.n_triangles
        return cls(np.full(m, float(mu)), np.full(m, float(lam)))

    @classmethod
    def from_functions(cls, mesh: Mesh, mu, lam) -> "LameField":
        """Sample callables (or constants) of (x, y) at triangle centroids."""
        c = mesh.nodes[mesh.triangles].mean(axis=1)

        def sample(f):
            v = f(c[:, 0], c[:, 1]) if callable(f) else f
            return np.broadcast_to(np.asarray(v, dtype=float), (len(c),)).copy()

        return cls(sample(mu), sample(lam))

    def matrices(self) -> np.ndarray:
        m = len(self.mu)
        D = np.zeros((m, 3, 3))
        D[:, 0, 0] = D[:, 1, 1] = 2 * self.mu + self.lam
        D[:, 0, 1] = D[:, 1, 0] = self.lam
        D[:, 2, 2] = self.mu
        return D


def strain_displacement(mesh: Mesh):
    """Areas and B matrices (m, 3, 6) mapping element DOFs to (e_xx, e_yy, 2e_xy)."""
    area, g = p1_gradients(mesh.nodes, mesh.triangles)
    m = len(area)
    B = np.zeros((m, 3, 6))
    B[:, 0, 0::2] = g[:, :, 0]
    B[:, 1, 1::2] = g[:, :, 1]
    B[:, 2, 0::2] = g[:, :, 1]
    B[:, 2, 1::2] = g[:, :, 0]
    return area, B


def _element_dofs(mesh: Mesh) -> np.ndarray:
    t = mesh.triangles
    dofs = np.empty((len(t), 6), dtype=np.int64)
    dofs[:, 0::2] = 2 * t
    dofs[:, 1::2] = 2 * t + 1
    return dofs


def stiffness_elastic(mesh: Mesh, lame: LameField) -> sp.csr_matrix:
    area, B = strain_displacement(mesh)
    D = lame.matrices()
    Ke = area[:, None, None] * np.einsum("mki,mkl,mlj->mij", B, D, B)
    dofs = _element_dofs(mesh)
    rows = np.repeat(dofs, 6, axis=1).ravel()
    cols = np.tile(dofs, (1, 6)).ravel()
    n = 2 * mesh.n_nodes
    return sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def element_strains(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """(e_xx, e_yy, 2e_xy) per triangle for nodal displacements u of shape (n, 2)."""
    _, B = strain_displacement(mesh)
    ue = np.asarray(u).reshape(-1)[_element_dofs(mesh)]
    return np.einsum("mij,mj->mi", B, ue)


def element_stresses(mesh: Mesh, u: np.ndarray, lame: LameField) -> np.ndarray:
    """(s_xx, s_yy, s_xy) per triangle."""
    return np.einsum("mij,mj->mi", lame.matrices(), element_strains(mesh, u))
