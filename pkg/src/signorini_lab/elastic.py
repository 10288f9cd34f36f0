"""Frictionless elastic Signorini problem and rigid-motion utilities.

div σ(u) = 0 in U = Ω∖Ō, u = f on ∂Ω and, on ∂O with ν the outward normal
of U (pointing into the obstacle): u·ν <= 0, σ_ν <= 0, u_ν σ_ν = 0, σ_τ = 0.

Obstacle-node displacements are written in the local basis (-ν, τ), so the
constraint becomes y = -u·ν >= 0 and the tangential component is free.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .fem import LameField, element_stresses, element_strains, stiffness_elastic
from .geometry import PolygonalSet
from .integrate import boundary_values, cut_geometry, interpolate_p1, recovered_nodal
from .lcp import solve_pdas, solve_pgs
from .measurement import BoundaryMeasurement
from .mesh import BoundaryTag, Mesh, boundary_chain
from .scalar import GaussGreenReport, _report, evaluate_boundary_data, nodal_average

__all__ = [
    "RigidMotion",
    "ElasticSolution",
    "solve_elastic",
    "elastic_energy",
    "recover_traction",
    "fit_rigid_motion",
    "gauss_green_check_elastic",
    "stress_tensors",
    "LameField",
]

TOL_REL = 1e-10


@dataclass(frozen=True)
class RigidMotion:
    """Displacement x -> c + A x with A = [[0, -omega], [omega, 0]]."""

    c: tuple = (0.0, 0.0)
    omega: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in np.asarray(self.c, dtype=float).ravel()))
        object.__setattr__(self, "omega", float(self.omega))
        if len(self.c) != 2:
            raise ValueError("c must be a 2-vector")

    @property
    def A(self) -> np.ndarray:
        return np.array([[0.0, -self.omega], [self.omega, 0.0]])

    @classmethod
    def about(cls, p, omega: float) -> "RigidMotion":
        """Rotation about point p: c = -A p, so the field is A (x - p)."""
        p = np.asarray(p, dtype=float)
        return cls((omega * p[1], -omega * p[0]), omega)

    def __call__(self, x, y=None):
        if y is None:
            pts = np.atleast_2d(np.asarray(x, dtype=float))
            x, y = pts[:, 0], pts[:, 1]
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return np.stack([self.c[0] - self.omega * y, self.c[1] + self.omega * x], axis=-1)

    def norm_c(self) -> float:
        return float(np.hypot(*self.c))


@dataclass(frozen=True, eq=False)
class ElasticSolution:
    u: np.ndarray                 # (n, 2)
    obstacle_nodes: np.ndarray
    normals: np.ndarray           # node normals at obstacle nodes
    active_set: np.ndarray
    reactions: np.ndarray         # (k, 2) nodal reaction forces at obstacle nodes
    pressure: np.ndarray          # ν·R / boundary mass, <= 0
    iterations: int
    residual: float
    scale: float
    solver: str = "pdas"
    history: list = field(default_factory=list)

    @property
    def tol_c(self) -> float:
        return TOL_REL * self.scale

    @property
    def normal_displacement(self) -> np.ndarray:
        return np.einsum("kd,kd->k", self.u[self.obstacle_nodes], self.normals)

    def complementarity_ok(self) -> bool:
        un = self.normal_displacement
        p = self.pressure
        tol = self.tol_c
        return bool(np.all(un <= tol) and np.all(p <= tol) and np.all(np.abs(un * p) <= tol))


def elastic_energy(mesh: Mesh, lame: LameField, u: np.ndarray) -> float:
    """1/2 ∫ σ(u_h):ε(u_h)."""
    K = stiffness_elastic(mesh, lame)
    v = np.asarray(u).reshape(-1)
    return 0.5 * float(v @ (K @ v))


def _rotation(n_nodes: int, obs: np.ndarray, normals: np.ndarray) -> sp.csr_matrix:
    """u = T z, with z = (y, t) at obstacle nodes where u = -y ν + t τ, τ = (-ν_y, ν_x)."""
    keep = np.ones(2 * n_nodes, dtype=bool)
    keep[2 * obs] = keep[2 * obs + 1] = False
    ident = np.nonzero(keep)[0]
    nx, ny = normals[:, 0], normals[:, 1]
    ix, iy = 2 * obs, 2 * obs + 1
    rows = np.concatenate([ident, ix, iy, ix, iy])
    cols = np.concatenate([ident, ix, ix, iy, iy])
    vals = np.concatenate([np.ones(len(ident)), -nx, -ny, -ny, nx])
    return sp.csr_matrix((vals, (rows, cols)), shape=(2 * n_nodes, 2 * n_nodes))


def solve_elastic(mesh: Mesh, lame: LameField, f, solver: str = "pdas", max_iter: int = 50,
                  c: float = 1.0, pgs_omega: float = 1.0) -> ElasticSolution:
    """Solve the discrete frictionless contact problem with u = f on ∂Ω."""
    n = mesh.n_nodes
    K = stiffness_elastic(mesh, lame)
    dn = mesh.nodes_with_tag(BoundaryTag.OUTER, BoundaryTag.GAMMA)
    if len(dn) == 0:
        raise ValueError("mesh has no outer boundary: the problem is singular")
    obs = mesh.nodes_with_tag(BoundaryTag.OBSTACLE)
    nrm = mesh.node_normals[obs]
    g = evaluate_boundary_data(f, mesh.nodes[dn], ncomp=2)
    T = _rotation(n, obs, nrm)
    Kz = (T.T @ K @ T).tocsr()
    ddofs = np.sort(np.concatenate([2 * dn, 2 * dn + 1]))
    gz = np.zeros(2 * n)
    gz[2 * dn] = g[:, 0]
    gz[2 * dn + 1] = g[:, 1]
    is_dir = np.zeros(2 * n, dtype=bool)
    is_dir[ddofs] = True
    free = np.nonzero(~is_dir)[0]
    pos = -np.ones(2 * n, dtype=np.int64)
    pos[free] = np.arange(len(free))
    Kff = Kz[free][:, free]
    b = -(Kz[free][:, ddofs] @ gz[ddofs])
    con = pos[2 * obs]
    if solver == "pdas":
        res = solve_pdas(Kff, b, con, c=c, max_iter=max_iter)
    elif solver == "pgs":
        res = solve_pgs(Kff, b, con, omega=pgs_omega)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    z = gz.copy()
    z[free] = res.x
    u = (T @ z).reshape(n, 2)
    R = (K @ u.reshape(-1)).reshape(n, 2)[obs]
    mass = mesh.boundary_mass(BoundaryTag.OBSTACLE)[obs]
    pressure = np.einsum("kd,kd->k", R, nrm) / mass if len(obs) else np.zeros(0)
    scale = max(1.0, float(np.max(np.abs(g))))
    un = np.einsum("kd,kd->k", u[obs], nrm)
    lam_n = -np.einsum("kd,kd->k", R, nrm)
    residual = float(np.max(np.abs(np.minimum(-un, lam_n)))) if len(obs) else 0.0
    active = obs[res.active] if len(obs) else obs
    return ElasticSolution(u, obs, nrm, active, R, pressure, res.iterations, residual, scale,
                           solver, res.history)


def stress_tensors(mesh: Mesh, u: np.ndarray, lame: LameField) -> np.ndarray:
    """Per-triangle 2x2 stress tensors."""
    s = element_stresses(mesh, u, lame)
    S = np.empty((len(s), 2, 2))
    S[:, 0, 0], S[:, 1, 1] = s[:, 0], s[:, 1]
    S[:, 0, 1] = S[:, 1, 0] = s[:, 2]
    return S


def recover_traction(sol: ElasticSolution, mesh: Mesh, lame: LameField,
                     tag=BoundaryTag.GAMMA) -> BoundaryMeasurement:
    """Traction σ(u)ν along the boundary carrying ``tag``.

    On Γ and the outer boundary: element stresses of the owning triangles,
    nodally averaged, applied to the node normal.  On the obstacle: nodal
    reaction forces divided by the lumped boundary mass.
    """
    tag = BoundaryTag(tag) if not isinstance(tag, str) else BoundaryTag[tag.upper()]
    nodes, arc = boundary_chain(mesh, tag)
    nrm = mesh.node_normals[nodes]
    if tag == BoundaryTag.OBSTACLE:
        m = mesh.boundary_mass(BoundaryTag.OBSTACLE)
        R = np.zeros((mesh.n_nodes, 2))
        R[sol.obstacle_nodes] = sol.reactions
        t = R[nodes] / m[nodes, None]
    else:
        S = nodal_average(mesh, tag, stress_tensors(mesh, sol.u, lame))
        t = np.einsum("kij,kj->ki", S[nodes], nrm)
    tau = np.column_stack([-nrm[:, 1], nrm[:, 0]])
    return BoundaryMeasurement(arc, t, "traction", tag.name, nodes=nodes,
                               normal=np.einsum("kd,kd->k", t, nrm),
                               tangential=np.einsum("kd,kd->k", t, tau), h=mesh.h)


def fit_rigid_motion(u: np.ndarray, mesh: Mesh | np.ndarray, nodes=None):
    """Least-squares rigid motion c + A x matching nodal displacements.

    ``mesh`` may be a Mesh or an (n, 2) coordinate array.  Returns the
    RigidMotion and the maximum nodal deviation from it.
    """
    X = mesh.nodes if isinstance(mesh, Mesh) else np.asarray(mesh, dtype=float)
    U = np.asarray(u, dtype=float).reshape(-1, 2)
    if nodes is not None:
        X, U = X[nodes], U[nodes]
    if len(X) < 3:
        raise ValueError("a rigid-motion fit needs at least 3 non-collinear nodes")
    xm = X.mean(axis=0)
    Y = X - xm
    sv = np.linalg.svd(Y, compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1e-300):
        raise ValueError("a rigid-motion fit needs at least 3 non-collinear nodes")
    um = U.mean(axis=0)
    W = U - um
    omega = float(np.sum(Y[:, 0] * W[:, 1] - Y[:, 1] * W[:, 0]) / np.sum(Y * Y))
    c = um - np.array([-omega * xm[1], omega * xm[0]])
    rm = RigidMotion(c, omega)
    residual = float(np.max(np.linalg.norm(U - rm(X), axis=1)))
    return rm, residual


def boundary_nodal_traction(sol: ElasticSolution, mesh: Mesh, lame: LameField) -> np.ndarray:
    """Recovered traction at every boundary node (NaN in the interior)."""
    t = np.full((mesh.n_nodes, 2), np.nan)
    for tag in BoundaryTag:
        if np.any(mesh.boundary_tags == int(tag)):
            meas = recover_traction(sol, mesh, lame, tag)
            t[meas.nodes] = meas.values
    return t


def gauss_green_check_elastic(sol: ElasticSolution, V: PolygonalSet, mesh: Mesh,
                              lame: LameField) -> GaussGreenReport:
    """Compare ∫_{∂V} σ(u)ν·u ds with ∫_V σ(u):ε(u) dx for the discrete solution."""
    cut = cut_geometry(mesh, V)
    S = stress_tensors(mesh, sol.u, lame)
    s = element_stresses(mesh, sol.u, lame)
    e = element_strains(mesh, sol.u)
    Sn = recovered_nodal(mesh, S)
    ub = interpolate_p1(mesh, cut.boundary_tri, cut.boundary_mid, sol.u)
    Sb = interpolate_p1(mesh, cut.boundary_tri, cut.boundary_mid, Sn.reshape(-1, 4)).reshape(-1, 2, 2)
    tb = boundary_values(mesh, cut, boundary_nodal_traction(sol, mesh, lame),
                         np.einsum("kij,kj->ki", Sb, cut.boundary_normal))
    brec = cut.boundary_len * np.einsum("kd,kd->k", tb, ub)
    braw = cut.boundary_len * np.einsum("kij,kj,ki->k", S[cut.boundary_tri], cut.boundary_normal, ub)
    # engineering shear: σ:ε = s_xx e_xx + s_yy e_yy + s_xy γ_xy
    vterms = cut.area * np.einsum("mi,mi->m", s, e)
    ui = interpolate_p1(mesh, cut.interior_left, cut.interior_mid, sol.u)
    jump = np.einsum("kij,kj->ki", S[cut.interior_right] - S[cut.interior_left], cut.interior_normal)
    dterms = cut.interior_len * np.einsum("kd,kd->k", jump, ui)
    return _report(brec, braw, vterms, dterms, cut.v_area)
