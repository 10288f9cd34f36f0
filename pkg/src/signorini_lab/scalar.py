"""Scalar Signorini (thin obstacle) problem.

Find u harmonic in U = Ω∖Ō with u = f on ∂Ω and, on ∂O,
u >= 0, ∂_ν u >= 0, u ∂_ν u = 0, where ν is the outward normal of U.
Discretized with P1 elements and nodal constraints u_i >= 0 on obstacle nodes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .fem import element_gradients, stiffness_scalar
from .geometry import PolygonalSet
from .integrate import boundary_values, cut_geometry, interpolate_p1, recovered_nodal
from .lcp import ConvergenceError, solve_pdas, solve_pgs
from .measurement import BoundaryMeasurement
from .mesh import BoundaryTag, Mesh, boundary_chain

__all__ = [
    "ScalarSolution",
    "solve_scalar",
    "scalar_energy",
    "recover_flux",
    "GaussGreenReport",
    "gauss_green_check_scalar",
    "evaluate_boundary_data",
    "ConvergenceError",
]

TOL_REL = 1e-10


@dataclass(frozen=True, eq=False)
class ScalarSolution:
    u: np.ndarray
    obstacle_nodes: np.ndarray
    active_set: np.ndarray
    reactions: np.ndarray
    iterations: int
    residual: float
    scale: float
    solver: str = "pdas"
    history: list = field(default_factory=list)

    @property
    def tol_c(self) -> float:
        return TOL_REL * self.scale

    def complementarity_ok(self) -> bool:
        uo = self.u[self.obstacle_nodes]
        lam = self.reactions
        tol = self.tol_c
        return bool(np.all(uo >= -tol) and np.all(lam >= -tol) and np.all(np.abs(uo * lam) <= tol))


def evaluate_boundary_data(f, pts: np.ndarray, ncomp: int = 1) -> np.ndarray:
    """Evaluate a constant, callable f(x, y) or expression object at points."""
    if callable(f):
        v = f(pts[:, 0], pts[:, 1])
    else:
        v = f
    v = np.asarray(v, dtype=float)
    shape = (len(pts),) if ncomp == 1 else (len(pts), ncomp)
    if ncomp > 1 and v.ndim == 2 and v.shape[0] == ncomp and v.shape[1] == len(pts) and v.shape != shape:
        v = v.T
    v = np.broadcast_to(v, shape).copy()
    if not np.all(np.isfinite(v)):
        raise ValueError("boundary data is not finite on every boundary node")
    return v


def scalar_energy(mesh: Mesh, u: np.ndarray) -> float:
    """Discrete Dirichlet energy 1/2 ∫|∇u_h|²."""
    K = stiffness_scalar(mesh)
    return 0.5 * float(u @ (K @ u))


def solve_scalar(mesh: Mesh, f, solver: str = "pdas", max_iter: int = 50, c: float = 1.0,
                 pgs_omega: float = 1.0) -> ScalarSolution:
    """Solve the discrete variational inequality on ``mesh`` with u = f on ∂Ω."""
    K = stiffness_scalar(mesh)
    n = mesh.n_nodes
    dn = mesh.nodes_with_tag(BoundaryTag.OUTER, BoundaryTag.GAMMA)
    if len(dn) == 0:
        raise ValueError("mesh has no outer boundary: the problem is singular")
    obs = mesh.nodes_with_tag(BoundaryTag.OBSTACLE)
    g = evaluate_boundary_data(f, mesh.nodes[dn])
    is_dir = np.zeros(n, dtype=bool)
    is_dir[dn] = True
    free = np.nonzero(~is_dir)[0]
    pos = -np.ones(n, dtype=np.int64)
    pos[free] = np.arange(len(free))
    Kff = K[free][:, free]
    b = -(K[free][:, dn] @ g)
    con = pos[obs]
    if solver == "pdas":
        res = solve_pdas(Kff, b, con, c=c, max_iter=max_iter)
    elif solver == "pgs":
        res = solve_pgs(Kff, b, con, omega=pgs_omega)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    u = np.zeros(n)
    u[dn] = g
    u[free] = res.x
    lam = (K @ u)[obs]
    scale = max(1.0, float(np.max(np.abs(g))))
    active = obs[res.active] if len(obs) else obs
    residual = float(np.max(np.abs(np.minimum(u[obs], lam)))) if len(obs) else 0.0
    return ScalarSolution(u, obs, active, lam, res.iterations, residual, scale, solver, res.history)


def _boundary_edge_triangles(mesh: Mesh) -> np.ndarray:
    t = mesh.triangles
    n = mesh.n_nodes
    code = np.concatenate([t[:, k] * n + t[:, (k + 1) % 3] for k in range(3)])
    tri = np.tile(np.arange(len(t)), 3)
    order = np.argsort(code)
    be = mesh.boundary_edges
    return tri[order][np.searchsorted(code[order], be[:, 0] * n + be[:, 1])]


def nodal_average(mesh: Mesh, tag: BoundaryTag, element_values: np.ndarray) -> np.ndarray:
    """Average of per-triangle values over triangles owning tagged boundary edges at each node."""
    mask = mesh.boundary_tags == int(tag)
    owners = _boundary_edge_triangles(mesh)[mask]
    e = mesh.boundary_edges[mask]
    shape = (mesh.n_nodes,) + element_values.shape[1:]
    acc = np.zeros(shape)
    cnt = np.zeros(mesh.n_nodes)
    for k in range(2):
        np.add.at(acc, e[:, k], element_values[owners])
        np.add.at(cnt, e[:, k], 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return acc / cnt.reshape((-1,) + (1,) * (acc.ndim - 1))


def recover_flux(sol: ScalarSolution, mesh: Mesh, tag=BoundaryTag.GAMMA) -> BoundaryMeasurement:
    """Normal derivative ∂_ν u along the boundary carrying ``tag``.

    On the obstacle, the reaction divided by the lumped boundary mass
    (nonnegative at a converged solution).  On Γ and the outer boundary, the
    element gradients of the owning triangles, nodally averaged and dotted
    with the outward node normal.
    """
    tag = BoundaryTag(tag) if not isinstance(tag, str) else BoundaryTag[tag.upper()]
    nodes, arc = boundary_chain(mesh, tag)
    if tag == BoundaryTag.OBSTACLE:
        m = mesh.boundary_mass(BoundaryTag.OBSTACLE)
        lam = np.zeros(mesh.n_nodes)
        lam[sol.obstacle_nodes] = sol.reactions
        vals = lam[nodes] / m[nodes]
    else:
        g = nodal_average(mesh, tag, element_gradients(mesh, sol.u))
        vals = np.einsum("kd,kd->k", g[nodes], mesh.node_normals[nodes])
    return BoundaryMeasurement(arc, vals, "flux", tag.name, nodes=nodes, h=mesh.h)


def boundary_nodal_flux(sol: ScalarSolution, mesh: Mesh) -> np.ndarray:
    """Recovered ∂_ν u at every boundary node (NaN in the interior)."""
    q = np.full(mesh.n_nodes, np.nan)
    for tag in BoundaryTag:
        if np.any(mesh.boundary_tags == int(tag)):
            meas = recover_flux(sol, mesh, tag)
            q[meas.nodes] = meas.values
    return q


@dataclass(frozen=True)
class GaussGreenReport:
    """Both sides of the Gauss-Green identity on V for a discrete field.

    boundary: ∫_{∂V} of the flux term, using the recovered (continuous)
    gradient inside the mesh and the recovered boundary flux on pieces of ∂V
    lying on the mesh boundary; volume: ∫_V of the energy density.  ``residual`` =
    |boundary - volume| is the consistency error of the identity and tends to
    zero under refinement.

    The exact discrete identity uses the raw element gradients on ∂V
    (``boundary_raw``) and the discrete u Δu (resp. u·div σ) term, which for P1
    fields is concentrated on interior mesh edges as gradient jumps
    (``divergence``).  ``bookkeeping`` = |boundary_raw - volume - divergence|
    vanishes up to roundoff, bounded by ``quadrature_bound``.
    """

    boundary: float
    volume: float
    residual: float
    boundary_raw: float
    divergence: float
    bookkeeping: float
    quadrature_bound: float
    v_area: float


def _report(brec, braw, vterms, dterms, v_area) -> GaussGreenReport:
    B, Braw = float(np.sum(brec)), float(np.sum(braw))
    Vol, D = float(np.sum(vterms)), float(np.sum(dterms))
    mag = float(np.sum(np.abs(braw)) + np.sum(np.abs(vterms)) + np.sum(np.abs(dterms)))
    nterm = max(2, len(braw) + len(vterms) + len(dterms))
    bound = 16 * np.finfo(float).eps * mag * np.log2(nterm)
    return GaussGreenReport(B, Vol, abs(B - Vol), Braw, D, abs(Braw - Vol - D), float(bound), v_area)


def gauss_green_check_scalar(sol: ScalarSolution, V: PolygonalSet, mesh: Mesh) -> GaussGreenReport:
    """Compare ∫_{∂V} u ∇u·ν ds with ∫_V |∇u|² dx for the discrete solution."""
    cut = cut_geometry(mesh, V)
    g = element_gradients(mesh, sol.u)
    G = recovered_nodal(mesh, g)
    ub = interpolate_p1(mesh, cut.boundary_tri, cut.boundary_mid, sol.u)
    gb = interpolate_p1(mesh, cut.boundary_tri, cut.boundary_mid, G)
    qb = boundary_values(mesh, cut, boundary_nodal_flux(sol, mesh),
                         np.einsum("kd,kd->k", gb, cut.boundary_normal))
    brec = cut.boundary_len * ub * qb
    braw = cut.boundary_len * ub * np.einsum("kd,kd->k", g[cut.boundary_tri], cut.boundary_normal)
    vterms = cut.area * np.einsum("md,md->m", g, g)
    ui = interpolate_p1(mesh, cut.interior_left, cut.interior_mid, sol.u)
    jump = np.einsum("kd,kd->k", g[cut.interior_right] - g[cut.interior_left], cut.interior_normal)
    dterms = cut.interior_len * ui * jump
    return _report(brec, braw, vterms, dterms, cut.v_area)
