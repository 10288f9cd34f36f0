"""Inverse-obstacle experiments.

Forward maps send an obstacle to the Γ-trace of the flux (scalar) or traction
(elastic).  Distinguishability compares two forward maps against a
refinement-based discretization error estimate; the rigid-motion tangency
test implements the obstruction class for rigid boundary data; and a
Gauss-Newton loop reconstructs star-shaped obstacles from a measurement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import shapely

from .elastic import LameField, RigidMotion, fit_rigid_motion, recover_traction, solve_elastic
from .geometry import PolygonalSet, Provenance, Ring, circle
from .measurement import BoundaryMeasurement, compare
from .mesh import BoundaryTag, Mesh, MeshError, check_invariants, refine, triangulate
from .scalar import evaluate_boundary_data, recover_flux, solve_scalar
from .scene import Scene

__all__ = [
    "ExperimentConfig",
    "UpsilonQuery",
    "Verdict",
    "GapReport",
    "ReconstructionResult",
    "forward_map",
    "solve_on",
    "distinguishability",
    "upsilon_membership",
    "upsilon_empty_certificate",
    "ngon_discretization_bound",
    "upsilon_tolerance",
    "star_obstacle",
    "reconstruct",
    "synthetic_target",
]

ROUNDOFF_REL = 1e-10
DISTINGUISH_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """One inverse experiment: problem kind, scene (Ω, Γ, Lamé data), datum f and mesh size."""

    kind: str
    scene: Scene
    f: object
    h: float
    levels: int = 1
    seed: int = 0
    crime_free: bool = False

    def __post_init__(self):
        if self.kind not in ("scalar", "elastic"):
            raise ValueError("kind must be 'scalar' or 'elastic'")
        if not (self.h > 0):
            raise ValueError("h must be positive")
        if self.levels < 1:
            raise ValueError("levels must be at least 1")
        tags = [t.source for r in self.scene.omega.rings() for t in r.tags]
        if "gamma" not in tags or all(s == "gamma" for s in tags):
            raise ValueError("gamma must be a nonempty proper sub-arc of the outer boundary")

    def lame(self, mesh: Mesh) -> LameField:
        return LameField.from_functions(mesh, self.scene.mu, self.scene.lam)

    def with_h(self, h: float) -> "ExperimentConfig":
        return replace(self, h=h)


_MESH_CACHE: dict = {}


def _mesh_for(domain: PolygonalSet, h: float, refinements: int = 0) -> Mesh:
    from .mesh import _domain_digest

    key = (_domain_digest(domain), float(h), int(refinements))
    if key not in _MESH_CACHE:
        mesh = triangulate(domain, h) if refinements == 0 else refine(_mesh_for(domain, h, refinements - 1))
        if len(_MESH_CACHE) > 64:
            _MESH_CACHE.clear()
        _MESH_CACHE[key] = mesh
    return _MESH_CACHE[key]


def solve_on(config: ExperimentConfig, mesh: Mesh):
    if config.kind == "scalar":
        return solve_scalar(mesh, config.f)
    return solve_elastic(mesh, config.lame(mesh), config.f)


def measure(config: ExperimentConfig, mesh: Mesh) -> BoundaryMeasurement:
    sol = solve_on(config, mesh)
    if config.kind == "scalar":
        return recover_flux(sol, mesh, BoundaryTag.GAMMA)
    return recover_traction(sol, mesh, config.lame(mesh), BoundaryTag.GAMMA)


def forward_map(config: ExperimentConfig, obstacle: PolygonalSet | str | None,
                refinements: int = 0) -> BoundaryMeasurement:
    """Γ-trace of ∂_n u (scalar) or σ(u)n (elastic) for the given obstacle."""
    domain = config.scene.domain(obstacle)
    return measure(config, _mesh_for(domain, config.h, refinements))


class Verdict(str, Enum):
    DISTINGUISHED = "DISTINGUISHED"
    OBSTRUCTED = "OBSTRUCTED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class GapReport:
    verdict: Verdict
    gap_l2: float
    gap_linf: float
    error_estimate: float
    effective_estimate: float
    obstruction: str | None
    gap_below_threshold: bool
    levels: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "gap_l2": self.gap_l2,
            "gap_linf": self.gap_linf,
            "error_estimate": self.error_estimate,
            "effective_estimate": self.effective_estimate,
            "obstruction": self.obstruction,
            "gap_below_threshold": self.gap_below_threshold,
            "levels": self.levels,
        }


def _boundary_samples(config: ExperimentConfig, h: float) -> np.ndarray:
    """Points on ∂Ω used to classify the datum f."""
    pts = []
    for ring in config.scene.omega.rings():
        p, q = ring.segments()
        t = np.linspace(0.0, 1.0, 5)[:-1]
        pts.append((p[:, None, :] + t[None, :, None] * (q - p)[:, None, :]).reshape(-1, 2))
    return np.vstack(pts)


def classify_datum(config: ExperimentConfig):
    """('nonnegative-constant' | 'negative-constant' | None) or a RigidMotion for elastic data."""
    pts = _boundary_samples(config, config.h)
    if config.kind == "scalar":
        v = evaluate_boundary_data(config.f, pts)
        scale = max(1.0, float(np.max(np.abs(v))))
        if np.ptp(v) <= 1e-12 * scale:
            return "nonnegative-constant" if v.min() >= 0 else "negative-constant"
        return None
    v = evaluate_boundary_data(config.f, pts, ncomp=2)
    scale = max(1.0, float(np.max(np.abs(v))))
    rm, res = fit_rigid_motion(v, pts)
    return rm if res <= ROUNDOFF_REL * scale else None


def ngon_discretization_bound(radius: float, segments: int, omega: float) -> float:
    """Upper bound |ω| R π / N on the tangency residual of an inscribed N-gon of a disk
    when the rotation is about the disk center (the exact value is |ω| R sin(π/N))."""
    return abs(omega) * radius * math.pi / segments


def upsilon_tolerance(obstacle: PolygonalSet, rigid: RigidMotion, scale: float = 1.0) -> float:
    """N-gon bound when every obstacle edge approximates one circle, roundoff otherwise."""
    curves = {t.curve for r in obstacle.rings() for t in r.tags}
    if len(curves) == 1 and None not in curves:
        cx, cy, R = next(iter(curves))
        n = sum(len(r) for r in obstacle.rings())
        return ngon_discretization_bound(R, n, rigid.omega) + ROUNDOFF_REL * scale
    return ROUNDOFF_REL * scale


@dataclass(frozen=True, eq=False)
class UpsilonQuery:
    obstacle: PolygonalSet
    rigid: RigidMotion
    tolerance: float

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


def upsilon_membership(q: UpsilonQuery) -> tuple[bool, float]:
    """Tangency test max |(c + A x)·ν_O(x)| over ∂O, sampled at both endpoints of every edge.

    Each edge is tested with its own normal, so flat faces are checked away
    from their midpoints.
    """
    if q.obstacle.is_empty:
        return True, 0.0
    res = 0.0
    for ring in q.obstacle.rings():
        p, nxt = ring.segments()
        nrm = ring.normals()
        for pts in (p, nxt):
            v = q.rigid(pts)
            res = max(res, float(np.max(np.abs(np.einsum("kd,kd->k", v, nrm)))))
    return res <= q.tolerance, res


def upsilon_empty_certificate(rigid: RigidMotion, omega: PolygonalSet) -> bool:
    """True iff |c| > M = max over Ω of |A x| (attained at a vertex of the hull)."""
    M = abs(rigid.omega) * float(np.max(np.linalg.norm(omega.vertices(), axis=1)))
    return rigid.norm_c() > M


def _roundoff_floor(config: ExperimentConfig, meas: BoundaryMeasurement) -> float:
    pts = _boundary_samples(config, config.h)
    v = evaluate_boundary_data(config.f, pts, ncomp=1 if config.kind == "scalar" else 2)
    scale = max(1.0, float(np.max(np.abs(v))))
    return ROUNDOFF_REL * scale * math.sqrt(max(meas.length, 1e-300))


def distinguishability(config: ExperimentConfig, O1, O2) -> GapReport:
    """Compare forward maps of two obstacles against a refinement error estimate.

    Each forward map is evaluated at h and after one uniform refinement; the
    error estimate is the larger L2 change under refinement.  The gap is
    measured at the finer level.  The estimate is floored at a roundoff level
    so that exactly reproduced fields do not produce a vanishing threshold.
    """
    spacing = config.h / 2
    levels = []
    maps = {}
    for key, O in (("O1", O1), ("O2", O2)):
        for k in range(2):
            maps[key, k] = forward_map(config, O, refinements=k)
    est = max(compare(maps["O1", 0], maps["O1", 1], spacing).l2,
              compare(maps["O2", 0], maps["O2", 1], spacing).l2)
    gap = compare(maps["O1", 1], maps["O2", 1], spacing / 2)
    for k in range(2):
        g = compare(maps["O1", k], maps["O2", k], spacing)
        levels.append({"h": config.h / 2**k, "gap_l2": g.l2, "gap_linf": g.linf})
    floor = _roundoff_floor(config, maps["O1", 1])
    est_eff = max(est, floor)
    below = gap.l2 <= DISTINGUISH_FACTOR * est_eff
    obstruction = None
    datum = classify_datum(config)
    if config.kind == "scalar" and datum == "nonnegative-constant":
        obstruction = "nonnegative constant datum"
    elif config.kind == "elastic" and isinstance(datum, RigidMotion):
        obs = [config.scene.obstacle(O) if isinstance(O, str) else O for O in (O1, O2)]
        members = [upsilon_membership(UpsilonQuery(O, datum, upsilon_tolerance(O, datum)))[0] for O in obs]
        if all(members):
            obstruction = "rigid datum with both obstacles tangent to the rigid field"
    if obstruction:
        verdict = Verdict.OBSTRUCTED
    elif not below:
        verdict = Verdict.DISTINGUISHED
    else:
        verdict = Verdict.INCONCLUSIVE
    return GapReport(verdict, gap.l2, gap.linf, est, est_eff, obstruction, bool(below), levels)


# ---------------------------------------------------------------- reconstruction

def star_obstacle(center, r0: float, a=(), b=(), segments: int = 128, source: str = "obstacle1") -> PolygonalSet:
    """Star-shaped polygon r(θ) = r0 + Σ a_k cos kθ + b_k sin kθ; a disk keeps its circle metadata."""
    if not any(a) and not any(b):
        return circle(center, r0, segments, source=source)
    th = 2 * np.pi * np.arange(segments) / segments
    r = _radius(th, r0, a, b)
    if np.any(r <= 0):
        raise ValueError("radius function must stay positive")
    c = np.asarray(center, dtype=float)
    v = c + r[:, None] * np.column_stack([np.cos(th), np.sin(th)])
    ring = Ring(v, tuple([Provenance(source, 1)] * segments))
    return PolygonalSet(((ring,),))


def _radius(th, r0, a, b):
    r = np.full_like(np.asarray(th, dtype=float), r0)
    for k, ak in enumerate(a, start=1):
        r = r + ak * np.cos(k * th)
    for k, bk in enumerate(b, start=1):
        r = r + bk * np.sin(k * th)
    return r


@dataclass
class ReconstructionResult:
    params: np.ndarray
    K: int
    center: tuple
    history: list
    status: str
    iterations: int
    evaluations: int
    message: str = ""

    @property
    def r0(self) -> float:
        return float(self.params[0])

    def coefficients(self):
        K = self.K
        return self.params[1:1 + K], self.params[1 + K:1 + 2 * K]

    def to_dict(self) -> dict:
        a, b = self.coefficients()
        return {"r0": self.r0, "a": a.tolist(), "b": b.tolist(), "center": list(self.center),
                "history": list(self.history), "status": self.status, "iterations": self.iterations,
                "evaluations": self.evaluations, "message": self.message}


class _Morpher:
    """Moves the nodes of a template mesh so its obstacle boundary follows r(θ).

    Nodes are displaced radially about the center by w(ρ, θ)·(r(θ) - r_init(θ))
    with w falling linearly from 1 on the obstacle to 0 at the blending radius,
    so nodes on ∂Ω never move and the forward map is smooth in the parameters.
    """

    def __init__(self, mesh: Mesh, center, p_init, K, R_blend):
        self.mesh = mesh
        self.c = np.asarray(center, dtype=float)
        self.K = K
        d = mesh.nodes - self.c
        self.rho = np.hypot(d[:, 0], d[:, 1])
        self.th = np.arctan2(d[:, 1], d[:, 0])
        self.dir = d / np.where(self.rho > 0, self.rho, 1.0)[:, None]
        self.r_init = self.radius(p_init, self.th)
        self.R_blend = R_blend
        self.w = np.clip((R_blend - self.rho) / (R_blend - self.r_init), 0.0, 1.0)

    def radius(self, p, th):
        return _radius(th, p[0], p[1:1 + self.K], p[1 + self.K:1 + 2 * self.K])

    def __call__(self, p) -> Mesh | None:
        dr = self.radius(p, self.th) - self.r_init
        nodes = self.mesh.nodes + (self.w * dr)[:, None] * self.dir
        m = self.mesh
        out = Mesh(nodes, m.triangles, m.boundary_edges, m.boundary_tags, m.boundary_curves, (), m.h)
        if np.any(out.areas() <= 0):
            return None
        return out


def synthetic_target(config: ExperimentConfig, obstacle: PolygonalSet) -> BoundaryMeasurement:
    """Synthetic data: same mesh size (inverse crime) or h·√2 in crime-free mode."""
    cfg = config.with_h(config.h * math.sqrt(2)) if config.crime_free else config
    return forward_map(cfg, obstacle)


def reconstruct(config: ExperimentConfig, target: BoundaryMeasurement, init, K: int = 0,
                center=None, max_iter: int = 60, segments: int = 128, tol: float = 1e-10,
                max_rejections: int = 20) -> ReconstructionResult:
    """Gauss-Newton fit of a star-shaped obstacle to a Γ measurement.

    ``init`` is r0 or a parameter vector (r0, a_1..a_K, b_1..b_K).  The
    misfit is the L2(Γ) distance on a common arc-length grid of spacing h/2.
    Finite-difference Jacobian with step 1e-4·r0, backtracking line search;
    only decreasing steps are accepted, so the misfit history is
    non-increasing.  Invalid shapes (leaving Ω, non-positive radius, inverted
    elements) are rejected and the step halved.
    """
    if K < 0 or K > 4:
        raise ValueError("K must be between 0 and 4")
    p = np.zeros(1 + 2 * K)
    init = np.atleast_1d(np.asarray(init, dtype=float))
    p[:len(init)] = init[:len(p)]
    c = np.zeros(2) if center is None else np.asarray(center, dtype=float)
    omega = config.scene.omega.to_shapely()
    dist_out = float(omega.exterior.distance(shapely.Point(*c)))
    R_blend = 0.5 * (dist_out + float(np.max(np.abs(p[0]) + np.sum(np.abs(p[1:])))))
    if not R_blend < dist_out - config.h:
        raise ValueError("initial obstacle is too close to the outer boundary")
    template = _mesh_for(config.scene.domain(star_obstacle(c, p[0], p[1:1 + K], p[1 + K:], segments)),
                         config.h)
    morph = _Morpher(template, c, p, K, R_blend)
    th_check = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    spacing = config.h / 2
    evaluations = 0

    def valid(q):
        r = morph.radius(q, th_check)
        return bool(np.all(r > 0.05 * abs(p[0])) and np.all(r < R_blend - config.h))

    def residual(q):
        nonlocal evaluations
        if not valid(q):
            return None
        mesh = morph(q)
        if mesh is None:
            return None
        evaluations += 1
        meas = measure(config, mesh)
        lo = max(meas.arc[0], target.arc[0])
        hi = min(meas.arc[-1], target.arc[-1])
        n = max(2, int(np.ceil((hi - lo) / spacing)) + 1)
        grid = np.linspace(lo, hi, n)
        w = np.full(n, hi - lo) / (n - 1)
        w[0] = w[-1] = 0.5 * w[0]
        d = (meas.resample(grid) - target.resample(grid)).reshape(n, -1)
        return (np.sqrt(w)[:, None] * d).ravel()

    r = residual(p)
    if r is None:
        raise ValueError("initial parameters describe an invalid obstacle")
    misfit = float(np.linalg.norm(r))
    history = [misfit]
    data_scale = max(float(np.max(np.abs(target.values))), 1e-300) * math.sqrt(max(target.length, 1e-300))
    f_scale = max(1.0, float(np.max(np.abs(evaluate_boundary_data(
        config.f, _boundary_samples(config, config.h), 1 if config.kind == "scalar" else 2)))))
    if misfit <= tol * max(data_scale, 1e-300) or misfit == 0.0:
        return ReconstructionResult(p, K, tuple(c), history, "converged", 0, evaluations,
                                    "target reproduced at the initial parameters")
    status, message = "max_iter", ""
    it = 0
    rejections = 0
    for it in range(1, max_iter + 1):
        step = 1e-4 * abs(p[0])
        J = np.empty((len(r), len(p)))
        for j in range(len(p)):
            q = p.copy()
            q[j] += step
            rq = residual(q)
            if rq is None:
                q[j] -= 2 * step
                rq = residual(q)
                if rq is None:
                    return ReconstructionResult(p, K, tuple(c), history, "failed", it, evaluations,
                                                "finite-difference probe left the admissible set")
                J[:, j] = (r - rq) / step
            else:
                J[:, j] = (rq - r) / step
        sens = float(np.linalg.norm(J, ord=2)) * abs(p[0])
        if sens <= 1e-8 * f_scale * math.sqrt(max(target.length, 1e-300)):
            status = "stagnated"
            message = "misfit is flat in the shape parameters (non-identifiable datum)"
            break
        dp = np.linalg.lstsq(J, -r, rcond=None)[0]
        alpha = 1.0
        accepted = False
        for _ in range(40):
            q = p + alpha * dp
            rq = residual(q)
            if rq is None:
                rejections += 1
                if rejections >= max_rejections:
                    break
            else:
                rejections = 0
                if np.linalg.norm(rq) < misfit:
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            if rejections >= max_rejections:
                status = "failed"
                message = f"{max_rejections} consecutive steps left the admissible set"
            else:
                status = "converged"
                message = "no further decrease along the Gauss-Newton direction"
            break
        rel_step = float(np.linalg.norm(alpha * dp)) / max(abs(p[0]), 1e-300)
        p, r = q, rq
        new = float(np.linalg.norm(r))
        history.append(new)
        decrease = misfit - new
        misfit = new
        if rel_step < 1e-8 or misfit <= tol * data_scale or decrease <= 1e-12 * history[0]:
            status = "converged"
            break
    return ReconstructionResult(p, K, tuple(c), history, status, it, evaluations, message)
