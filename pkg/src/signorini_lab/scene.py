"""Scene files: the outer domain Ω, the observation arc Γ ⊂ ∂Ω and obstacles.

A scene is a JSON object; see ``scenes/README.md`` for the schema.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .expr import Expression
from .geometry import (
    GeometryError,
    PolygonalSet,
    Provenance,
    Ring,
    boolean_ops,
    circle,
    geom_eps,
    polygon,
)

__all__ = ["Scene", "SceneError", "load_scene", "region_from_spec", "with_gamma", "shipped_scene",
           "DEFAULT_GAMMA"]

DEFAULT_GAMMA = {"angle_range": [0.0, math.pi]}
_OBSTACLE_KEYS = ("obstacle1", "obstacle2")


class SceneError(ValueError):
    pass


def region_from_spec(spec: dict, source: str) -> PolygonalSet:
    """Build a region from ``{"circle": {...}}`` or ``{"polygon": {...}}``."""
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SceneError(f"{source}: expected exactly one of 'circle' or 'polygon'")
    kind, body = next(iter(spec.items()))
    try:
        if kind == "circle":
            return circle(body.get("center", [0.0, 0.0]), float(body["radius"]),
                          int(body.get("segments", 128)), source=source,
                          phase=float(body.get("phase", 0.0)))
        if kind == "polygon":
            return polygon(body["vertices"], source=source, holes=body.get("holes", ()))
    except (KeyError, TypeError) as exc:
        raise SceneError(f"{source}: malformed region ({exc})") from exc
    except GeometryError as exc:
        raise SceneError(f"{source}: {exc}") from exc
    raise SceneError(f"{source}: unknown region kind {kind!r}")


def _ray_hit(ring: Ring, center, angle):
    """First crossing of the ray from ``center`` at ``angle`` with the ring: (edge, t)."""
    d = np.array([math.cos(angle), math.sin(angle)])
    p, q = ring.segments()
    best = None
    for i, (a, b) in enumerate(zip(p, q)):
        e = b - a
        den = d[0] * (-e[1]) + d[1] * e[0]
        if abs(den) < 1e-15:
            continue
        w = a - center
        s = (w[0] * (-e[1]) + w[1] * e[0]) / den
        t = (d[0] * w[1] - d[1] * w[0]) / den
        if s > 0 and -1e-12 <= t <= 1 + 1e-12 and (best is None or s < best[0]):
            best = (s, i, min(max(t, 0.0), 1.0))
    if best is None:
        raise SceneError(f"gamma endpoint at angle {angle} does not hit the outer boundary")
    return best[1], best[2]


def with_gamma(omega: PolygonalSet, gamma: dict | None) -> PolygonalSet:
    """Retag the edges of Ω lying on Γ with source ``gamma``.

    ``angle_range`` endpoints are inserted as vertices (on the circle when the
    boundary approximates one); ``vertex_range`` [i, j] selects the edges from
    vertex i to vertex j in counterclockwise order.
    """
    if len(omega.polygons) != 1 or len(omega.polygons[0]) != 1:
        raise SceneError("omega must be a single simply connected region")
    ring = omega.polygons[0][0]
    gamma = DEFAULT_GAMMA if gamma is None else gamma
    verts = [np.asarray(v, dtype=float) for v in ring.vertices]
    tags = list(ring.tags)
    eps = geom_eps(omega)
    if "vertex_range" in gamma:
        i, j = (int(k) for k in gamma["vertex_range"])
        n = len(verts)
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise SceneError("gamma vertex_range must name two distinct vertices of omega")
        k = i
        while k != j:
            tags[k] = Provenance("gamma", tags[k].sign, tags[k].curve)
            k = (k + 1) % n
    elif "angle_range" in gamma:
        a, b = (float(v) for v in gamma["angle_range"])
        span = b - a
        if not 0 < span < 2 * math.pi:
            raise SceneError("gamma angle_range must span an angle in (0, 2*pi)")
        curve = tags[0].curve
        center = np.array(curve[:2]) if curve else np.asarray(ring.vertices).mean(axis=0)
        for ang in (a, b):
            tmp = Ring(np.asarray(verts), tuple(tags))
            i, t = _ray_hit(tmp, center, ang)
            p0, p1 = verts[i], verts[(i + 1) % len(verts)]
            tag = tags[i]
            if tag.curve is not None:
                cx, cy, R = tag.curve
                pt = np.array([cx + R * math.cos(ang), cy + R * math.sin(ang)])
            else:
                pt = p0 + t * (p1 - p0)
            if min(np.linalg.norm(pt - p0), np.linalg.norm(pt - p1)) <= 1e3 * eps:
                continue
            verts.insert(i + 1, pt)
            tags.insert(i + 1, tag)
        for k in range(len(verts)):
            mid = 0.5 * (verts[k] + verts[(k + 1) % len(verts)])
            th = math.atan2(mid[1] - center[1], mid[0] - center[0])
            if (th - a) % (2 * math.pi) < span:
                tags[k] = Provenance("gamma", tags[k].sign, tags[k].curve)
    else:
        raise SceneError("gamma needs 'angle_range' or 'vertex_range'")
    if not any(t.source == "gamma" for t in tags):
        raise SceneError("gamma selects no boundary edge")
    if all(t.source == "gamma" for t in tags):
        raise SceneError("gamma must be a proper sub-arc of the outer boundary")
    return PolygonalSet(((Ring(np.asarray(verts), tuple(tags)),),))


def _number_or_expr(v, name):
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        e = Expression(v)
        return e.constant_value() if e.is_constant else e
    raise SceneError(f"{name} must be a number or an expression string")


@dataclass(frozen=True, eq=False)
class Scene:
    name: str
    omega: PolygonalSet
    obstacles: dict
    mu: object = 1.0
    lam: object = 1.0
    raw: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.raw, sort_keys=True).encode()).hexdigest()

    def obstacle(self, key: str = "obstacle1") -> PolygonalSet:
        if key not in self.obstacles:
            raise SceneError(f"scene {self.name!r} has no {key}")
        return self.obstacles[key]

    def domain(self, obstacle: PolygonalSet | str | None = "obstacle1") -> PolygonalSet:
        """Computational domain Ω minus the obstacle closure."""
        if obstacle is None:
            return self.omega
        O = self.obstacle(obstacle) if isinstance(obstacle, str) else obstacle
        if O.is_empty:
            return self.omega
        check_admissible(self.omega, O)
        src = {t.source for r in O.rings() for t in r.tags}
        if not all(s.startswith("obstacle") for s in src):
            O = O.retag("obstacle")
        return boolean_ops(self.omega, O, "difference")

    def parameter(self, key, default=None):
        return self.raw.get(key, default)


def check_admissible(omega: PolygonalSet, O: PolygonalSet) -> None:
    """Obstacle compactly inside Ω with connected complement."""
    so, sO = omega.to_shapely(), O.to_shapely()
    if not so.contains(sO) or so.boundary.distance(sO) <= geom_eps(omega, O):
        raise SceneError("obstacle must lie strictly inside omega")
    rest = boolean_ops(omega, O, "difference")
    if len(rest.polygons) != 1:
        raise SceneError("omega minus the obstacle must be connected")


def load_scene(path_or_dict) -> Scene:
    if isinstance(path_or_dict, dict):
        raw, name = path_or_dict, path_or_dict.get("name", "scene")
    else:
        path = Path(path_or_dict)
        if not path.exists():
            shipped = resources.files("signorini_lab") / "scenes" / path.name
            if not shipped.is_file():
                raise SceneError(f"scene file {path} not found")
            path = Path(str(shipped))
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SceneError(f"{path}: invalid JSON ({exc})") from exc
        name = raw.get("name", path.stem)
    if "omega" not in raw:
        raise SceneError("scene needs an 'omega' region")
    omega = with_gamma(region_from_spec(raw["omega"], "omega"), raw.get("gamma"))
    obstacles = {}
    for key in _OBSTACLE_KEYS:
        if key in raw and raw[key] is not None:
            O = region_from_spec(raw[key], key)
            check_admissible(omega, O)
            obstacles[key] = O
    lame = raw.get("lame", {})
    mu = _number_or_expr(lame.get("mu", 1.0), "mu")
    lam = _number_or_expr(lame.get("lambda", 1.0), "lambda")
    return Scene(name, omega, obstacles, mu, lam, raw)


def shipped_scene(name: str) -> Scene:
    return load_scene(Path(name if name.endswith(".json") else name + ".json"))
