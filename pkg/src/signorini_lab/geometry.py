"""Polygonal set algebra with edge provenance.

Regions of the plane (the outer domain, the obstacles and the sets built
from them) are stored as oriented rings: outer rings counterclockwise,
holes clockwise, so the outward normal of every edge is its right-hand
normal.  Each edge remembers which source boundary it lies on and whether
it runs with or against that source's orientation.  Boolean operations are
delegated to GEOS through shapely; provenance is recovered afterwards by
matching every result edge against the input edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np
import shapely
from shapely.geometry import LineString, MultiPolygon, Polygon as ShapelyPolygon
from shapely.geometry.polygon import orient

__all__ = [
    "GeometryError",
    "Provenance",
    "Ring",
    "PolygonalSet",
    "EdgeTag",
    "EdgeClassification",
    "LemmaReport",
    "circle",
    "polygon",
    "geom_eps",
    "boolean_ops",
    "compute_G0",
    "compute_V",
    "classify_boundary",
    "check_appendix_lemmas",
]

EPS_REL = 1e-9
NORMAL_TOL = 1e-12


class GeometryError(ValueError):
    """Raised when an input or a derived set violates a geometric contract."""


class Provenance(NamedTuple):
    source: str
    # +1: edge runs in the source ring's direction, -1: reversed
    sign: int
    # (cx, cy, radius) when the source boundary approximates a circle
    curve: tuple | None = None

    def flipped(self, s: int) -> "Provenance":
        return Provenance(self.source, self.sign * s, self.curve)


@dataclass(frozen=True)
class Ring:
    vertices: np.ndarray
    tags: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise GeometryError("a ring needs at least 3 vertices")
        if len(self.tags) != len(v):
            raise GeometryError("one provenance tag per edge is required")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)

    @property
    def signed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def normals(self) -> np.ndarray:
        """Right-hand unit normals, i.e. outward normals for the region."""
        p, q = self.segments()
        d = q - p
        n = np.column_stack([d[:, 1], -d[:, 0]])
        return n / np.linalg.norm(n, axis=1)[:, None]

    def edge_lengths(self) -> np.ndarray:
        p, q = self.segments()
        return np.linalg.norm(q - p, axis=1)


@dataclass(frozen=True)
class PolygonalSet:
    """A finite union of polygons with holes.

    ``polygons`` is a tuple of ``(outer, hole, hole, ...)`` ring tuples.
    """

    polygons: tuple = ()
    _shape: object = field(default=None, compare=False, repr=False)

    @classmethod
    def empty(cls) -> "PolygonalSet":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return len(self.polygons) == 0

    def rings(self) -> Iterator[Ring]:
        for poly in self.polygons:
            yield from poly

    def components(self) -> list["PolygonalSet"]:
        return [PolygonalSet((poly,)) for poly in self.polygons]

    @property
    def area(self) -> float:
        return float(sum(r.signed_area for r in self.rings()))

    @property
    def perimeter(self) -> float:
        return float(sum(r.edge_lengths().sum() for r in self.rings()))

    def bounds(self) -> tuple[float, float, float, float]:
        if self.is_empty:
            return (0.0, 0.0, 0.0, 0.0)
        v = np.vstack([r.vertices for r in self.rings()])
        return (v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max())

    def diameter(self) -> float:
        x0, y0, x1, y1 = self.bounds()
        return math.hypot(x1 - x0, y1 - y0)

    def vertices(self) -> np.ndarray:
        if self.is_empty:
            return np.zeros((0, 2))
        return np.vstack([r.vertices for r in self.rings()])

    def edges(self):
        """Return (start, end, outward_normal, tags) over all rings."""
        if self.is_empty:
            z = np.zeros((0, 2))
            return z, z, z, []
        p = np.vstack([r.segments()[0] for r in self.rings()])
        q = np.vstack([r.segments()[1] for r in self.rings()])
        n = np.vstack([r.normals() for r in self.rings()])
        tags = [t for r in self.rings() for t in r.tags]
        return p, q, n, tags

    def to_shapely(self):
        if self._shape is not None:
            return self._shape
        polys = [
            ShapelyPolygon(poly[0].vertices, [h.vertices for h in poly[1:]])
            for poly in self.polygons
        ]
        if not polys:
            shape = ShapelyPolygon()
        elif len(polys) == 1:
            shape = polys[0]
        else:
            shape = MultiPolygon(polys)
        object.__setattr__(self, "_shape", shape)
        return shape

    def boundary_lines(self):
        return self.to_shapely().boundary

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.is_empty:
            return np.zeros(len(pts), dtype=bool)
        return shapely.contains_xy(self.to_shapely(), pts[:, 0], pts[:, 1])

    def distance_to_boundary(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.is_empty:
            return np.full(len(pts), np.inf)
        return shapely.distance(self.boundary_lines(), shapely.points(pts))

    def retag(self, source: str) -> "PolygonalSet":
        """Copy with every edge re-attributed to ``source`` (curves kept)."""
        polys = tuple(
            tuple(Ring(r.vertices, tuple(Provenance(source, 1, t.curve) for t in r.tags)) for r in poly)
            for poly in self.polygons
        )
        return PolygonalSet(polys)

    def validate(self, eps: float | None = None) -> None:
        if self.is_empty:
            return
        eps = geom_eps(self) if eps is None else eps
        shape = self.to_shapely()
        if not shape.is_valid:
            raise GeometryError(f"invalid polygonal set: {shapely.is_valid_reason(shape)}")
        for poly in self.polygons:
            if poly[0].signed_area <= 0:
                raise GeometryError("outer rings must be counterclockwise")
            for h in poly[1:]:
                if h.signed_area >= 0:
                    raise GeometryError("hole rings must be clockwise")
            for r in poly:
                if np.any(r.edge_lengths() <= eps):
                    raise GeometryError("consecutive vertices closer than the snapping tolerance")
                if any(t is None for t in r.tags):
                    raise GeometryError("edge without provenance")


def geom_eps(*sets: PolygonalSet) -> float:
    """Snapping tolerance: 1e-9 times the bounding-box diameter of the inputs."""
    v = [s.vertices() for s in sets if not s.is_empty]
    if not v:
        return EPS_REL
    v = np.vstack(v)
    d = float(np.hypot(*(v.max(axis=0) - v.min(axis=0))))
    return EPS_REL * max(d, 1e-300)


def _ring_from_coords(coords, tags) -> Ring:
    return Ring(np.asarray(coords, dtype=float), tuple(tags))


def circle(center, radius: float, segments: int = 128, source: str = "region",
           phase: float = 0.0) -> PolygonalSet:
    """Regular ``segments``-gon inscribed in the circle, counterclockwise."""
    if radius <= 0 or segments < 3:
        raise GeometryError("circle needs radius > 0 and at least 3 segments")
    t = phase + 2.0 * np.pi * np.arange(segments) / segments
    c = np.asarray(center, dtype=float)
    v = c + radius * np.column_stack([np.cos(t), np.sin(t)])
    curve = (float(c[0]), float(c[1]), float(radius))
    tags = [Provenance(source, 1, curve)] * segments
    return PolygonalSet((((_ring_from_coords(v, tags)),),))


def polygon(vertices, source: str = "region", holes: Sequence = ()) -> PolygonalSet:
    """Polygon from a vertex list; orientation is normalized."""
    v = np.asarray(vertices, dtype=float)
    if len(v) >= 2 and np.allclose(v[0], v[-1]):
        v = v[:-1]
    if len(v) < 3:
        raise GeometryError("a polygon needs at least 3 vertices")
    outer = v if _signed_area(v) > 0 else v[::-1]
    rings = [_ring_from_coords(outer, [Provenance(source, 1)] * len(outer))]
    for h in holes:
        h = np.asarray(h, dtype=float)
        h = h if _signed_area(h) < 0 else h[::-1]
        rings.append(_ring_from_coords(h, [Provenance(source, 1)] * len(h)))
    out = PolygonalSet((tuple(rings),))
    out.validate()
    return out


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _point_segment_distance(pts, a, b):
    """Distances from every point to every segment, shape (len(pts), len(a))."""
    d = b - a
    L2 = np.einsum("ij,ij->i", d, d)
    L2 = np.where(L2 == 0, 1.0, L2)
    w = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("pij,ij->pi", w, d) / L2, 0.0, 1.0)
    proj = a[None] + t[..., None] * d[None]
    return np.linalg.norm(pts[:, None, :] - proj, axis=2)


class _EdgeIndex:
    """Input edges of one or more sets, queried by geometric containment."""

    def __init__(self, *sets: PolygonalSet):
        ps, qs, tags = [], [], []
        for s in sets:
            p, q, _, t = s.edges()
            ps.append(p)
            qs.append(q)
            tags.extend(t)
        self.p = np.vstack(ps) if ps else np.zeros((0, 2))
        self.q = np.vstack(qs) if qs else np.zeros((0, 2))
        self.tags = tags
        self.tree = shapely.STRtree(shapely.linestrings(np.stack([self.p, self.q], axis=1))) if len(tags) else None

    def vertices_on(self, a, b, eps) -> np.ndarray:
        """Input vertices strictly inside segment ab (as parameters in (0,1))."""
        d = b - a
        L2 = float(d @ d)
        cand = np.vstack([self.p, self.q])
        w = cand - a
        t = w @ d / L2
        perp = np.abs(w[:, 0] * d[1] - w[:, 1] * d[0]) / math.sqrt(L2)
        mask = (perp <= eps) & (t * math.sqrt(L2) > eps) & ((1 - t) * math.sqrt(L2) > eps)
        return np.unique(np.round(t[mask], 15))

    def match(self, a, b, eps):
        """First input edge containing segment ab, with the relative direction."""
        if self.tree is None:
            return None
        line = LineString([a, b])
        idx = np.sort(self.tree.query(line, predicate="dwithin", distance=eps))
        if len(idx) == 0:
            return None
        pts = np.array([a, b, 0.5 * (a + b)])
        dist = _point_segment_distance(pts, self.p[idx], self.q[idx])
        ok = np.all(dist <= eps, axis=0)
        if not ok.any():
            return None
        j = idx[np.argmax(ok)]
        s = 1 if float((b - a) @ (self.q[j] - self.p[j])) > 0 else -1
        return j, s


def _from_shapely(geom, index: _EdgeIndex, eps: float) -> PolygonalSet:
    polys = []
    parts = []
    if geom.is_empty:
        return PolygonalSet.empty()
    if isinstance(geom, ShapelyPolygon):
        parts = [geom]
    else:
        parts = [g for g in getattr(geom, "geoms", []) if isinstance(g, ShapelyPolygon)]
        for g in getattr(geom, "geoms", []):
            if isinstance(g, MultiPolygon):
                parts.extend(g.geoms)
    for part in parts:
        if part.is_empty or part.area <= eps * part.length:
            continue
        part = orient(part, sign=1.0)
        rings = []
        for k, ring in enumerate([part.exterior, *part.interiors]):
            coords = np.asarray(ring.coords)[:-1]
            coords = _drop_duplicates(coords, eps)
            if len(coords) < 3:
                continue
            rings.append(_tag_ring(coords, index, eps))
        if rings:
            polys.append(tuple(rings))
    return PolygonalSet(tuple(polys))


def _drop_duplicates(coords, eps):
    keep = [0]
    for i in range(1, len(coords)):
        if np.linalg.norm(coords[i] - coords[keep[-1]]) > eps:
            keep.append(i)
    if len(keep) > 1 and np.linalg.norm(coords[keep[-1]] - coords[keep[0]]) <= eps:
        keep.pop()
    return coords[keep]


def _tag_ring(coords, index: _EdgeIndex, eps) -> Ring:
    verts, tags = [], []
    n = len(coords)
    for i in range(n):
        a, b = coords[i], coords[(i + 1) % n]
        m = index.match(a, b, eps)
        if m is not None:
            verts.append(a)
            tags.append(index.tags[m[0]].flipped(m[1]))
            continue
        # edge spans several collinear input edges: split at their vertices
        ts = index.vertices_on(a, b, eps)
        pts = [a] + [a + t * (b - a) for t in ts] + [b]
        for p0, p1 in zip(pts[:-1], pts[1:]):
            m = index.match(p0, p1, eps)
            if m is None:
                raise GeometryError(
                    f"result edge {p0.tolist()}->{p1.tolist()} matches no input edge")
            verts.append(p0)
            tags.append(index.tags[m[0]].flipped(m[1]))
    return Ring(np.asarray(verts), tuple(tags))


_OPS = {
    "union": shapely.union,
    "intersection": shapely.intersection,
    "difference": shapely.difference,
}


def boolean_ops(A: PolygonalSet, B: PolygonalSet, kind: str, eps: float | None = None) -> PolygonalSet:
    """Union, intersection or difference of two polygonal sets.

    Vertices of ``B`` within ``eps`` of ``A`` are snapped onto ``A`` first so
    that shared edges of opposite orientation cancel cleanly.
    """
    if kind not in _OPS:
        raise ValueError(f"unknown boolean operation {kind!r}")
    eps = geom_eps(A, B) if eps is None else eps
    index = _EdgeIndex(A, B)
    ga, gb = A.to_shapely(), B.to_shapely()
    if not ga.is_empty and not gb.is_empty:
        gb_snapped = shapely.snap(gb, ga, eps)
        if not gb_snapped.is_valid:
            gb_snapped = gb
        if abs(gb_snapped.area - gb.area) > 10 * eps * max(gb.length, eps):
            raise GeometryError("snapping changed the area beyond tolerance")
        gb = gb_snapped
    raw = _OPS[kind](ga, gb)
    result = _from_shapely(raw, index, eps)
    if abs(result.area - raw.area) > 10 * eps * max(raw.length, eps) + 1e-300:
        raise GeometryError("sliver removal changed the area beyond tolerance")
    return result


def _union_all(sets: Iterable[PolygonalSet], eps) -> PolygonalSet:
    out = PolygonalSet.empty()
    for s in sets:
        out = boolean_ops(out, s, "union", eps)
    return out


def _single_component(s: PolygonalSet) -> bool:
    return len(s.polygons) == 1


def _check_obstacle(omega: PolygonalSet, obstacle: PolygonalSet, name: str, eps: float) -> None:
    if obstacle.is_empty:
        return
    if not omega.to_shapely().contains(obstacle.to_shapely()):
        raise GeometryError(f"{name} is not contained in the outer domain")
    gap = shapely.distance(omega.boundary_lines(), obstacle.boundary_lines())
    if gap <= eps:
        raise GeometryError(f"{name} touches the outer boundary")
    rest = boolean_ops(omega, obstacle, "difference", eps)
    if not _single_component(rest):
        raise GeometryError(f"complement of {name} in the outer domain is disconnected")


def compute_G0(omega: PolygonalSet, O1: PolygonalSet, O2: PolygonalSet) -> PolygonalSet:
    """Component of the domain minus both obstacles whose boundary holds the outer boundary."""
    eps = geom_eps(omega, O1, O2)
    if omega.is_empty or not _single_component(omega):
        raise GeometryError("outer domain must be a single nonempty polygon")
    _check_obstacle(omega, O1, "obstacle1", eps)
    _check_obstacle(omega, O2, "obstacle2", eps)
    free = boolean_ops(omega, _union_all([O1, O2], eps), "difference", eps)
    outer = omega.vertices()
    for comp in free.components():
        if np.all(comp.distance_to_boundary(outer) <= 10 * eps):
            return comp
    raise GeometryError("no component of the free region carries the whole outer boundary")


def _leftmost_key(s: PolygonalSet):
    v = s.vertices()
    i = np.lexsort((v[:, 1], v[:, 0]))[0]
    return (float(v[i, 0]), float(v[i, 1]))


def compute_V(omega: PolygonalSet, G0: PolygonalSet, O1: PolygonalSet, O2: PolygonalSet) -> PolygonalSet:
    """Largest component of (domain minus closure of G0) minus closure of O2 touching G0."""
    eps = geom_eps(omega, O1, O2)
    if O1.is_empty or boolean_ops(O1, O2, "difference", eps).area <= eps * max(O1.perimeter, eps):
        raise GeometryError("obstacle1 is contained in obstacle2; no admissible component")
    rest = boolean_ops(boolean_ops(omega, G0, "difference", eps), O2, "difference", eps)
    g0_boundary = G0.boundary_lines()
    candidates = [c for c in rest.components()
                  if shapely.distance(c.boundary_lines(), g0_boundary) <= 10 * eps]
    if not candidates:
        raise GeometryError("no component touches the boundary of G0")
    candidates.sort(key=lambda c: (-c.area, _leftmost_key(c)))
    return candidates[0]


class EdgeTag(str, Enum):
    SAME_AS_O1 = "SAME_AS_O1"
    OPPOSITE_OF_O2 = "OPPOSITE_OF_O2"
    CORNER = "CORNER"


@dataclass(frozen=True)
class EdgeClassification:
    start: tuple
    end: tuple
    tag: EdgeTag
    normal: tuple
    source: str = ""

    @property
    def length(self) -> float:
        return math.dist(self.start, self.end)


def _normal_on(target: PolygonalSet, a, b, eps):
    """Outward normal of ``target`` along the edge containing ab, or None."""
    if target.is_empty:
        return None
    p, q, n, _ = target.edges()
    pts = np.array([a, b, 0.5 * (a + b)])
    dist = _point_segment_distance(pts, p, q)
    ok = np.all(dist <= 10 * eps, axis=0)
    if not ok.any():
        return None
    return n[np.argmax(ok)]


def classify_boundary(V: PolygonalSet, O1: PolygonalSet, O2: PolygonalSet) -> list[EdgeClassification]:
    """Tag every boundary edge of V by the obstacle boundary it inherits its normal from.

    Raises GeometryError if some positive-length edge is neither a piece of the
    first obstacle's boundary with the same outward normal nor a piece of the
    second obstacle's boundary with the opposite normal.
    """
    eps = geom_eps(V, O1, O2)
    out: list[EdgeClassification] = []
    failures = []
    for ring in V.rings():
        p, q = ring.segments()
        normals = ring.normals()
        tags = []
        for i in range(len(ring)):
            a, b, nv = p[i], q[i], normals[i]
            prov = ring.tags[i]
            order = ("obstacle2", "obstacle1") if prov is not None and prov.source == "obstacle2" else ("obstacle1", "obstacle2")
            tag = None
            for src in order:
                if src == "obstacle1":
                    n1 = _normal_on(O1, a, b, eps)
                    if n1 is not None and abs(float(nv @ n1) - 1.0) <= NORMAL_TOL:
                        tag = EdgeTag.SAME_AS_O1
                        break
                else:
                    n2 = _normal_on(O2, a, b, eps)
                    if n2 is not None and abs(float(nv @ n2) + 1.0) <= NORMAL_TOL:
                        tag = EdgeTag.OPPOSITE_OF_O2
                        break
            if tag is None:
                failures.append((a.tolist(), b.tolist(), prov))
                tags.append(None)
                continue
            tags.append(tag)
            out.append(EdgeClassification(tuple(a), tuple(b), tag, tuple(nv), prov.source if prov else ""))
        n = len(ring)
        for i in range(n):
            if tags[i] is not None and tags[i - 1] is not None and tags[i] != tags[i - 1]:
                c = tuple(p[i])
                out.append(EdgeClassification(c, c, EdgeTag.CORNER, (math.nan, math.nan), ""))
    if failures:
        raise GeometryError(f"{len(failures)} boundary edge(s) of V fail both normal tests: {failures[:3]}")
    return out


# --- lemma checks -----------------------------------------------------------


@dataclass
class LemmaReport:
    entries: list = field(default_factory=list)

    def add(self, lemma: str, instance: int, status: str, detail: str = "") -> None:
        self.entries.append({"lemma": lemma, "instance": instance, "status": status, "detail": detail})

    @property
    def passed(self) -> bool:
        return all(e["status"] != "FAIL" for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if e["status"] == "FAIL"]

    def count(self, lemma: str, status: str = "PASS") -> int:
        return sum(1 for e in self.entries if e["lemma"] == lemma and e["status"] == status)


def _edges_on(s: PolygonalSet, target: PolygonalSet, eps) -> np.ndarray:
    """Mask of edges of ``s`` lying on the boundary of ``target``."""
    p, q, _, _ = s.edges()
    if len(p) == 0 or target.is_empty:
        return np.zeros(len(p), dtype=bool)
    pts = np.vstack([p, q, 0.5 * (p + q)])
    d = target.distance_to_boundary(pts).reshape(3, -1)
    return np.all(d <= 10 * eps, axis=0)


def _shared_pieces(E: PolygonalSet, F: PolygonalSet, eps):
    """Positive-length collinear overlaps of boundary edges: (length, nE.nF)."""
    pe, qe, ne, _ = E.edges()
    pf, qf, nf, _ = F.edges()
    out = []
    if len(pe) == 0 or len(pf) == 0:
        return out
    tree = shapely.STRtree(shapely.linestrings(np.stack([pf, qf], axis=1)))
    for i in range(len(pe)):
        a, b = pe[i], qe[i]
        d = b - a
        L = float(np.hypot(*d))
        u = d / L
        for j in tree.query(LineString([a, b]), predicate="dwithin", distance=10 * eps):
            c, e = pf[j], qf[j]
            perp_c = abs((c - a)[0] * u[1] - (c - a)[1] * u[0])
            perp_e = abs((e - a)[0] * u[1] - (e - a)[1] * u[0])
            if perp_c > 10 * eps or perp_e > 10 * eps:
                continue
            t0, t1 = sorted([float((c - a) @ u), float((e - a) @ u)])
            overlap = min(L, t1) - max(0.0, t0)
            if overlap > 10 * eps:
                out.append((overlap, float(ne[i] @ nf[j])))
    return out


def check_appendix_lemmas(pairs: Sequence = (), scenes: Sequence = ()) -> LemmaReport:
    """Check the set-theoretic lemmas on concrete polygonal instances.

    ``pairs`` are ``(A, B)`` tuples used for the boundary-inclusion lemma
    (when its hypotheses hold) and for the normal-alignment lemma.
    ``scenes`` are ``(omega, O1, O2)`` triples with O1 not inside O2, used for
    the statements about G0 and V.
    """
    report = LemmaReport()
    for k, (A, B) in enumerate(pairs):
        eps = geom_eps(A, B)
        tol = 10 * eps * max(A.perimeter + B.perimeter, eps)
        # boundary inclusion forces equality
        inside = boolean_ops(A, B, "difference", eps).area <= tol
        connected = _single_component(A) and _single_component(B)
        bdry = bool(np.all(_edges_on(A, B, eps))) if not A.is_empty else False
        if inside and connected and bdry:
            sym = boolean_ops(B, A, "difference", eps).area + boolean_ops(A, B, "difference", eps).area
            report.add("boundary_inclusion", k, "PASS" if sym <= tol else "FAIL", f"symmetric difference {sym:.3e}")
        else:
            report.add("boundary_inclusion", k, "N/A", "hypotheses not met")
        # shared boundary normals are equal or opposite; opposite if disjoint
        pieces = _shared_pieces(A, B, eps)
        disjoint = boolean_ops(A, B, "intersection", eps).area <= tol
        bad = [pc for pc in pieces if not (abs(abs(pc[1]) - 1.0) <= NORMAL_TOL)]
        if disjoint:
            bad += [pc for pc in pieces if pc[1] > 0]
        status = "PASS" if not bad else "FAIL"
        report.add("normal_alignment", k, status, f"{len(pieces)} shared pieces, disjoint={disjoint}")
    for k, (omega, O1, O2) in enumerate(scenes):
        eps = geom_eps(omega, O1, O2)
        G0 = compute_G0(omega, O1, O2)
        V = compute_V(omega, G0, O1, O2)
        p, q, _, _ = G0.edges()
        on1 = _edges_on(G0, O1, eps)
        on2 = _edges_on(G0, O2, eps)
        length = float(np.sum(np.linalg.norm(q - p, axis=1)[on1 & ~on2]))
        report.add("g0_meets_first_obstacle", k, "PASS" if length > 0 else "FAIL", f"length {length:.6g}")
        p, q, _, _ = V.edges()
        off2 = ~_edges_on(V, O2, eps)
        on_g0 = _edges_on(V, G0, eps)
        on_o1 = _edges_on(V, O1, eps)
        ok = bool(np.all(on_g0[off2] & on_o1[off2])) and bool(off2.any())
        report.add("v_boundary_off_second", k, "PASS" if ok else "FAIL", f"{int(off2.sum())} edges off the second obstacle")
        try:
            classify_boundary(V, O1, O2)
            report.add("edge_classification", k, "PASS")
        except GeometryError as exc:
            report.add("edge_classification", k, "FAIL", str(exc))
    return report
