"""Conforming triangulations of multiply-connected polygonal domains.

The generator is a Delaunay-refinement mesher in the spirit of Ruppert's
algorithm: boundary segments are split until no point encroaches their
diametral circle (so they are Delaunay edges), and circumcenters of poor or
oversized triangles are inserted in batches until every triangle meets the
angle and size bounds.  Each batch is re-triangulated with Qhull.
"""
from __future__ import annotations

import hashlib
import io
import math
import os
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np
import shapely
from scipy.spatial import Delaunay, cKDTree
from shapely.geometry import Polygon as ShapelyPolygon

from .geometry import PolygonalSet, geom_eps

__all__ = [
    "BoundaryTag",
    "Mesh",
    "MeshError",
    "triangulate",
    "refine",
    "check_invariants",
    "role_of",
    "boundary_chain",
    "write_vtk",
    "cached_triangulate",
]

DEFAULT_MIN_ANGLE = 26.0
INVARIANT_MIN_ANGLE = 20.0
MAX_ROUNDS = 200


class MeshError(ValueError):
    pass


class BoundaryTag(IntEnum):
    OUTER = 1
    GAMMA = 2
    OBSTACLE = 3


def role_of(source: str) -> BoundaryTag:
    if source == "gamma":
        return BoundaryTag.GAMMA
    if source in ("omega", "outer"):
        return BoundaryTag.OUTER
    if source.startswith("obstacle"):
        return BoundaryTag.OBSTACLE
    raise MeshError(f"no boundary role for source {source!r}")


@dataclass(frozen=True, eq=False)
class Mesh:
    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    boundary_curves: np.ndarray
    curves: tuple = ()
    h: float = math.nan
    node_normals: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("nodes", "triangles", "boundary_edges", "boundary_tags", "boundary_curves"):
            arr = np.ascontiguousarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.node_normals is None:
            object.__setattr__(self, "node_normals", _node_normals(self.nodes, self.boundary_edges))
        self.node_normals.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def edges(self) -> np.ndarray:
        t = self.triangles
        e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edge_lengths(self) -> np.ndarray:
        e = self.edges()
        return np.linalg.norm(self.nodes[e[:, 1]] - self.nodes[e[:, 0]], axis=1)

    def min_angle(self) -> float:
        return float(np.degrees(_triangle_angles(self.nodes[self.triangles]).min()))

    def nodes_with_tag(self, *tags) -> np.ndarray:
        mask = np.isin(self.boundary_tags, [int(t) for t in tags])
        return np.unique(self.boundary_edges[mask])

    def boundary_loops(self) -> int:
        return len(_loops(self.boundary_edges))

    def boundary_mass(self, *tags) -> np.ndarray:
        """Lumped boundary mass per node over edges with the given tags."""
        mask = np.isin(self.boundary_tags, [int(t) for t in tags])
        e = self.boundary_edges[mask]
        L = np.linalg.norm(self.nodes[e[:, 1]] - self.nodes[e[:, 0]], axis=1)
        m = np.zeros(self.n_nodes)
        np.add.at(m, e[:, 0], 0.5 * L)
        np.add.at(m, e[:, 1], 0.5 * L)
        return m

    def digest(self) -> str:
        hsh = hashlib.sha256()
        for arr in (self.nodes, self.triangles, self.boundary_edges, self.boundary_tags):
            hsh.update(np.ascontiguousarray(arr).tobytes())
        return hsh.hexdigest()


def _triangle_angles(p: np.ndarray) -> np.ndarray:
    a = np.linalg.norm(p[:, 1] - p[:, 2], axis=1)
    b = np.linalg.norm(p[:, 2] - p[:, 0], axis=1)
    c = np.linalg.norm(p[:, 0] - p[:, 1], axis=1)
    A = np.arccos(np.clip((b * b + c * c - a * a) / (2 * b * c), -1, 1))
    B = np.arccos(np.clip((a * a + c * c - b * b) / (2 * a * c), -1, 1))
    return np.column_stack([A, B, np.pi - A - B])


def _circumcircles(p: np.ndarray):
    ax, ay = p[:, 0, 0], p[:, 0, 1]
    bx, by = p[:, 1, 0] - ax, p[:, 1, 1] - ay
    cx, cy = p[:, 2, 0] - ax, p[:, 2, 1] - ay
    d = 2.0 * (bx * cy - by * cx)
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return np.column_stack([ux + ax, uy + ay]), np.hypot(ux, uy)


def _node_normals(nodes, bedges) -> np.ndarray:
    """Outward unit normal at boundary nodes: bisector of the two edge normals."""
    nrm = np.full(nodes.shape, np.nan)
    if len(bedges) == 0:
        return nrm
    d = nodes[bedges[:, 1]] - nodes[bedges[:, 0]]
    en = np.column_stack([d[:, 1], -d[:, 0]])
    en /= np.linalg.norm(en, axis=1)[:, None]
    acc = np.zeros(nodes.shape)
    np.add.at(acc, bedges[:, 0], en)
    np.add.at(acc, bedges[:, 1], en)
    idx = np.unique(bedges)
    nrm[idx] = acc[idx] / np.linalg.norm(acc[idx], axis=1)[:, None]
    return nrm


def _loops(bedges: np.ndarray) -> list[list[int]]:
    nxt = {int(a): int(b) for a, b in bedges}
    seen, loops = set(), []
    for start in sorted(nxt):
        if start in seen:
            continue
        loop, cur = [], start
        while cur not in seen:
            seen.add(cur)
            loop.append(cur)
            cur = nxt[cur]
        loops.append(loop)
    return loops


def _on_curve(curve, a, b, t):
    """Points at fractions ``t`` between a and b along the circle ``curve``."""
    cx, cy, R = curve
    a0 = math.atan2(a[1] - cy, a[0] - cx)
    a1 = math.atan2(b[1] - cy, b[0] - cx)
    da = (a1 - a0 + math.pi) % (2 * math.pi) - math.pi
    ang = a0 + np.asarray(t) * da
    return np.column_stack([cx + R * np.cos(ang), cy + R * np.sin(ang)])


class _Builder:
    """Mutable point/segment store used during generation only."""

    def __init__(self, domain: PolygonalSet, h: float):
        self.h = h
        self.points: list = []
        self.n_boundary = 0
        self.segments: list = []  # [a, b, tag, curve_id, loop_id]
        self.curves: list = []
        self.loop_shape: list = []  # per polygon: (outer loop id, [hole loop ids])
        loop_id = 0
        for poly in domain.polygons:
            ids = []
            for ring in poly:
                self._add_loop(ring, loop_id)
                ids.append(loop_id)
                loop_id += 1
            self.loop_shape.append(ids)
        self.n_boundary = len(self.points)

    def _curve_id(self, curve):
        if curve is None:
            return -1
        if curve not in self.curves:
            self.curves.append(curve)
        return self.curves.index(curve)

    def _add_loop(self, ring, loop_id):
        p, q = ring.segments()
        start = len(self.points)
        for i in range(len(ring)):
            tag = ring.tags[i]
            cid = self._curve_id(tag.curve)
            L = float(np.linalg.norm(q[i] - p[i]))
            k = max(1, math.ceil(L / self.h - 1e-9))
            t = np.arange(k) / k
            if cid >= 0:
                pts = _on_curve(tag.curve, p[i], q[i], t)
                pts[0] = p[i]
            else:
                pts = p[i] + t[:, None] * (q[i] - p[i])
            base = len(self.points)
            self.points.extend(pts)
            for j in range(k):
                self.segments.append([base + j, base + j + 1, int(role_of(tag.source)), cid, loop_id])
        self.segments[-1][1] = start

    def loop_coords(self, loop_id):
        segs = [s for s in self.segments if s[4] == loop_id]
        nxt = {s[0]: s[1] for s in segs}
        start = min(nxt)
        order, cur = [start], nxt[start]
        while cur != start:
            order.append(cur)
            cur = nxt[cur]
        return np.asarray([self.points[i] for i in order])

    def domain_shape(self):
        polys = []
        for ids in self.loop_shape:
            polys.append(ShapelyPolygon(self.loop_coords(ids[0]), [self.loop_coords(i) for i in ids[1:]]))
        return shapely.union_all(polys) if len(polys) > 1 else polys[0]

    def split(self, k):
        a, b, tag, cid, lid = self.segments[k]
        pa, pb = np.asarray(self.points[a]), np.asarray(self.points[b])
        if cid >= 0:
            m = _on_curve(self.curves[cid], pa, pb, [0.5])[0]
        else:
            m = 0.5 * (pa + pb)
        self.points.append(m)
        new = len(self.points) - 1
        self.segments[k] = [a, new, tag, cid, lid]
        self.segments.append([new, b, tag, cid, lid])

    def split_many(self, ks):
        """Split segments ``ks``; a split curve segment splits its whole curve.

        Keeping the nodes of a circle equally spaced in angle makes the
        bisector node normals exactly radial.
        """
        cids = {self.segments[k][3] for k in ks} - {-1}
        todo = {k for k in ks if self.segments[k][3] < 0}
        todo |= {k for k, s in enumerate(self.segments) if s[3] in cids}
        for k in sorted(todo, reverse=True):
            self.split(k)


def _encroached(pts: np.ndarray, segs: np.ndarray, tree: cKDTree) -> list[int]:
    a, b = pts[segs[:, 0]], pts[segs[:, 1]]
    mid = 0.5 * (a + b)
    rad = 0.5 * np.linalg.norm(b - a, axis=1)
    hits = tree.query_ball_point(mid, rad * (1 + 1e-9))
    out = []
    for k, lst in enumerate(hits):
        for j in lst:
            if j != segs[k, 0] and j != segs[k, 1]:
                out.append(k)
                break
    return out


def triangulate(domain: PolygonalSet, h: float, min_angle: float = DEFAULT_MIN_ANGLE,
                max_radius: float | None = None) -> Mesh:
    """Quality triangulation of ``domain`` with target edge length ``h``.

    Boundary roles come from edge provenance: ``omega`` edges become OUTER,
    ``gamma`` edges GAMMA and ``obstacle*`` edges OBSTACLE.  Edges that
    approximate a circle get their extra boundary nodes on the circle.
    """
    if domain.is_empty:
        raise MeshError("empty domain")
    try:
        domain.validate()
    except ValueError as exc:
        raise MeshError(str(exc)) from exc
    if not (h > 0):
        raise MeshError("h must be positive")
    shortest = min(float(r.edge_lengths().min()) for r in domain.rings())
    if not h < 4 * shortest:
        raise MeshError(f"h={h} is not below 4x the shortest input edge ({shortest:.4g})")
    R_max = 0.7 * h if max_radius is None else max_radius
    B = _Builder(domain, h)
    shape = B.domain_shape()
    eps = geom_eps(domain)

    # interior seeds on a hexagonal lattice, kept clear of the boundary
    x0, y0, x1, y1 = shape.bounds
    dy = h * math.sqrt(3) / 2
    ys = np.arange(y0 + dy / 2, y1, dy)
    seeds = []
    for j, y in enumerate(ys):
        xs = np.arange(x0 + (h / 2 if j % 2 else 0.0), x1, h)
        seeds.append(np.column_stack([xs, np.full_like(xs, y)]))
    seeds = np.vstack(seeds) if seeds else np.zeros((0, 2))
    if len(seeds):
        inside = shapely.contains_xy(shape, seeds[:, 0], seeds[:, 1])
        seeds = seeds[inside]
        far = shapely.distance(shape.boundary, shapely.points(seeds)) >= 0.6 * h
        seeds = seeds[far]
    B.points.extend(seeds)

    min_rad = math.radians(min_angle)
    for _ in range(MAX_ROUNDS):
        # make every boundary segment a Delaunay edge
        while True:
            pts = np.asarray(B.points)
            segs = np.asarray([s[:2] for s in B.segments])
            enc = _encroached(pts, segs, cKDTree(pts))
            if not enc:
                break
            B.split_many(enc)
        shape = B.domain_shape()
        pts = np.asarray(B.points)
        tri = Delaunay(pts).simplices
        cen = pts[tri].mean(axis=1)
        tri = tri[shapely.contains_xy(shape, cen[:, 0], cen[:, 1])]
        P = pts[tri]
        ang = _triangle_angles(P).min(axis=1)
        cc, rad = _circumcircles(P)
        bad = np.nonzero((ang < min_rad) | (rad > R_max))[0]
        if len(bad) == 0:
            break
        order = bad[np.lexsort((bad, -rad[bad]))]
        segs = np.asarray([s[:2] for s in B.segments])
        smid = 0.5 * (pts[segs[:, 0]] + pts[segs[:, 1]])
        srad = 0.5 * np.linalg.norm(pts[segs[:, 1]] - pts[segs[:, 0]], axis=1)
        stree = cKDTree(smid)
        srad_max = float(srad.max())
        accepted: list = []
        to_split: set = set()
        acc_arr = np.zeros((0, 2))
        acc_r = np.zeros(0)
        for k in order:
            c, r = cc[k], rad[k]
            near = [j for j in stree.query_ball_point(c, srad_max) if np.linalg.norm(c - smid[j]) <= srad[j] * (1 + 1e-9)]
            if near:
                to_split.update(near)
                continue
            if not shapely.contains_xy(shape, c[0], c[1]):
                continue
            if len(acc_arr):
                d = np.linalg.norm(acc_arr - c, axis=1)
                if np.any(d < 0.5 * np.minimum(acc_r, r)):
                    continue
            accepted.append(c)
            acc_arr = np.vstack([acc_arr, c])
            acc_r = np.append(acc_r, r)
        if not accepted and not to_split:
            raise MeshError("quality refinement stalled")
        B.split_many(to_split)
        B.points.extend(accepted)
    else:
        raise MeshError(f"quality target not reached after {MAX_ROUNDS} rounds")

    # compact and build the mesh
    used = np.unique(tri)
    remap = -np.ones(len(pts), dtype=np.int64)
    remap[used] = np.arange(len(used))
    nodes = pts[used]
    tris = remap[tri]
    d1 = nodes[tris[:, 1]] - nodes[tris[:, 0]]
    d2 = nodes[tris[:, 2]] - nodes[tris[:, 0]]
    neg = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] < 0
    tris[neg] = tris[neg][:, [0, 2, 1]]
    segs = np.asarray(B.segments)
    bedges = remap[segs[:, :2]]
    if np.any(bedges < 0):
        raise MeshError("boundary point dropped from the triangulation")
    mesh = Mesh(nodes, tris, bedges, segs[:, 2], segs[:, 3], tuple(B.curves), h)
    _check_boundary_conformity(mesh)
    check_invariants(mesh, min_angle=min(INVARIANT_MIN_ANGLE, min_angle))
    return mesh


def _check_boundary_conformity(mesh: Mesh) -> None:
    t = mesh.triangles
    e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    key = np.sort(e, axis=1)
    uniq, cnt = np.unique(key, axis=0, return_counts=True)
    single = {tuple(x) for x in uniq[cnt == 1]}
    bnd = {tuple(sorted(x)) for x in mesh.boundary_edges.tolist()}
    if single != bnd:
        raise MeshError("triangulation boundary does not reproduce the input segments")


def check_invariants(mesh: Mesh, min_angle: float = INVARIANT_MIN_ANGLE) -> None:
    """Raise MeshError unless every structural invariant holds."""
    if np.any(mesh.areas() <= 0):
        raise MeshError("triangle with non-positive orientation")
    _check_boundary_conformity(mesh)
    V, E, F = mesh.n_nodes, len(mesh.edges()), mesh.n_triangles
    b = mesh.boundary_loops()
    if V - E + F != 2 - b:
        raise MeshError(f"Euler relation fails: V-E+F={V - E + F}, loops={b}")
    ang = mesh.min_angle()
    if ang < min_angle - 1e-9:
        raise MeshError(f"minimum angle {ang:.2f} below {min_angle}")
    # boundary orientation: domain on the left of each boundary edge
    t = mesh.triangles
    n = mesh.n_nodes
    directed = np.concatenate([t[:, k] * n + t[:, (k + 1) % 3] for k in range(3)])
    be = mesh.boundary_edges
    if not np.all(np.isin(be[:, 0] * n + be[:, 1], directed)):
        raise MeshError("boundary edge not oriented with the domain on its left")
    nn = mesh.node_normals[mesh.nodes_with_tag(BoundaryTag.OBSTACLE)]
    if len(nn) and np.max(np.abs(np.linalg.norm(nn, axis=1) - 1.0)) > 1e-12:
        raise MeshError("obstacle node normal is not unit length")


def refine(mesh: Mesh) -> Mesh:
    """Uniform red refinement: every triangle is split into four.

    New nodes on boundary edges that approximate a circle are placed on the
    circle; other boundary midpoints stay on the input polygon.
    """
    t = mesh.triangles
    n = mesh.n_nodes
    e_all = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    key = np.sort(e_all, axis=1)
    uniq, inv = np.unique(key, axis=0, return_inverse=True)
    inv = inv.reshape(3, -1)
    mids = 0.5 * (mesh.nodes[uniq[:, 0]] + mesh.nodes[uniq[:, 1]])
    nodes = np.vstack([mesh.nodes, mids])
    m01, m12, m20 = n + inv[0], n + inv[1], n + inv[2]
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    tris = np.vstack([
        np.column_stack([a, m01, m20]),
        np.column_stack([m01, b, m12]),
        np.column_stack([m20, m12, c]),
        np.column_stack([m01, m12, m20]),
    ])
    be = mesh.boundary_edges
    codes = uniq[:, 0] * n + uniq[:, 1]
    bs = np.sort(be, axis=1)
    mid_ids = n + np.searchsorted(codes, bs[:, 0] * n + bs[:, 1])
    for k, cid in enumerate(mesh.boundary_curves):
        if cid >= 0:
            cx, cy, R = mesh.curves[cid]
            v = nodes[mid_ids[k]] - (cx, cy)
            nodes[mid_ids[k]] = (cx, cy) + R * v / np.linalg.norm(v)
    bedges = np.vstack([np.column_stack([be[:, 0], mid_ids]), np.column_stack([mid_ids, be[:, 1]])])
    btags = np.concatenate([mesh.boundary_tags, mesh.boundary_tags])
    bcurves = np.concatenate([mesh.boundary_curves, mesh.boundary_curves])
    order = np.argsort(np.concatenate([2 * np.arange(len(be)), 2 * np.arange(len(be)) + 1]), kind="stable")
    out = Mesh(nodes, tris, bedges[order], btags[order], bcurves[order], mesh.curves, mesh.h / 2)
    check_invariants(out)
    return out


def boundary_chain(mesh: Mesh, *tags):
    """Boundary nodes carrying ``tags`` in traversal order with arc length.

    Open chains start at their free end; a closed loop starts at its node of
    largest x (smallest y on ties) so the origin does not depend on numbering.
    """
    mask = np.isin(mesh.boundary_tags, [int(t) for t in tags])
    e = mesh.boundary_edges[mask]
    if len(e) == 0:
        raise MeshError(f"no boundary edges with tags {tags}")
    nxt = {int(a): int(b) for a, b in e}
    heads = set(nxt) - set(nxt.values())
    chains = []
    remaining = set(nxt)
    for start in sorted(heads, key=lambda i: tuple(mesh.nodes[i])):
        chain = [start]
        while chain[-1] in nxt:
            remaining.discard(chain[-1])
            chain.append(nxt[chain[-1]])
        chains.append(chain)
    while remaining:
        loop = [i for i in remaining]
        pts = mesh.nodes[loop]
        j = np.lexsort((pts[:, 1], -pts[:, 0]))[0]
        start = loop[j]
        chain = [start]
        cur = nxt[start]
        remaining.discard(start)
        while cur != start:
            chain.append(cur)
            remaining.discard(cur)
            cur = nxt[cur]
        chain.append(start)
        chains.append(chain)
    nodes, arcs, offset = [], [], 0.0
    for chain in chains:
        seg = np.linalg.norm(np.diff(mesh.nodes[chain], axis=0), axis=1)
        s = offset + np.concatenate([[0.0], np.cumsum(seg)])
        if chain[0] == chain[-1]:
            chain, s = chain[:-1], s[:-1]
        nodes.extend(chain)
        arcs.extend(s)
        offset = s[-1] if len(s) else offset
    return np.asarray(nodes, dtype=np.int64), np.asarray(arcs)


def write_vtk(path, mesh: Mesh, point_data: dict | None = None, cell_data: dict | None = None,
              title: str = "signorini_lab") -> None:
    """Legacy ASCII VTK unstructured grid (triangles, cell type 5)."""
    buf = io.StringIO()
    buf.write("# vtk DataFile Version 3.0\n")
    buf.write(f"{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
    buf.write(f"POINTS {mesh.n_nodes} double\n")
    for x, y in mesh.nodes.tolist():
        buf.write(f"{x!r} {y!r} 0.0\n")
    m = mesh.n_triangles
    buf.write(f"CELLS {m} {4 * m}\n")
    for a, b, c in mesh.triangles:
        buf.write(f"3 {a} {b} {c}\n")
    buf.write(f"CELL_TYPES {m}\n")
    buf.write("5\n" * m)
    for header, count, data in (("POINT_DATA", mesh.n_nodes, point_data), ("CELL_DATA", m, cell_data)):
        if not data:
            continue
        buf.write(f"{header} {count}\n")
        for name, values in data.items():
            values = np.asarray(values, dtype=float).tolist()
            if not isinstance(values[0], list):
                buf.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                buf.writelines(f"{v!r}\n" for v in values)
            elif len(values[0]) == 2:
                buf.write(f"VECTORS {name} double\n")
                buf.writelines(f"{v[0]!r} {v[1]!r} 0.0\n" for v in values)
            else:
                buf.write(f"TENSORS {name} double\n")
                for v in values:
                    buf.write(f"{v[0]!r} {v[2]!r} 0.0\n{v[2]!r} {v[1]!r} 0.0\n0.0 0.0 0.0\n")
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _domain_digest(domain: PolygonalSet) -> str:
    hsh = hashlib.sha256()
    for ring in domain.rings():
        hsh.update(np.ascontiguousarray(ring.vertices).tobytes())
        hsh.update(repr(ring.tags).encode())
    return hsh.hexdigest()


def cached_triangulate(domain: PolygonalSet, h: float, cache_dir=None, key: str = "") -> Mesh:
    """triangulate() with an on-disk .npz cache keyed by domain digest, key and h."""
    if cache_dir is None:
        return triangulate(domain, h)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    digest = hashlib.sha256(f"{_domain_digest(domain)}|{key}|{h!r}".encode()).hexdigest()[:24]
    path = cache_dir / f"mesh-{digest}.npz"
    if path.exists():
        z = np.load(path, allow_pickle=False)
        curves = tuple(tuple(float(v) for v in row) for row in z["curves"])
        return Mesh(z["nodes"], z["triangles"], z["bedges"], z["btags"], z["bcurves"], curves, float(z["h"]))
    mesh = triangulate(domain, h)
    tmp = path.with_suffix(".tmp.npz")
    np.savez(tmp, nodes=mesh.nodes, triangles=mesh.triangles, bedges=mesh.boundary_edges,
             btags=mesh.boundary_tags, bcurves=mesh.boundary_curves,
             curves=np.asarray(mesh.curves, dtype=float).reshape(-1, 3), h=mesh.h)
    os.replace(tmp, path)
    return mesh
