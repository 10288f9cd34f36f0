"""Exact integration of piecewise-linear fields over a polygon cut from a mesh.

For P1 fields every integrand of the Gauss-Green checks is linear along
straight pieces and constant per triangle, so the integrals below are exact
up to roundoff once the cut geometry is known.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import shapely
from matplotlib.tri import Triangulation

from .geometry import PolygonalSet
from .mesh import Mesh

__all__ = ["CutGeometry", "ContainmentError", "cut_geometry", "interpolate_p1", "recovered_nodal", "boundary_values"]


class ContainmentError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CutGeometry:
    """V cut by a mesh.

    area: |T ∩ V| per triangle.
    boundary_*: pieces of ∂V, each inside one triangle, with outward normal of V;
    ``boundary_edge`` is the mesh boundary edge carrying the piece (-1 if the
    piece crosses the interior) and ``boundary_param`` the position of the
    piece midpoint along that edge.
    interior_*: pieces of interior mesh edges inside V; ``normal`` points from
    triangle ``left`` to triangle ``right``.
    """

    area: np.ndarray
    boundary_tri: np.ndarray
    boundary_mid: np.ndarray
    boundary_len: np.ndarray
    boundary_normal: np.ndarray
    boundary_edge: np.ndarray
    boundary_param: np.ndarray
    interior_left: np.ndarray
    interior_right: np.ndarray
    interior_mid: np.ndarray
    interior_len: np.ndarray
    interior_normal: np.ndarray
    v_area: float


def _triangle_polys(mesh: Mesh):
    p = mesh.nodes[mesh.triangles]
    return shapely.polygons(np.concatenate([p, p[:, :1]], axis=1))


def _edge_owners(mesh: Mesh):
    """Interior edges (a, b) with left triangle (a->b counterclockwise) and right triangle."""
    t = mesh.triangles
    n = mesh.n_nodes
    a = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
    b = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
    tri = np.tile(np.arange(len(t)), 3)
    code = a * n + b
    rev = b * n + a
    order = np.argsort(code)
    pos = np.searchsorted(code[order], rev)
    pos = np.minimum(pos, len(code) - 1)
    match = code[order][pos] == rev
    keep = match & (a < b)
    return a[keep], b[keep], tri[keep], tri[order][pos][keep]


def _locate(finder, pts):
    return np.asarray(finder(pts[:, 0], pts[:, 1]), dtype=np.int64)


def cut_geometry(mesh: Mesh, V: PolygonalSet, rtol: float = 1e-8) -> CutGeometry:
    shape = V.to_shapely()
    v_area = float(shape.area)
    polys = _triangle_polys(mesh)
    tree = shapely.STRtree(polys)
    cand = tree.query(shape)
    area = np.zeros(mesh.n_triangles)
    area[cand] = shapely.area(shapely.intersection(polys[cand], shape))
    if abs(area.sum() - v_area) > rtol * max(v_area, 1e-300) + 1e-14:
        raise ContainmentError(
            f"V is not contained in the mesh domain (|V|={v_area:.12g}, covered {area.sum():.12g})")

    tri_obj = Triangulation(mesh.nodes[:, 0], mesh.nodes[:, 1], mesh.triangles)
    finder = tri_obj.get_trifinder()
    h_loc = float(np.sqrt(np.median(mesh.areas())))
    delta = 1e-7 * h_loc

    # pieces of ∂V: split each V edge at crossings with mesh edges
    ea, eb, left, right = _edge_owners(mesh)
    be = mesh.boundary_edges
    all_a = np.concatenate([ea, be[:, 0]])
    all_b = np.concatenate([eb, be[:, 1]])
    P, Q = mesh.nodes[all_a], mesh.nodes[all_b]
    etree = shapely.STRtree(shapely.linestrings(np.stack([P, Q], axis=1)))
    b_tri, b_mid, b_len, b_nrm = [], [], [], []

    def cat(parts_, shape_):
        return np.concatenate(parts_) if parts_ else np.zeros(shape_)

    for ring in V.rings():
        p0, p1 = ring.segments()
        normals = ring.normals()
        for a, b, nv in zip(p0, p1, normals):
            d = b - a
            idx = etree.query(shapely.linestrings([a, b]))
            ts = [0.0, 1.0]
            if len(idx):
                e = Q[idx] - P[idx]
                w = P[idx] - a
                den = d[0] * e[:, 1] - d[1] * e[:, 0]
                ok = np.abs(den) > 1e-14 * np.linalg.norm(d) * np.linalg.norm(e, axis=1)
                t = np.where(ok, (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / np.where(ok, den, 1), -1)
                s = np.where(ok, (w[:, 0] * d[1] - w[:, 1] * d[0]) / np.where(ok, den, 1), -1)
                hit = ok & (t > 0) & (t < 1) & (s >= -1e-12) & (s <= 1 + 1e-12)
                ts.extend(t[hit].tolist())
            ts = np.unique(np.asarray(ts))
            L = np.linalg.norm(d) * np.diff(ts)
            keep = L > 1e-14 * np.linalg.norm(d)
            tm = 0.5 * (ts[:-1] + ts[1:])[keep]
            mids = a + tm[:, None] * d
            tris = _locate(finder, mids - delta * nv)
            if np.any(tris < 0):
                raise ContainmentError("a piece of the boundary of V lies outside the mesh")
            b_tri.append(tris)
            b_mid.append(mids)
            b_len.append(L[keep])
            b_nrm.append(np.repeat(nv[None, :], len(tm), axis=0))

    bmid = cat(b_mid, (0, 2))
    bedge = -np.ones(len(bmid), dtype=np.int64)
    bparam = np.zeros(len(bmid))
    if len(bmid) and len(be):
        bl = shapely.linestrings(np.stack([mesh.nodes[be[:, 0]], mesh.nodes[be[:, 1]]], axis=1))
        pi, ei = shapely.STRtree(bl).query_nearest(shapely.points(bmid), max_distance=1e-9 * h_loc)
        bedge[pi] = ei
        a0, a1 = mesh.nodes[be[ei, 0]], mesh.nodes[be[ei, 1]]
        d01 = a1 - a0
        bparam[pi] = np.einsum("kd,kd->k", bmid[pi] - a0, d01) / np.einsum("kd,kd->k", d01, d01)

    # interior mesh edges clipped to V; drop pieces lying on ∂V
    lines = shapely.linestrings(np.stack([mesh.nodes[ea], mesh.nodes[eb]], axis=1))
    ecand = shapely.STRtree(lines).query(shape)
    clipped = shapely.intersection(lines[ecand], shape)
    parts, owner = shapely.get_parts(clipped, return_index=True)
    owner = ecand[owner]
    is_line = (shapely.get_type_id(parts) == 1) & ~shapely.is_empty(parts)
    parts, owner = parts[is_line], owner[is_line]
    plen = shapely.length(parts)
    ends0 = shapely.get_coordinates(shapely.get_point(parts, 0))
    ends1 = shapely.get_coordinates(shapely.get_point(parts, -1))
    pmid = 0.5 * (ends0 + ends1)
    on_bd = shapely.distance(shape.boundary, shapely.points(pmid)) < 1e-10 * h_loc
    sel = (plen > 1e-14 * h_loc) & ~on_bd
    owner, plen, pmid = owner[sel], plen[sel], pmid[sel]
    d = mesh.nodes[eb[owner]] - mesh.nodes[ea[owner]]
    # a->b is counterclockwise in ``left`` so its outward normal is the right-hand normal
    nrm = np.column_stack([d[:, 1], -d[:, 0]]) / np.linalg.norm(d, axis=1)[:, None]

    return CutGeometry(
        area=area,
        boundary_tri=cat(b_tri, (0,)).astype(np.int64),
        boundary_mid=bmid,
        boundary_len=cat(b_len, (0,)),
        boundary_normal=cat(b_nrm, (0, 2)),
        boundary_edge=bedge,
        boundary_param=bparam,
        interior_left=left[owner],
        interior_right=right[owner],
        interior_mid=pmid,
        interior_len=plen,
        interior_normal=nrm,
        v_area=v_area,
    )


def interpolate_p1(mesh: Mesh, tri: np.ndarray, pts: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Evaluate the P1 interpolant of nodal ``values`` at points inside triangles ``tri``."""
    p = mesh.nodes[mesh.triangles[tri]]
    v0, v1, v2 = p[:, 0], p[:, 1], p[:, 2]
    det = (v1[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1]) - (v2[:, 0] - v0[:, 0]) * (v1[:, 1] - v0[:, 1])
    l1 = ((pts[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1]) - (v2[:, 0] - v0[:, 0]) * (pts[:, 1] - v0[:, 1])) / det
    l2 = ((v1[:, 0] - v0[:, 0]) * (pts[:, 1] - v0[:, 1]) - (pts[:, 0] - v0[:, 0]) * (v1[:, 1] - v0[:, 1])) / det
    lam = np.column_stack([1 - l1 - l2, l1, l2])
    vals = values[mesh.triangles[tri]]
    if vals.ndim == 2:
        return np.einsum("mk,mk->m", lam, vals)
    return np.einsum("mk,mkd->md", lam, vals)


def recovered_nodal(mesh: Mesh, element_values: np.ndarray) -> np.ndarray:
    """Area-weighted nodal average of per-triangle values (gradient recovery)."""
    area = mesh.areas()
    t = mesh.triangles
    shape = (mesh.n_nodes,) + element_values.shape[1:]
    acc = np.zeros(shape)
    w = np.zeros(mesh.n_nodes)
    weighted = element_values * area.reshape((-1,) + (1,) * (element_values.ndim - 1))
    for k in range(3):
        np.add.at(acc, t[:, k], weighted)
        np.add.at(w, t[:, k], area)
    return acc / w.reshape((-1,) + (1,) * (acc.ndim - 1))


def boundary_values(mesh: Mesh, cut: CutGeometry, nodal: np.ndarray, interior: np.ndarray) -> np.ndarray:
    """Per-piece values: ``interior`` by default, replaced on pieces lying on
    mesh boundary edges by the linear interpolation of ``nodal`` along the edge."""
    out = np.array(interior, dtype=float, copy=True)
    on = cut.boundary_edge >= 0
    if np.any(on):
        e = mesh.boundary_edges[cut.boundary_edge[on]]
        t = cut.boundary_param[on]
        t = t.reshape((-1,) + (1,) * (nodal.ndim - 1))
        out[on] = (1 - t) * nodal[e[:, 0]] + t * nodal[e[:, 1]]
    return out
