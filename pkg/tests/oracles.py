"""Independent reference computations used by the tests.

Nothing here calls into the package's geometry or solver code: rasterization
is a numpy scanline fill, component labelling goes through scipy.ndimage, and
the closed forms are written out by hand.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage


class Grid:
    """n x n pixel grid over a square box; pixel (i, j) has center (x_j, y_i)."""

    def __init__(self, lo: float, hi: float, n: int):
        self.lo, self.hi, self.n = lo, hi, n
        self.dx = (hi - lo) / n

    def fill(self, rings) -> np.ndarray:
        """Even-odd scanline fill of closed rings (outer rings and holes), sampled at pixel centers."""
        n = self.n
        yc = self.lo + (np.arange(n) + 0.5) * self.dx
        parity = np.zeros((n, n + 1), dtype=np.int64)
        for ring in rings:
            a = np.asarray(ring, dtype=float)
            b = np.roll(a, -1, axis=0)
            # half-open rule: an edge crosses row y iff exactly one endpoint has y_end <= y
            cross = (a[None, :, 1] <= yc[:, None]) != (b[None, :, 1] <= yc[:, None])
            row, edge = np.nonzero(cross)
            t = (yc[row] - a[edge, 1]) / (b[edge, 1] - a[edge, 1])
            x = a[edge, 0] + t * (b[edge, 0] - a[edge, 0])
            col = np.clip(np.ceil((x - self.lo) / self.dx - 0.5).astype(np.int64), 0, n)
            np.add.at(parity, (row, col), 1)
        return (np.cumsum(parity, axis=1)[:, :n] % 2).astype(bool)

    def lookup(self, mask: np.ndarray, pts: np.ndarray) -> np.ndarray:
        j = np.floor((pts[:, 0] - self.lo) / self.dx).astype(int)
        i = np.floor((pts[:, 1] - self.lo) / self.dx).astype(int)
        ok = (i >= 0) & (i < self.n) & (j >= 0) & (j < self.n)
        out = np.zeros(len(pts), dtype=bool)
        out[ok] = mask[i[ok], j[ok]]
        return out


def ngon(center, radius, n, phase=0.0):
    t = phase + 2 * np.pi * np.arange(n) / n
    return np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])


def pixel_area(rings, lo=-1.0, hi=1.0, n=4096) -> float:
    g = Grid(lo, hi, n)
    return float(g.fill(rings).sum()) * g.dx**2


def _neighbours(mask: np.ndarray) -> np.ndarray:
    """Pixels 4-adjacent to ``mask``."""
    out = np.zeros_like(mask)
    out[1:] |= mask[:-1]
    out[:-1] |= mask[1:]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    return out


def flood_fill_sets(omega_rings, o1_rings, o2_rings, n=2048, lo=-1.05, hi=1.05):
    """Pixel versions of G0 (free component reaching the outer boundary) and V.

    The box margin outside omega is treated as free space, so G0 is the
    component of the obstacle complement holding the box corner, cut back to
    omega.  V is the largest component of (omega minus G0 minus O2) adjacent to G0.
    """
    g = Grid(lo, hi, n)
    om, o1, o2 = g.fill(omega_rings), g.fill(o1_rings), g.fill(o2_rings)
    lab, _ = ndimage.label(~(o1 | o2))
    G0 = (lab == lab[0, 0]) & om
    rest = om & ~G0 & ~o2
    lab2, k2 = ndimage.label(rest)
    cand = np.unique(lab2[rest & _neighbours(G0)])
    cand = cand[cand > 0]
    if len(cand) == 0:
        return g, G0, np.zeros_like(G0)
    sizes = np.bincount(lab2.ravel(), minlength=k2 + 1)
    best = cand[np.argmax(sizes[cand])]
    return g, G0, lab2 == best


def distance_to_rings(pts: np.ndarray, rings) -> np.ndarray:
    """Euclidean distance from each point to the union of ring edges."""
    d = np.full(len(pts), np.inf)
    for ring in rings:
        a = np.asarray(ring, dtype=float)
        b = np.roll(a, -1, axis=0)
        e = b - a
        w = pts[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("kmd,md->km", w, e) / np.einsum("md,md->m", e, e), 0.0, 1.0)
        proj = a[None] + t[..., None] * e[None]
        d = np.minimum(d, np.min(np.linalg.norm(pts[:, None, :] - proj, axis=2), axis=1))
    return d


def outward_normals(ring: np.ndarray) -> np.ndarray:
    """Outward normals of a counterclockwise ring's edges."""
    e = np.roll(ring, -1, axis=0) - ring
    n = np.column_stack([e[:, 1], -e[:, 0]])
    return n / np.linalg.norm(n, axis=1)[:, None]


def radial_annulus(r, r0=0.3, R=1.0, f=-1.0):
    """u = f ln(r/r0)/ln(R/r0) for the fully active annulus; its obstacle flux and Γ flux."""
    L = math.log(R / r0)
    u = f * np.log(np.asarray(r) / r0) / L
    return u, -f / (r0 * L), f / (R * L)


def p1_l2(nodes, triangles, v) -> float:
    """Exact L2 norm of a P1 interpolant (consistent mass)."""
    p = nodes[triangles]
    area = 0.5 * np.abs((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                        - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))
    vt = np.asarray(v)[triangles]
    return float(np.sqrt(np.sum(area / 12.0 * ((vt**2).sum(1) + vt.sum(1) ** 2))))


def rigid_lstsq(pts: np.ndarray, u: np.ndarray):
    """Least-squares (c, omega) for u ≈ c + omega * (-y, x), straight from the normal equations."""
    n = len(pts)
    M = np.zeros((2 * n, 3))
    M[0::2, 0] = 1.0
    M[1::2, 1] = 1.0
    M[0::2, 2] = -pts[:, 1]
    M[1::2, 2] = pts[:, 0]
    sol, *_ = np.linalg.lstsq(M, np.asarray(u).reshape(-1), rcond=None)
    res = np.max(np.linalg.norm((M @ sol - np.asarray(u).reshape(-1)).reshape(-1, 2), axis=1))
    return sol[:2], sol[2], res
