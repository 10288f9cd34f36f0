"""Sampled boundary traces (flux or traction) and their comparison."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["BoundaryMeasurement", "MeasurementGap", "compare"]


@dataclass(frozen=True, eq=False)
class BoundaryMeasurement:
    """Samples (arc length, value) along a boundary chain.

    ``values`` is (k,) for a scalar flux and (k, 2) for a traction vector;
    ``normal`` and ``tangential`` hold the traction decomposition when known.
    """

    arc: np.ndarray
    values: np.ndarray
    quantity: str
    boundary: str
    nodes: np.ndarray | None = None
    normal: np.ndarray | None = None
    tangential: np.ndarray | None = None
    h: float = float("nan")

    def __post_init__(self):
        arc = np.asarray(self.arc, dtype=float)
        if len(arc) > 1 and np.any(np.diff(arc) <= 0):
            raise ValueError("arc length must be strictly increasing")
        for name in ("arc", "values", "nodes", "normal", "tangential"):
            v = getattr(self, name)
            if v is not None:
                v = np.array(v)
                v.setflags(write=False)
                object.__setattr__(self, name, v)

    def __len__(self):
        return len(self.arc)

    @property
    def length(self) -> float:
        return float(self.arc[-1] - self.arc[0]) if len(self.arc) else 0.0

    def magnitude(self) -> np.ndarray:
        v = self.values
        return np.abs(v) if v.ndim == 1 else np.linalg.norm(v, axis=1)

    def norm_inf(self) -> float:
        return float(self.magnitude().max()) if len(self) else 0.0

    def norm_l2(self) -> float:
        return float(np.sqrt(np.trapezoid(self.magnitude() ** 2, self.arc))) if len(self) > 1 else 0.0

    def resample(self, grid: np.ndarray) -> np.ndarray:
        v = self.values
        if v.ndim == 1:
            return np.interp(grid, self.arc, v)
        return np.column_stack([np.interp(grid, self.arc, v[:, k]) for k in range(v.shape[1])])

    def as_rows(self):
        """Rows (arc, value components...) for CSV export."""
        v = self.values.reshape(len(self.arc), -1)
        return np.column_stack([self.arc, v])


@dataclass(frozen=True)
class MeasurementGap:
    l2: float
    linf: float
    grid_size: int


def compare(a: BoundaryMeasurement, b: BoundaryMeasurement, spacing: float) -> MeasurementGap:
    """L2 and Linf gaps on a common arc-length grid of the given spacing.

    The grid covers the shared arc-length range; both traces are linearly
    interpolated.  The result is symmetric in (a, b).
    """
    lo = max(a.arc[0], b.arc[0])
    hi = min(a.arc[-1], b.arc[-1])
    if not hi > lo:
        raise ValueError("measurements do not share an arc-length range")
    k = max(2, int(np.ceil((hi - lo) / spacing)) + 1)
    grid = np.linspace(lo, hi, k)
    d = a.resample(grid) - b.resample(grid)
    mag = np.abs(d) if d.ndim == 1 else np.linalg.norm(d, axis=1)
    return MeasurementGap(float(np.sqrt(np.trapezoid(mag**2, grid))), float(mag.max()), k)
