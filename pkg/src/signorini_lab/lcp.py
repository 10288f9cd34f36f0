"""Bound-constrained quadratic programs  min 1/2 x'Kx - b'x  s.t. x[C] >= 0.

The KKT system is the linear complementarity problem
    x_C >= 0,  lam_C = (Kx - b)_C >= 0,  x_C * lam_C = 0,  (Kx - b)_F = 0.

``solve_pdas`` is the primal-dual active set method (semismooth Newton on
min(x, lam) = 0); ``solve_pgs`` is projected Gauss-Seidel/SOR, used as an
independent oracle on small problems.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from cvxopt import cholmod, matrix as cvx_matrix, spmatrix as cvx_spmatrix
from numba import njit

__all__ = ["LCPResult", "ConvergenceError", "solve_pdas", "solve_pgs", "cholesky_solve",
           "complementarity_residual"]


class ConvergenceError(RuntimeError):
    """Iteration limit reached; ``result`` holds the last iterate."""

    def __init__(self, message: str, result: "LCPResult | None" = None):
        super().__init__(message)
        self.result = result


@dataclass
class LCPResult:
    x: np.ndarray
    lam: np.ndarray          # multipliers on the constrained indices
    active: np.ndarray       # bool mask over the constrained indices
    iterations: int
    residual: float
    converged: bool
    history: list = field(default_factory=list)


def complementarity_residual(x_c: np.ndarray, lam_c: np.ndarray) -> float:
    if len(x_c) == 0:
        return 0.0
    return float(np.max(np.abs(np.minimum(x_c, lam_c))))


def cholesky_solve(A: sp.spmatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve A x = rhs for symmetric positive definite sparse A (CHOLMOD)."""
    if A.shape[0] == 0:
        return np.zeros(0)
    L = sp.tril(A, format="coo")
    M = cvx_spmatrix(L.data.astype(float), L.row.astype(int).tolist(), L.col.astype(int).tolist(), A.shape)
    B = cvx_matrix(np.asarray(rhs, dtype=float).reshape(A.shape[0], -1).copy())
    F = cholmod.symbolic(M, uplo="L")
    cholmod.numeric(M, F)
    cholmod.solve(F, B)
    return np.array(B).reshape(np.shape(rhs))


def solve_pdas(K: sp.spmatrix, b: np.ndarray, constrained: np.ndarray, c: float = 1.0,
               max_iter: int = 50, active_tol: float | None = None) -> LCPResult:
    """Primal-dual active set iteration.

    The active set is A = {i in C : lam_i - c x_i > active_tol}; the loop stops
    when A is reproduced by two consecutive iterations.  ``active_tol`` guards
    against roundoff flipping nodes where both x and lam vanish.
    """
    K = sp.csr_matrix(K)
    b = np.asarray(b, dtype=float)
    n = len(b)
    C = np.asarray(constrained, dtype=np.int64)
    if active_tol is None:
        active_tol = 1e-13 * max(1.0, float(np.max(np.abs(b))) if n else 1.0)
    active = np.zeros(len(C), dtype=bool)
    history = []
    x = np.zeros(n)
    lam = np.zeros(len(C))
    for it in range(1, max_iter + 1):
        fixed = np.zeros(n, dtype=bool)
        fixed[C[active]] = True
        free = np.nonzero(~fixed)[0]
        x = np.zeros(n)
        if len(free):
            x[free] = cholesky_solve(K[free][:, free], b[free])
        lam = (K @ x - b)[C]
        lam[~active] = 0.0
        new_active = lam - c * x[C] > active_tol
        res = complementarity_residual(x[C], (K @ x - b)[C])
        history.append({"iteration": it, "active": int(new_active.sum()), "residual": res})
        if np.array_equal(new_active, active):
            return LCPResult(x, (K @ x - b)[C], active, it, res, True, history)
        active = new_active
    result = LCPResult(x, (K @ x - b)[C], active, max_iter, history[-1]["residual"], False, history)
    raise ConvergenceError(
        f"active set not stable after {max_iter} iterations (residual {result.residual:.3e})", result)


@njit(cache=True)
def _psor(indptr, indices, data, b, is_con, x, omega, tol, max_sweeps):
    n = len(b)
    for sweep in range(max_sweeps):
        delta = 0.0
        for i in range(n):
            s = 0.0
            d = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                if j == i:
                    d += data[k]
                else:
                    s += data[k] * x[j]
            xi = x[i] + omega * ((b[i] - s) / d - x[i])
            if is_con[i] and xi < 0.0:
                xi = 0.0
            delta = max(delta, abs(xi - x[i]))
            x[i] = xi
        if delta <= tol:
            return sweep + 1
    return -max_sweeps


def solve_pgs(K: sp.spmatrix, b: np.ndarray, constrained: np.ndarray, x0=None, omega: float = 1.0,
              tol: float = 1e-15, max_sweeps: int = 1_000_000) -> LCPResult:
    """Projected Gauss-Seidel (projected SOR when omega != 1)."""
    K = sp.csr_matrix(K)
    K.sort_indices()
    b = np.asarray(b, dtype=float)
    n = len(b)
    C = np.asarray(constrained, dtype=np.int64)
    is_con = np.zeros(n, dtype=np.bool_)
    is_con[C] = True
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    scale = max(1.0, float(np.max(np.abs(b))) if n else 1.0)
    sweeps = _psor(K.indptr.astype(np.int64), K.indices.astype(np.int64), K.data, b, is_con, x,
                   float(omega), tol * scale, int(max_sweeps))
    lam = (K @ x - b)[C]
    res = complementarity_residual(x[C], lam)
    result = LCPResult(x, lam, lam - x[C] > 0, abs(sweeps), res, sweeps > 0)
    if sweeps < 0:
        raise ConvergenceError(f"projected Gauss-Seidel did not converge in {max_sweeps} sweeps", result)
    return result
