# solver_model.py
import logging

import numpy as np
from scipy.optimize import nnls as _scipy_nnls

from exceptions import DataValidationError, ShapeError

logger = logging.getLogger(__name__)


def _as_system(M, y):
    M = np.asarray(M, dtype=float)
    y = np.asarray(y, dtype=float)
    if M.ndim != 2 or y.ndim != 1 or M.shape[0] != y.shape[0]:
        raise ShapeError(f"matrix {M.shape} and vector {y.shape} do not agree")
    return M, y


class SolverModel:
    @staticmethod
    def nnls(M, y) -> np.ndarray:
        """x >= 0 minimising ||Mx - y||."""
        M, y = _as_system(M, y)
        if not np.any(M):
            return np.zeros(M.shape[1])
        try:
            x, _ = _scipy_nnls(M, y)
        except RuntimeError:
            logger.debug("nnls hit its iteration cap, retrying with a larger one")
            x, _ = _scipy_nnls(M, y, maxiter=50 * M.shape[1])
        return x

    @staticmethod
    def _equality_ls(G: np.ndarray, c: np.ndarray, free: np.ndarray, total: float) -> np.ndarray:
        """Minimiser of 0.5 x'Gx - c'x over the free coordinates subject to sum(x) = total."""
        idx = np.flatnonzero(free)
        k = idx.size
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = G[np.ix_(idx, idx)]
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.append(c[idx], total)
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        z = np.zeros(G.shape[0])
        z[idx] = sol[:k]
        return z

    @staticmethod
    def simplex_ls(M, y, total: float) -> np.ndarray:
        """x >= 0 with sum(x) = total minimising ||Mx - y|| (primal active set)."""
        M, y = _as_system(M, y)
        if total < 0:
            raise DataValidationError(f"total must be nonnegative, got {total}")
        n = M.shape[1]
        if n == 1:
            return np.array([float(total)])
        if total == 0:
            return np.zeros(n)

        G = M.T @ M
        c = M.T @ y
        tol = 1e-12 * max(1.0, np.abs(G).max() * total, np.abs(c).max())
        x = np.full(n, total / n)
        free = np.ones(n, dtype=bool)

        for _ in range(20 * n + 50):
            z = SolverModel._equality_ls(G, c, free, total)
            if z[free].min() >= 0:
                x = z
                grad = G @ x - c
                lam = grad - grad[free].mean()
                lam[free] = 0.0
                j = int(np.argmin(lam))
                if lam[j] >= -tol:
                    break
                free[j] = True
                continue
            blocking = free & (z < 0)
            steps = x[blocking] / (x[blocking] - z[blocking])
            x = x + steps.min() * (z - x)
            free[np.flatnonzero(blocking)[np.argmin(steps)]] = False
            free &= x > 0
            x[~free] = 0.0
        else:
            logger.debug("simplex_ls stopped at the iteration cap")

        x = np.maximum(x, 0.0)
        return x * (total / x.sum())

    @staticmethod
    def project_simplex(V: np.ndarray, totals: np.ndarray) -> np.ndarray:
        """Euclidean projection of each column of V onto {p >= 0, sum(p) = totals[j]}."""
        V = np.asarray(V, dtype=float)
        totals = np.asarray(totals, dtype=float)
        n = V.shape[0]
        U = -np.sort(-V, axis=0)
        css = np.cumsum(U, axis=0) - totals
        ranks = np.arange(1, n + 1)[:, None]
        support = U - css / ranks > 0
        # last index where the condition holds; the first row always holds for totals > 0
        rho = n - 1 - np.argmax(support[::-1], axis=0)
        theta = css[rho, np.arange(V.shape[1])] / (rho + 1)
        P = np.maximum(V - theta, 0.0)
        P[:, totals <= 0] = 0.0
        return P
