"""Restarted GMRES with Givens rotations and Jacobi row scaling.

The implementation is deliberately small and deterministic: modified
Gram-Schmidt with a single selective reorthogonalisation pass, plane
rotations for the least-squares update, and an optional left diagonal
(Jacobi) preconditioner.  The residual history it records is the
preconditioned relative residual from the GMRES recurrence, which is
monotone within each restart cycle; the report additionally carries the
true unpreconditioned relative residual of the returned iterate.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

__all__ = ["SolverConfig", "SolveReport", "gmres", "gmres_solve", "direct_solve"]


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls for :func:`gmres`."""

    tol: float = 1e-4
    restart: int = 200
    maxiter: int = 5000
    jacobi: bool = True


@dataclass
class SolveReport:
    """Outcome of an iterative solve.

    Attributes
    ----------
    converged : bool
        Whether the recurrence residual reached the tolerance.
    iterations : int
        Number of operator applications spent in Arnoldi steps.
    residual : float
        True relative residual ||b - A x|| / ||b|| of the returned x.
    history : ndarray
        Preconditioned relative residual, entry 0 at start, then one
        entry per iteration.
    seconds : float
        Wall time of the solve.
    """

    converged: bool
    iterations: int
    residual: float
    history: np.ndarray = field(repr=False)
    seconds: float = 0.0


def _givens(a: complex, b: complex):
    """Rotation (c real, s) with c*a + s*b = r and -conj(s)*a + c*b = 0."""
    if b == 0.0:
        return 1.0, 0.0 + 0.0j, a
    if a == 0.0:
        return 0.0, 1.0 + 0.0j, b
    t = np.hypot(abs(a), abs(b))
    c = abs(a) / t
    phase = a / abs(a)
    s = phase * np.conj(b) / t
    return c, s, phase * t


def gmres(op, b: np.ndarray, config: SolverConfig = SolverConfig(),
          diagonal: np.ndarray | None = None, x0: np.ndarray | None = None):
    """Solve op(x) = b by restarted GMRES.

    Parameters
    ----------
    op : ndarray or callable
        System matrix or matrix-vector product.
    b : ndarray
        Right-hand side.
    config : SolverConfig
        Tolerance, restart length, iteration cap, Jacobi scaling switch.
    diagonal : ndarray, optional
        Matrix diagonal for the Jacobi preconditioner; extracted
        automatically when op is an ndarray.
    x0 : ndarray, optional
        Initial guess, zero by default.

    Returns
    -------
    x : ndarray
    report : SolveReport
    """
    start = time.perf_counter()
    b = np.asarray(b, dtype=complex)
    n = b.size
    if isinstance(op, np.ndarray):
        matvec = lambda v: op @ v  # noqa: E731
        if diagonal is None:
            diagonal = np.diagonal(op)
    else:
        matvec = op

    if config.jacobi and diagonal is not None:
        d = np.asarray(diagonal, dtype=complex).copy()
        small = np.abs(d) < 1e-300
        d[small] = 1.0
        scale = 1.0 / d
    else:
        scale = np.ones(n)

    def resid(x):
        return scale * (b - matvec(x))

    b_norm = np.linalg.norm(scale * b)
    if b_norm == 0.0:
        report = SolveReport(True, 0, 0.0, np.zeros(1),
                             time.perf_counter() - start)
        return np.zeros(n, dtype=complex), report

    x = np.zeros(n, dtype=complex) if x0 is None else np.asarray(x0, dtype=complex).copy()
    history = []
    total = 0
    converged = False

    r = resid(x)
    beta = np.linalg.norm(r)
    history.append(beta / b_norm)

    while total < config.maxiter and not converged:
        if beta / b_norm <= config.tol:
            converged = True
            break
        m = min(config.restart, config.maxiter - total)
        V = np.empty((n, m + 1), dtype=complex)
        H = np.zeros((m + 1, m), dtype=complex)
        cs = np.zeros(m)
        sn = np.zeros(m, dtype=complex)
        g = np.zeros(m + 1, dtype=complex)
        g[0] = beta
        V[:, 0] = r / beta

        j_last = -1
        for j in range(m):
            w = scale * matvec(V[:, j])
            norm_before = np.linalg.norm(w)
            h = V[:, : j + 1].conj().T @ w
            w = w - V[:, : j + 1] @ h
            # one reorthogonalisation pass when the residual projections
            # show a loss of orthogonality above 1e-8 of the vector norm
            h2 = V[:, : j + 1].conj().T @ w
            if np.max(np.abs(h2)) > 1e-8 * norm_before:
                w = w - V[:, : j + 1] @ h2
                h = h + h2
            H[: j + 1, j] = h
            H[j + 1, j] = np.linalg.norm(w)

            for i in range(j):
                hi, hj = H[i, j], H[i + 1, j]
                H[i, j] = cs[i] * hi + sn[i] * hj
                H[i + 1, j] = -np.conj(sn[i]) * hi + cs[i] * hj
            cs[j], sn[j], H[j, j] = _givens(H[j, j], H[j + 1, j])

            g[j + 1] = -np.conj(sn[j]) * g[j]
            g[j] = cs[j] * g[j]
            total += 1
            j_last = j
            history.append(abs(g[j + 1]) / b_norm)

            breakdown = H[j + 1, j] == 0.0
            if not breakdown:
                V[:, j + 1] = w / H[j + 1, j].real
            if abs(g[j + 1]) / b_norm <= config.tol or breakdown or total >= config.maxiter:
                break

        k = j_last + 1
        y = np.zeros(k, dtype=complex)
        for i in range(k - 1, -1, -1):
            y[i] = (g[i] - H[i, i + 1 : k] @ y[i + 1 : k]) / H[i, i]
        x = x + V[:, :k] @ y

        r = resid(x)
        beta = np.linalg.norm(r)
        if beta / b_norm <= config.tol:
            converged = True

    true_res = np.linalg.norm(b - matvec(x)) / np.linalg.norm(b)
    report = SolveReport(converged=converged, iterations=total,
                         residual=float(true_res), history=np.asarray(history),
                         seconds=time.perf_counter() - start)
    if not converged:
        logger.warning("gmres did not converge: %d iterations, residual %.3e",
                       total, history[-1])
    return x, report


def gmres_solve(system, config: SolverConfig = SolverConfig(),
                rhs: np.ndarray | None = None, x0: np.ndarray | None = None):
    """Solve an assembled system through its blockwise matvec.

    ``system`` provides matvec, diagonal() and (unless ``rhs`` is given)
    an attached right-hand side.
    """
    b = system.rhs if rhs is None else rhs
    if b is None:
        raise ValueError("system has no attached right-hand side")
    diagonal = system.diagonal() if config.jacobi else None
    return gmres(system.matvec, np.asarray(b, dtype=complex), config,
                 diagonal=diagonal, x0=x0)


def direct_solve(matrix: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense LU solve, for references and small systems."""
    return np.linalg.solve(matrix, np.asarray(b, dtype=complex))
