"""Preconditioned MINRES and GMRES with iteration reporting."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import solve_triangular

Operator = Callable[[np.ndarray], np.ndarray]


@dataclass
class SolverReport:
    solver: str
    iterations: int = 0
    converged: bool = False
    history: list = field(default_factory=list)
    wall_time: float = 0.0
    restart: int = 0
    message: str = ""

    @property
    def final_residual(self) -> float:
        return self.history[-1] if self.history else float("nan")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "relative_residual"])
            for i, r in enumerate(self.history):
                w.writerow([i, repr(float(r))])


def _as_op(A) -> Operator:
    if A is None:
        return lambda x: x
    if callable(A):
        return A
    return lambda x: A @ x


def minres(apply_A, apply_Pinv, rhs: np.ndarray, tol: float = 1e-8, maxit: int = 1000,
           x0: np.ndarray | None = None) -> tuple[np.ndarray, SolverReport]:
    """Preconditioned MINRES (Paige-Saunders recurrence).

    Stops when ``||r||_{P^-1} / ||b||_{P^-1} <= tol``, where the residual
    norm is the recurrence estimate ``phibar``.
    """
    A, M = _as_op(apply_A), _as_op(apply_Pinv)
    t0 = time.perf_counter()
    b = np.asarray(rhs, dtype=float)
    n = len(b)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    rep = SolverReport("minres")
    r1 = b - A(x) if x0 is not None else b.copy()
    y = M(r1)
    beta1 = r1 @ y
    if beta1 < 0:
        rep.message = "preconditioner is not positive definite"
        rep.wall_time = time.perf_counter() - t0
        return x, rep
    beta1 = np.sqrt(beta1)
    bnorm = np.sqrt(max(b @ M(b), 0.0)) if x0 is not None else beta1
    if bnorm == 0:
        rep.converged, rep.history = True, [0.0]
        rep.wall_time = time.perf_counter() - t0
        return x, rep
    rep.history.append(beta1 / bnorm)
    if beta1 / bnorm <= tol:
        rep.converged = True
        rep.wall_time = time.perf_counter() - t0
        return x, rep

    oldb, beta = 0.0, beta1
    dbar, epsln, phibar = 0.0, 0.0, beta1
    cs, sn = -1.0, 0.0
    w = np.zeros(n)
    w2 = np.zeros(n)
    r2 = r1.copy()
    for itn in range(1, maxit + 1):
        v = y / beta
        y = A(v)
        if itn >= 2:
            y = y - (beta / oldb) * r1
        alfa = v @ y
        y = y - (alfa / beta) * r2
        r1, r2 = r2, y
        y = M(r2)
        oldb = beta
        beta2 = r2 @ y
        if beta2 < 0:
            rep.message = "preconditioner is not positive definite"
            break
        beta = np.sqrt(beta2)
        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = np.hypot(gbar, beta)
        if gamma == 0:
            rep.message = "breakdown: zero curvature direction"
            break
        cs, sn = gbar / gamma, beta / gamma
        phi = cs * phibar
        phibar = sn * phibar
        w1, w2 = w2, w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w
        rep.iterations = itn
        rel = phibar / bnorm
        rep.history.append(rel)
        if rel <= tol or beta == 0:
            rep.converged = True
            break
    rep.wall_time = time.perf_counter() - t0
    if not rep.converged and not rep.message:
        rep.message = "maximum number of iterations reached"
    return x, rep


def gmres(apply_A, apply_Pinv, rhs: np.ndarray, tol: float = 1e-8, maxit: int = 1000,
          restart: int = 0, x0: np.ndarray | None = None) -> tuple[np.ndarray, SolverReport]:
    """Left-preconditioned GMRES with modified Gram-Schmidt and Givens rotations.

    The stopping test uses the Euclidean norm of the preconditioned
    residual relative to that of the preconditioned right-hand side.
    ``restart=0`` means no restart.
    """
    A, M = _as_op(apply_A), _as_op(apply_Pinv)
    t0 = time.perf_counter()
    b = np.asarray(rhs, dtype=float)
    n = len(b)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    rep = SolverReport("gmres", restart=restart)
    bnorm = np.linalg.norm(M(b))
    if bnorm == 0:
        rep.converged, rep.history = True, [0.0]
        rep.wall_time = time.perf_counter() - t0
        return x, rep
    m = restart if restart > 0 else maxit
    total = 0
    while True:
        r = M(b - A(x)) if (x0 is not None or total > 0) else M(b)
        beta = np.linalg.norm(r)
        if not rep.history:
            rep.history.append(beta / bnorm)
        if beta / bnorm <= tol:
            rep.converged = True
            break
        V = []
        Hm = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        V.append(r / beta)
        j_done = 0
        happy = False
        for j in range(m):
            wv = M(A(V[j]))
            for i in range(j + 1):
                Hm[i, j] = wv @ V[i]
                wv = wv - Hm[i, j] * V[i]
            Hm[j + 1, j] = np.linalg.norm(wv)
            for i in range(j):
                t = cs[i] * Hm[i, j] + sn[i] * Hm[i + 1, j]
                Hm[i + 1, j] = -sn[i] * Hm[i, j] + cs[i] * Hm[i + 1, j]
                Hm[i, j] = t
            h1, h2 = Hm[j, j], Hm[j + 1, j]
            denom = np.hypot(h1, h2)
            happy_here = h2 <= 1e-14 * max(denom, 1e-300)
            if denom == 0:
                cs[j], sn[j] = 1.0, 0.0
            else:
                cs[j], sn[j] = h1 / denom, h2 / denom
            Hm[j, j] = denom
            Hm[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            total += 1
            j_done = j + 1
            rel = abs(g[j + 1]) / bnorm
            rep.history.append(rel)
            if happy_here:
                happy = True
            else:
                V.append(wv / h2)
            if rel <= tol or happy or total >= maxit:
                break
        ycoef = solve_triangular(Hm[:j_done, :j_done], g[:j_done], lower=False)
        x = x + np.asarray(V[:j_done]).T @ ycoef
        rep.iterations = total
        if rep.history[-1] <= tol or happy:
            rep.converged = True
            break
        if total >= maxit:
            break
    rep.wall_time = time.perf_counter() - t0
    if not rep.converged:
        rep.message = "maximum number of iterations reached"
    return x, rep
