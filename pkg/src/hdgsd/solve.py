"""Solution drivers: direct (deflated) and preconditioned Krylov solves."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import krylov
from .assembly import BlockSystem
from .condensation import CondensedSystem, condense, recover
from .preconditioners import CondensedPreconditioner, build_precond


def solve_bordered(A: sp.spmatrix, b: np.ndarray, z: np.ndarray | None) -> np.ndarray:
    """Solve a singular consistent system with one-dimensional kernel ``z``.

    The kernel is removed by bordering with ``z`` (``z . x = 0``), which
    keeps the matrix sparse.
    """
    if z is None:
        return spla.spsolve(sp.csc_matrix(A), b)
    n = A.shape[0]
    zc = sp.csc_matrix(z[:, None])
    K = sp.bmat([[A, zc], [zc.T, None]], format="csc")
    sol = spla.spsolve(K, np.concatenate([b, [0.0]]))
    return sol[:n]


def project_rhs(b: np.ndarray, z: np.ndarray | None) -> np.ndarray:
    """Euclidean projection of ``b`` onto the range of a symmetric operator with kernel ``z``."""
    if z is None:
        return b
    return b - z * (z @ b) / (z @ z)


def solve_full_direct(system: BlockSystem) -> np.ndarray:
    """Direct solve of the uncondensed system (system numbering)."""
    return solve_bordered(system.matrix(), system.rhs, system.nullspace)


def facet_kernel(system: BlockSystem) -> np.ndarray:
    return system.nullspace[system.dofmap.n_cell_dofs:]


def condense_system(system: BlockSystem) -> CondensedSystem:
    return condense(system, system.f, system.fbar)


def solve_condensed_direct(system: BlockSystem, cs: CondensedSystem | None = None) -> np.ndarray:
    cs = cs or condense_system(system)
    zb = facet_kernel(system)
    xbar = solve_bordered(cs.S, project_rhs(cs.g, zb), zb)
    return recover(system, xbar, system.f)


def kernel_distance(system: BlockSystem, x: np.ndarray, y: np.ndarray, N) -> float:
    """``min_c ||x - y - c z||_N / ||y||_N`` (difference modulo the null space)."""
    z = system.nullspace
    d = x - y
    Nz = N @ z
    d = d - z * (d @ Nz) / (z @ Nz)
    yn = y - z * (y @ Nz) / (z @ Nz)
    return float(np.sqrt(d @ (N @ d)) / np.sqrt(yn @ (N @ yn)))


@dataclass
class SolveResult:
    x: np.ndarray
    xbar: np.ndarray
    report: krylov.SolverReport
    preconditioner: CondensedPreconditioner
    condensed: CondensedSystem

    @property
    def iterations(self) -> int:
        return self.report.iterations

    @property
    def converged(self) -> bool:
        return self.report.converged


def solve_iterative(system: BlockSystem, variant: str = "Phat", mode: str = "exact",
                    solver: str = "minres", tol: float = 1e-8, maxit: int = 1000,
                    restart: int = 0, sweeps: int = 5,
                    cs: CondensedSystem | None = None,
                    pc: CondensedPreconditioner | None = None) -> SolveResult:
    """Condense, solve the facet system by preconditioned Krylov, recover cells."""
    cs = cs or condense_system(system)
    pc = pc or build_precond(system, variant, mode, sweeps=sweeps)
    g = project_rhs(cs.g, pc.zbar)
    S = cs.S
    A = lambda v: S @ v
    if solver == "minres":
        xbar, rep = krylov.minres(A, pc.apply_inverse, g, tol=tol, maxit=maxit)
    elif solver == "gmres":
        xbar, rep = krylov.gmres(A, pc.apply_inverse, g, tol=tol, maxit=maxit, restart=restart)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    xbar = pc.project_kernel(xbar)
    return SolveResult(recover(system, xbar, system.f), xbar, rep, pc, cs)
