"""Block-diagonal preconditioners for the condensed (facet) system."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import BlockSystem, assemble_preconditioner_form
from .condensation import NotPositiveDefiniteError, condense_spd
from .mesh import FaceClass

BLOCK_NAMES = ("ubar", "ps", "pd")
VARIANTS = ("P", "Phat")
MODES = ("exact", "inexact")


class PreconditionerBuildError(RuntimeError):
    pass


def _spd_factor(A: sp.csr_matrix, name: str) -> Callable:
    """Symmetric-pivoting sparse LU used as a Cholesky substitute.

    Diagonal pivots with a fill-reducing symmetric ordering; a non-positive
    pivot means the block is not positive definite.
    """
    lu = spla.splu(sp.csc_matrix(A), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                   options={"SymmetricMode": True})
    d = lu.U.diagonal()
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise PreconditionerBuildError(f"block {name!r} is not positive definite "
                                       f"(min pivot {d.min():.3e})")
    return lu.solve


class SymmetricGaussSeidel:
    """``m`` forward/backward Gauss-Seidel sweep pairs from a zero initial guess.

    The result is a fixed symmetric positive definite linear operator.
    """

    def __init__(self, A: sp.csr_matrix, sweeps: int = 5):
        if sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        self.A = sp.csr_matrix(A)
        self.sweeps = sweeps
        lower = sp.tril(self.A, format="csc")
        upper = sp.triu(self.A, format="csc")
        opts = dict(permc_spec="NATURAL", diag_pivot_thresh=0.0)
        self._fwd = spla.splu(lower, **opts).solve
        self._bwd = spla.splu(upper, **opts).solve

    def __call__(self, r: np.ndarray) -> np.ndarray:
        x = self._fwd(r)
        x = x + self._bwd(r - self.A @ x)
        for _ in range(self.sweeps - 1):
            x = x + self._fwd(r - self.A @ x)
            x = x + self._bwd(r - self.A @ x)
        return x


@dataclass
class CondensedPreconditioner:
    variant: str
    mode: str
    S: sp.csr_matrix                  # assembled condensed preconditioner matrix
    slices: dict
    solvers: dict
    zbar: np.ndarray | None = None    # facet null vector of the condensed operator
    w: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.S.shape[0]

    def block(self, name: str) -> sp.csr_matrix:
        s = self.slices[name]
        return self.S[s, s]

    def project_kernel(self, x: np.ndarray) -> np.ndarray:
        """Remove the null component, S_P-orthogonally to ``zbar``."""
        if self.zbar is None:
            return np.array(x, dtype=float)
        return x - self.zbar * (self.w @ x)

    def _project_transpose(self, r):
        if self.zbar is None:
            return r
        return r - self.w * (self.zbar @ r)

    def solve_blocks(self, r: np.ndarray) -> np.ndarray:
        """Blockwise ``S_P^{-1} r`` (no projection)."""
        out = np.zeros_like(r, dtype=float)
        for name in BLOCK_NAMES:
            s = self.slices[name]
            if s.stop > s.start:
                out[s] = self.solvers[name](r[s])
        return out

    def apply_inverse(self, r: np.ndarray) -> np.ndarray:
        """Projected preconditioner ``Pi S_P^{-1} Pi^T r`` (symmetric, fixed)."""
        return self.project_kernel(self.solve_blocks(self._project_transpose(np.asarray(r, float))))

    def as_linear_operator(self) -> spla.LinearOperator:
        return spla.LinearOperator(self.S.shape, matvec=self.apply_inverse, dtype=float)


def build_precond(system: BlockSystem, variant: str = "Phat", mode: str = "exact",
                  sweeps: int = 5, zbar: np.ndarray | None = None) -> CondensedPreconditioner:
    """Condensed block preconditioner ``S_P`` (``variant="P"``) or ``S_Phat``.

    ``zbar`` is the facet kernel vector of the condensed system; by default
    it is the facet part of the system null vector.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    p = system.params
    H = assemble_preconditioner_form(system, variant=variant)
    try:
        S = condense_spd(H)
    except NotPositiveDefiniteError as exc:
        raise PreconditionerBuildError(
            f"{variant}: {exc} (mu={p.mu}, alpha={p.alpha}, k={p.k}, eta={p.eta})") from exc
    slices = system.dofmap.facet_blocks()
    mesh = system.dofmap.mesh
    solvers = {}
    for name in BLOCK_NAMES:
        s = slices[name]
        if s.stop <= s.start:
            continue
        A = S[s, s].tocsr()
        if name == "pd" and len(mesh.faces_of_class(FaceClass.INTERFACE)) == 0:
            # pure flux boundary: constants are in the kernel of this block;
            # ground the first constant coefficient (the kernel projection
            # makes the choice immaterial)
            A = A.tolil()
            A[0, 0] += abs(A.diagonal()).max()
            A = A.tocsr()
        try:
            if mode == "exact" or name == "ps":
                solvers[name] = _spd_factor(A, name)
            else:
                _spd_factor(A, name)
                solvers[name] = SymmetricGaussSeidel(A, sweeps)
        except PreconditionerBuildError as exc:
            raise PreconditionerBuildError(
                f"{variant}/{mode}: {exc} (mu={p.mu}, alpha={p.alpha}, k={p.k}, eta={p.eta})") from exc
    if zbar is None:
        zbar = system.nullspace[system.dofmap.n_cell_dofs:]
    pc = CondensedPreconditioner(variant, mode, S, slices, solvers)
    if zbar is not None and np.any(zbar):
        Sz = S @ zbar
        pc.zbar = zbar
        pc.w = Sz / (zbar @ Sz)
    return pc
