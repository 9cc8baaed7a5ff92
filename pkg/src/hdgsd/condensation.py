"""Static condensation of cell unknowns, cell by cell."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .assembly import HybridMatrix
from .mesh import Region


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Raised when a block expected to be SPD fails its Cholesky factorization."""


@dataclass
class CondensedSystem:
    S: sp.csr_matrix
    g: np.ndarray | None
    hybrid: HybridMatrix

    @property
    def n(self) -> int:
        return self.S.shape[0]


def _cell_solves(H: HybridMatrix, spd: bool):
    """Yield ``(cells, B, X)`` with ``X = A11^{-1} B^T`` for each coupling group."""
    for cells, B, fidx in H.couplings:
        A = H.cell_blocks[cells]
        Bt = np.transpose(np.where(fidx[:, :, None] >= 0, B, 0.0), (0, 2, 1))
        if spd:
            try:
                L = np.linalg.cholesky(A)
            except np.linalg.LinAlgError as exc:
                region = Region(H.dofmap.mesh.cell_region[cells[0]]).name.lower()
                raise NotPositiveDefiniteError(
                    f"{region} cell block is not positive definite; "
                    "check the penalty parameter") from exc
            Y = np.linalg.solve(L, Bt)
            X = np.linalg.solve(np.transpose(L, (0, 2, 1)), Y)
        else:
            X = np.linalg.solve(A, Bt)
        yield cells, B, fidx, X


def _scatter_schur(H: HybridMatrix, parts) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for fidx, blocks in parts:
        R = np.broadcast_to(fidx[:, :, None], blocks.shape)
        C = np.broadcast_to(fidx[:, None, :], blocks.shape)
        keep = (R >= 0) & (C >= 0)
        rows.append(R[keep])
        cols.append(C[keep])
        vals.append(blocks[keep])
    n = H.n_facet
    if not rows:
        return sp.csr_matrix((n, n))
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n))


def condense(H: HybridMatrix, f: np.ndarray | None = None, fbar: np.ndarray | None = None,
             spd: bool = False) -> CondensedSystem:
    """Schur complement ``A22 - A21 A11^{-1} A21^T`` and the condensed load.

    ``spd=True`` factorizes the cell blocks by Cholesky and raises
    :class:`NotPositiveDefiniteError` if one is not positive definite.
    """
    m = H.cell_blocks.shape[1]
    parts = []
    g = None if fbar is None else np.array(fbar, dtype=float)
    for cells, B, fidx, X in _cell_solves(H, spd):
        Bm = np.where(fidx[:, :, None] >= 0, B, 0.0)
        parts.append((fidx, -np.einsum("cim,cmj->cij", Bm, X)))
        if g is not None:
            fc = f[cells[:, None] * m + np.arange(m)]
            # A21 A11^{-1} f = X^T f with X = A11^{-1} A21^T
            loc = np.einsum("cmi,cm->ci", X, fc)
            keep = fidx >= 0
            np.subtract.at(g, fidx[keep], loc[keep])
    S = (H.A22 + _scatter_schur(H, parts)).tocsr()
    S.sum_duplicates()
    return CondensedSystem(S, g, H)


def condense_spd(H: HybridMatrix) -> sp.csr_matrix:
    """Schur complement of a hybrid SPD matrix (all cell blocks SPD)."""
    return condense(H, spd=True).S


def local_solve(H: HybridMatrix, xbar: np.ndarray, f: np.ndarray | None = None) -> np.ndarray:
    """Cell unknowns ``A11^{-1} (f - A21^T xbar)``, cell by cell."""
    m = H.cell_blocks.shape[1]
    nc = H.cell_blocks.shape[0]
    rhs = np.zeros((nc, m)) if f is None else np.array(f, dtype=float).reshape(nc, m)
    for cells, B, fidx in H.couplings:
        xb = np.where(fidx >= 0, xbar[np.maximum(fidx, 0)], 0.0)
        rhs[cells] -= np.einsum("cim,ci->cm", B, xb)
    return np.linalg.solve(H.cell_blocks, rhs[..., None])[..., 0].ravel()


def recover(H: HybridMatrix, xbar: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Full system vector ``(x_cell, xbar)`` from the facet solution."""
    return np.concatenate([local_solve(H, xbar, f), xbar])
