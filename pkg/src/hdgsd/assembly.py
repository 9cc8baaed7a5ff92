"""Global degree-of-freedom map and block-system assembly.

Two numberings are used.  The *full* numbering holds every unknown, cell
dofs first (cell-major, ``[u_x | u_y | p]`` per cell) followed by facet dofs
field-major: trace velocity on all faces in the closed Stokes region, the
Stokes trace pressure on the same faces, and the Darcy trace pressure on
the faces of the closed Darcy region.  The *system* numbering drops the
trace-velocity dofs on the exterior Stokes boundary, whose values are
prescribed; it is the numbering of every matrix returned from here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import scipy.io
import scipy.sparse as sp

from . import forms
from .forms import MeshGeometry, PhysicalParams
from .mesh import FaceClass, Mesh2D, Region

DATA_EXTRA_DEGREE = 14


@dataclass
class DofMap:
    mesh: Mesh2D
    k: int
    nk: int
    nq: int
    nf: int
    stokes_faces: np.ndarray
    darcy_faces: np.ndarray
    ubar_start: np.ndarray     # per face, full index of first ubar dof or -1
    ps_start: np.ndarray
    pd_start: np.ndarray
    n_full: int
    constrained: np.ndarray    # bool mask over the full numbering
    full_to_sys: np.ndarray    # -1 on constrained dofs
    sys_to_full: np.ndarray

    @property
    def cell_size(self) -> int:
        return 2 * self.nk + self.nq

    @property
    def n_cell_dofs(self) -> int:
        return self.mesh.num_cells * self.cell_size

    @property
    def n_sys(self) -> int:
        return len(self.sys_to_full)

    @property
    def n_facet(self) -> int:
        return self.n_sys - self.n_cell_dofs

    def cell_dofs(self, c: int) -> np.ndarray:
        return np.arange(c * self.cell_size, (c + 1) * self.cell_size)

    def facet_blocks(self) -> dict[str, slice]:
        """Ranges of the three trace fields inside the system facet vector."""
        out, pos = {}, 0
        for name, start in zip(("ubar", "ps", "pd"), (self.ubar_start, self.ps_start, self.pd_start)):
            size = int(np.count_nonzero(self.full_to_sys[self._face_range(start)] >= 0))
            out[name] = slice(pos, pos + size)
            pos += size
        return out

    def _face_range(self, start):
        width = 2 * self.nf if start is self.ubar_start else self.nf
        s = start[start >= 0]
        return (s[:, None] + np.arange(width)[None, :]).ravel()

    def stokes_cell_facet_full(self, cells) -> np.ndarray:
        """Full indices of ``[ubar f0 f1 f2 | pbar_s f0 f1 f2]`` per Stokes cell."""
        F = self.mesh.cell_faces[cells]
        nf = self.nf
        ub = self.ubar_start[F][:, :, None] + np.arange(2 * nf)[None, None, :]
        ps = self.ps_start[F][:, :, None] + np.arange(nf)[None, None, :]
        return np.concatenate([ub.reshape(len(cells), -1), ps.reshape(len(cells), -1)], axis=1)

    def darcy_cell_facet_full(self, cells) -> np.ndarray:
        F = self.mesh.cell_faces[cells]
        pd = self.pd_start[F][:, :, None] + np.arange(self.nf)[None, None, :]
        return pd.reshape(len(cells), -1)

    def cell_full(self, cells) -> np.ndarray:
        cells = np.asarray(cells)
        return cells[:, None] * self.cell_size + np.arange(self.cell_size)[None, :]

    def nullspace(self) -> np.ndarray:
        """Constant-pressure kernel vector in the system numbering."""
        from .basis import CellBasis, FaceBasis

        z = np.zeros(self.n_full)
        qc = CellBasis(self.k - 1).constant_coeffs()
        fc = FaceBasis(self.k).constant_coeffs()
        for c in range(self.mesh.num_cells):
            z[c * self.cell_size + 2 * self.nk:(c + 1) * self.cell_size] = qc
        for start in (self.ps_start, self.pd_start):
            s = start[start >= 0]
            z[(s[:, None] + np.arange(self.nf)).ravel()] = np.tile(fc, len(s))
        return z[self.sys_to_full]


def build_dof_map(mesh: Mesh2D, k: int) -> DofMap:
    from .basis import dim_pk

    nk, nq, nf = dim_pk(k), dim_pk(k - 1), k + 1
    fcl = mesh.face_class
    s_cls = [FaceClass.INTERIOR_S, FaceClass.INTERFACE, FaceClass.GAMMA_S]
    d_cls = [FaceClass.INTERIOR_D, FaceClass.INTERFACE, FaceClass.GAMMA_D]
    sf = np.flatnonzero(np.isin(fcl, s_cls))
    df = np.flatnonzero(np.isin(fcl, d_cls))
    ncd = mesh.num_cells * (2 * nk + nq)
    nfaces = mesh.num_faces
    ub = -np.ones(nfaces, dtype=int)
    ps = -np.ones(nfaces, dtype=int)
    pd = -np.ones(nfaces, dtype=int)
    ub[sf] = ncd + np.arange(len(sf)) * 2 * nf
    off = ncd + len(sf) * 2 * nf
    ps[sf] = off + np.arange(len(sf)) * nf
    off += len(sf) * nf
    pd[df] = off + np.arange(len(df)) * nf
    n_full = off + len(df) * nf
    constrained = np.zeros(n_full, dtype=bool)
    for f in np.flatnonzero(fcl == FaceClass.GAMMA_S):
        constrained[ub[f]:ub[f] + 2 * nf] = True
    sys_to_full = np.flatnonzero(~constrained)
    full_to_sys = -np.ones(n_full, dtype=int)
    full_to_sys[sys_to_full] = np.arange(len(sys_to_full))
    return DofMap(mesh, k, nk, nq, nf, sf, df, ub, ps, pd, n_full, constrained,
                  full_to_sys, sys_to_full)


# ---------------------------------------------------------------------------
# problem data


@dataclass
class ProblemData:
    """Sources and boundary/interface data; ``None`` means zero.

    Callables take coordinate arrays ``x, y`` (any common shape).  Vector
    valued ones return an array with a leading axis of length 2.
    ``darcy_normal_flux`` additionally receives the outward normal
    components and returns ``u . n`` on the Darcy boundary.
    ``interface_traction`` is a functional density added as
    ``<g, vbar>`` on the interface; it carries the residual of the
    interface conditions when the exact solution does not satisfy them.
    """

    f_stokes: Optional[Callable] = None
    f_darcy: Optional[Callable] = None
    u_boundary: Optional[Callable] = None
    darcy_normal_flux: Optional[Callable] = None
    interface_traction: Optional[Callable] = None


# ---------------------------------------------------------------------------
# hybrid matrices


@dataclass
class HybridMatrix:
    """A symmetric matrix split into cell and facet unknowns.

    ``cell_blocks[c]`` is the diagonal block of cell ``c``; each coupling
    group is ``(cells, blocks, facet_idx)`` with ``blocks[i]`` the local
    facet-by-cell block and ``facet_idx[i]`` its system facet indices
    (``-1`` where the dof is prescribed).  ``A22`` is the facet block.
    """

    dofmap: DofMap
    cell_blocks: np.ndarray
    couplings: list
    A22: sp.csr_matrix

    @property
    def n_facet(self) -> int:
        return self.A22.shape[0]

    def A11(self) -> sp.csr_matrix:
        return sp.block_diag(list(self.cell_blocks), format="csr")

    def A21(self) -> sp.csr_matrix:
        m = self.cell_blocks.shape[1]
        rows, cols, vals = [], [], []
        for cells, blocks, fidx in self.couplings:
            nl = blocks.shape[1]
            R = np.broadcast_to(fidx[:, :, None], blocks.shape)
            C = np.broadcast_to((cells[:, None] * m + np.arange(m))[:, None, :], blocks.shape)
            keep = R >= 0
            rows.append(R[keep])
            cols.append(C[keep])
            vals.append(blocks[keep])
            del nl
        shape = (self.n_facet, len(self.cell_blocks) * m)
        return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=shape)

    def matrix(self) -> sp.csr_matrix:
        A21 = self.A21()
        return sp.bmat([[self.A11(), A21.T], [A21, self.A22]], format="csr")


def _coo_add(store, idx, blocks):
    """Queue local blocks for insertion at full indices ``idx`` (n, L)."""
    R = np.broadcast_to(idx[:, :, None], blocks.shape)
    C = np.broadcast_to(idx[:, None, :], blocks.shape)
    store[0].append(R.ravel())
    store[1].append(C.ravel())
    store[2].append(blocks.ravel())


def _coo_finish(store, n):
    if not store[0]:
        return sp.csr_matrix((n, n))
    A = sp.coo_matrix((np.concatenate(store[2]),
                       (np.concatenate(store[0]), np.concatenate(store[1]))), shape=(n, n))
    A = A.tocsr()
    A.sum_duplicates()
    A.sort_indices()
    return A


def _stokes_local(geo, dm, cells, D, Bc, Bf, P_cell=None):
    """Full local matrix of a Stokes cell on ``[u p | ubar pbar_s]``."""
    nk2, m, nf = 2 * dm.nk, dm.cell_size, dm.nf
    L = np.zeros((len(cells), m + 9 * nf, m + 9 * nf))
    L[:, :nk2, :nk2] = D[:, :nk2, :nk2]
    L[:, m:m + 6 * nf, m:m + 6 * nf] = D[:, nk2:, nk2:]
    L[:, m:m + 6 * nf, :nk2] = D[:, nk2:, :nk2]
    L[:, :nk2, m:m + 6 * nf] = D[:, :nk2, nk2:]
    if Bc is not None:
        L[:, nk2:m, :nk2] = Bc
        L[:, :nk2, nk2:m] = np.transpose(Bc, (0, 2, 1))
        L[:, m + 6 * nf:, :nk2] = Bf
        L[:, :nk2, m + 6 * nf:] = np.transpose(Bf, (0, 2, 1))
    if P_cell is not None:
        # pressure pair [p | pbar_s] block (norm matrices only)
        pi = np.r_[nk2:m, m + 6 * nf:m + 9 * nf]
        L[:, pi[:, None], pi[None, :]] += P_cell
    return L


def _darcy_local(dm, M, Bc, Bf, P_cell=None):
    nk2, m, nf = 2 * dm.nk, dm.cell_size, dm.nf
    L = np.zeros((len(M), m + 3 * nf, m + 3 * nf))
    L[:, :nk2, :nk2] = M
    if Bc is not None:
        L[:, nk2:m, :nk2] = Bc
        L[:, :nk2, nk2:m] = np.transpose(Bc, (0, 2, 1))
        L[:, m:, :nk2] = Bf
        L[:, :nk2, m:] = np.transpose(Bf, (0, 2, 1))
    if P_cell is not None:
        pi = np.r_[nk2:m, m:m + 3 * nf]
        L[:, pi[:, None], pi[None, :]] += P_cell
    return L


def _interface_local(geo, dm, faces, params, with_bjs=True, with_coupling=True,
                     with_pd_mass=False):
    """Local matrices on ``[ubar (2nf) | pbar_s (nf) | pbar_d (nf)]`` of interface faces."""
    nf = dm.nf
    L = np.zeros((len(faces), 4 * nf, 4 * nf))
    if with_bjs:
        L[:, :2 * nf, :2 * nf] = forms.interface_bjs_matrix(geo, faces, params)
    if with_coupling:
        C = forms.interface_normal_coupling(geo, faces)
        L[:, 2 * nf:3 * nf, :2 * nf] = -C
        L[:, :2 * nf, 2 * nf:3 * nf] = -np.transpose(C, (0, 2, 1))
        L[:, 3 * nf:, :2 * nf] = C
        L[:, :2 * nf, 3 * nf:] = np.transpose(C, (0, 2, 1))
    if with_pd_mass:
        L[:, 3 * nf:, 3 * nf:] = forms.interface_pressure_mass(geo, faces, params)
    idx = np.concatenate([
        dm.ubar_start[faces][:, None] + np.arange(2 * nf),
        dm.ps_start[faces][:, None] + np.arange(nf),
        dm.pd_start[faces][:, None] + np.arange(nf)], axis=1)
    return idx, L


def _boundary_coupling_local(geo, dm, faces):
    """``-<qbar_s, vbar . n>`` on exterior Stokes faces (acts on prescribed traces)."""
    nf = dm.nf
    C = forms.interface_normal_coupling(geo, faces)
    L = np.zeros((len(faces), 3 * nf, 3 * nf))
    L[:, 2 * nf:, :2 * nf] = -C
    L[:, :2 * nf, 2 * nf:] = -np.transpose(C, (0, 2, 1))
    idx = np.concatenate([dm.ubar_start[faces][:, None] + np.arange(2 * nf),
                          dm.ps_start[faces][:, None] + np.arange(nf)], axis=1)
    return idx, L


def _to_hybrid(dm, groups, face_groups):
    """Build the full sparse matrix and the hybrid split from local matrices.

    ``groups`` holds ``(cells, facet_full_idx, local)`` with cell dofs first
    in each local matrix; ``face_groups`` holds ``(full_idx, local)``.
    """
    m = dm.cell_size
    store = ([], [], [])
    cell_blocks = np.zeros((dm.mesh.num_cells, m, m))
    couplings = []
    for cells, fidx, L in groups:
        idx = np.concatenate([dm.cell_full(cells), fidx], axis=1)
        _coo_add(store, idx, L)
        cell_blocks[cells] = L[:, :m, :m]
        sys_f = dm.full_to_sys[fidx]
        sys_f = np.where(sys_f >= 0, sys_f - dm.n_cell_dofs, -1)
        couplings.append((np.asarray(cells), L[:, m:, :m].copy(), sys_f))
    for idx, L in face_groups:
        _coo_add(store, idx, L)
    K = _coo_finish(store, dm.n_full)
    free = dm.sys_to_full
    ncd = dm.n_cell_dofs
    A22 = K[free[free >= ncd]][:, free[free >= ncd]].tocsr()
    return HybridMatrix(dm, cell_blocks, couplings, A22), K


# ---------------------------------------------------------------------------
# block system


@dataclass
class BlockSystem(HybridMatrix):
    f: np.ndarray = None           # cell right-hand side
    fbar: np.ndarray = None        # facet right-hand side
    prescribed: np.ndarray = None  # values of the prescribed dofs (full numbering)
    nullspace: np.ndarray = None   # system numbering
    params: PhysicalParams = None
    geo: MeshGeometry = field(default=None, repr=False)

    @property
    def rhs(self) -> np.ndarray:
        return np.concatenate([self.f, self.fbar])

    def full_vector(self, x_sys: np.ndarray) -> np.ndarray:
        """Insert prescribed values and return a full-numbering vector."""
        out = self.prescribed.copy()
        out[self.dofmap.sys_to_full] = x_sys
        return out


def _data_geometry(mesh, k):
    return MeshGeometry(mesh, k, extra_degree=DATA_EXTRA_DEGREE)


def _assemble_rhs(dm: DofMap, data: ProblemData, geo: MeshGeometry):
    """Full-numbering load vector and prescribed trace values."""
    mesh = dm.mesh
    T = geo.tables
    nk, nf, m = dm.nk, dm.nf, dm.cell_size
    F = np.zeros(dm.n_full)
    g = np.zeros(dm.n_full)
    sc = mesh.cells_in(Region.STOKES)
    dc = mesh.cells_in(Region.DARCY)
    if data.f_stokes is not None and len(sc):
        X = geo.cell_points[sc]
        fv = np.asarray(data.f_stokes(X[..., 0], X[..., 1]))  # (2, nc, nq)
        loc = np.einsum("iq,acq,cq->cai", T.V, fv, geo.cell_weights[sc]).reshape(len(sc), 2 * nk)
        F[dm.cell_full(sc)[:, :2 * nk]] += loc
    if data.f_darcy is not None and len(dc):
        X = geo.cell_points[dc]
        fv = np.asarray(data.f_darcy(X[..., 0], X[..., 1]))
        loc = np.einsum("iq,cq,cq->ci", T.Q, fv, geo.cell_weights[dc])
        F[dm.cell_full(dc)[:, 2 * nk:]] += loc
    if data.interface_traction is not None:
        faces = mesh.faces_of_class(FaceClass.INTERFACE)
        X = geo.face_points[faces]
        tv = np.asarray(data.interface_traction(X[..., 0], X[..., 1]))  # (2, nfc, nq)
        loc = np.einsum("jq,afq,fq->faj", T.F, tv, geo.face_weights[faces]).reshape(len(faces), 2 * nf)
        F[dm.ubar_start[faces][:, None] + np.arange(2 * nf)] += loc
    if data.darcy_normal_flux is not None:
        faces = mesh.faces_of_class(FaceClass.GAMMA_D)
        X = geo.face_points[faces]
        c0 = mesh.face_cells[faces, 0]
        e0 = np.argmax(mesh.cell_faces[c0] == faces[:, None], axis=1)
        n = geo.cell_normals[c0, e0]
        gn = np.asarray(data.darcy_normal_flux(X[..., 0], X[..., 1], n[:, 0:1], n[:, 1:2]))
        gn = np.broadcast_to(gn, X.shape[:-1])
        loc = np.einsum("jq,fq,fq->fj", T.F, gn, geo.face_weights[faces])
        F[dm.pd_start[faces][:, None] + np.arange(nf)] += loc
    if data.u_boundary is not None:
        faces = mesh.faces_of_class(FaceClass.GAMMA_S)
        X = geo.face_points[faces]
        uv = np.asarray(data.u_boundary(X[..., 0], X[..., 1]))
        uv = np.broadcast_to(uv, (2,) + X.shape[:-1])
        # orthonormal face basis: the L2 projection is a scaled moment
        coef = np.einsum("jq,afq,fq->faj", T.F, uv, geo.face_weights[faces])
        coef /= geo.face_len[faces][:, None, None]
        g[dm.ubar_start[faces][:, None] + np.arange(2 * nf)] = coef.reshape(len(faces), 2 * nf)
    return F, g


def _stokes_groups(geo, dm, params, sc, consistency=True, with_div=True, norm=False):
    D = forms.stokes_cell_matrix(geo, sc, params, consistency=consistency)
    if with_div:
        Bc, Bf = forms.divergence_blocks(geo, sc)
    else:
        Bc = Bf = None
    P = forms.stokes_pressure_norm_matrix(geo, sc, params) if norm else None
    return sc, dm.stokes_cell_facet_full(sc), _stokes_local(geo, dm, sc, D, Bc, Bf, P)


def assemble(mesh: Mesh2D, params: PhysicalParams, data: ProblemData | None = None,
             geo: MeshGeometry | None = None, dofmap: DofMap | None = None) -> BlockSystem:
    """Assemble the HDG Stokes-Darcy block system with prescribed traces eliminated."""
    data = data or ProblemData()
    geo = geo or MeshGeometry(mesh, params.k)
    dm = dofmap or build_dof_map(mesh, params.k)
    sc = mesh.cells_in(Region.STOKES)
    dc = mesh.cells_in(Region.DARCY)
    groups = []
    if len(sc):
        groups.append(_stokes_groups(geo, dm, params, sc))
    if len(dc):
        M = forms.darcy_cell_matrix(geo, dc, params)
        Bc, Bf = forms.divergence_blocks(geo, dc)
        groups.append((dc, dm.darcy_cell_facet_full(dc), _darcy_local(dm, M, Bc, Bf)))
    face_groups = []
    ifaces = mesh.faces_of_class(FaceClass.INTERFACE)
    if len(ifaces):
        face_groups.append(_interface_local(geo, dm, ifaces, params))
    bfaces = mesh.faces_of_class(FaceClass.GAMMA_S)
    if len(bfaces):
        face_groups.append(_boundary_coupling_local(geo, dm, bfaces))
    H, K = _to_hybrid(dm, groups, face_groups)

    F, g = _assemble_rhs(dm, data, _data_geometry(mesh, params.k))
    con = np.flatnonzero(dm.constrained)
    free = dm.sys_to_full
    b = F[free] - K[free][:, con] @ g[con]
    ncd = dm.n_cell_dofs
    return BlockSystem(dm, H.cell_blocks, H.couplings, H.A22, f=b[:ncd], fbar=b[ncd:],
                       prescribed=g, nullspace=dm.nullspace(), params=params, geo=geo)


def assemble_preconditioner_form(system_or_mesh, params: PhysicalParams | None = None,
                                 variant: str = "P", geo: MeshGeometry | None = None,
                                 dofmap: DofMap | None = None) -> HybridMatrix:
    """Block-diagonal operator ``P`` (weighted norms) or ``Phat`` (form based).

    ``variant="P"`` is the matrix of the X_h inner product used in the
    well-posedness analysis plus the interface terms; ``"Phat"`` replaces
    the Stokes velocity and Darcy pressure norms by the Stokes velocity
    form and the interior-penalty diffusion form.
    """
    if isinstance(system_or_mesh, BlockSystem):
        s = system_or_mesh
        mesh, params, geo, dm = s.dofmap.mesh, params or s.params, geo or s.geo, s.dofmap
    else:
        mesh = system_or_mesh
        geo = geo or MeshGeometry(mesh, params.k)
        dm = dofmap or build_dof_map(mesh, params.k)
    if variant not in ("P", "Phat"):
        raise ValueError(f"unknown preconditioner variant {variant!r}")
    form = variant == "Phat"
    sc = mesh.cells_in(Region.STOKES)
    dc = mesh.cells_in(Region.DARCY)
    groups = []
    if len(sc):
        groups.append(_stokes_groups(geo, dm, params, sc, consistency=form,
                                     with_div=False, norm=True))
    if len(dc):
        M = forms.darcy_cell_matrix(geo, dc, params)
        Pd = forms.tilde_dh_matrix(geo, dc, params, consistency=form)
        groups.append((dc, dm.darcy_cell_facet_full(dc), _darcy_local(dm, M, None, None, Pd)))
    face_groups = []
    ifaces = mesh.faces_of_class(FaceClass.INTERFACE)
    if len(ifaces):
        face_groups.append(_interface_local(geo, dm, ifaces, params, with_coupling=False,
                                            with_pd_mass=True))
    H, _ = _to_hybrid(dm, groups, face_groups)
    return H


def norm_matrix(system_or_mesh, params=None, **kw) -> sp.csr_matrix:
    """Matrix of the X_h inner product (velocity and pressure norms) on system dofs."""
    return assemble_preconditioner_form(system_or_mesh, params, variant="P", **kw).matrix()


def velocity_pressure_masks(dm: DofMap) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks of velocity and pressure unknowns in the system numbering."""
    vel = np.zeros(dm.n_full, dtype=bool)
    for c in range(dm.mesh.num_cells):
        vel[c * dm.cell_size:c * dm.cell_size + 2 * dm.nk] = True
    vel[dm._face_range(dm.ubar_start)] = True
    vel = vel[dm.sys_to_full]
    return vel, ~vel


def facet_seminorm_matrix(system: BlockSystem) -> sp.csr_matrix:
    """Facet seminorm of trace velocities on the system ``ubar`` block."""
    dm, geo = system.dofmap, system.geo
    sc = dm.mesh.cells_in(Region.STOKES)
    S = forms.facet_seminorm_cell_matrix(geo, sc)
    idx = dm.stokes_cell_facet_full(sc)[:, :6 * dm.nf]
    store = ([], [], [])
    _coo_add(store, idx, S)
    K = _coo_finish(store, dm.n_full)
    blk = dm.facet_blocks()["ubar"]
    sysidx = dm.sys_to_full[dm.n_cell_dofs + blk.start:dm.n_cell_dofs + blk.stop]
    return K[sysidx][:, sysidx].tocsr()


@dataclass
class CompatibilityReport:
    value: float
    rhs_norm: float
    tol: float = 1e-10

    @property
    def relative(self) -> float:
        return abs(self.value) / self.rhs_norm if self.rhs_norm > 0 else abs(self.value)

    @property
    def compatible(self) -> bool:
        return abs(self.value) <= self.tol * (self.rhs_norm or 1.0)

    def __str__(self) -> str:
        state = "compatible" if self.compatible else "INCONSISTENT"
        return f"<rhs, nullspace> = {self.value:.3e} (||rhs|| = {self.rhs_norm:.3e}): {state}"


def compatibility_check(system: BlockSystem, tol: float = 1e-10) -> CompatibilityReport:
    """Inner product of the right-hand side with the pressure null vector."""
    b = system.rhs
    return CompatibilityReport(float(system.nullspace @ b), float(np.linalg.norm(b)), tol)


# ---------------------------------------------------------------------------
# dumps


def dump_matrix(path, A) -> None:
    """Write a sparse matrix in MatrixMarket coordinate format."""
    scipy.io.mmwrite(str(path), sp.coo_matrix(A), comment="hdgsd system dump", field="real",
                     symmetry="general")


def dump_vector(path, v) -> None:
    scipy.io.mmwrite(str(path), np.asarray(v, dtype=float)[:, None], comment="hdgsd vector")


def load_matrix(path) -> sp.csr_matrix:
    return sp.csr_matrix(scipy.io.mmread(str(path)))


def dump_system(system: BlockSystem, directory) -> list[Path]:
    """Dump the full system matrix, rhs and null vector to ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    out = [d / "A.mtx", d / "rhs.mtx", d / "nullspace.mtx"]
    dump_matrix(out[0], system.matrix())
    dump_vector(out[1], system.rhs)
    dump_vector(out[2], system.nullspace)
    return out


def assemble_local_forms(dm: DofMap, groups, face_groups=()) -> sp.csr_matrix:
    """System-numbering matrix from local blocks given at full indices.

    ``groups`` and ``face_groups`` both hold ``(full_idx (n, L), local (n, L, L))``.
    """
    store = ([], [], [])
    for idx, L in list(groups) + list(face_groups):
        _coo_add(store, idx, L)
    K = _coo_finish(store, dm.n_full)
    free = dm.sys_to_full
    return K[free][:, free].tocsr()
