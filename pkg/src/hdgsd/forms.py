"""Element matrices of the HDG Stokes-Darcy forms and the weighted norms.

All cell kernels are batched: they take an array of cell indices and
return a stack of dense local matrices.  Local layouts are

* Stokes velocity:  ``[u_x (nk) | u_y (nk) | ubar on faces 0, 1, 2]`` where
  each face block is ``[x (k+1) | y (k+1)]``;
* cell velocity/pressure pairs: ``[u_x | u_y | p (nq)]``;
* pressure with traces: ``[p (nq) | pbar on faces 0, 1, 2 ((k+1) each)]``.

``nk = dim P_k`` and ``nq = dim P_{k-1}``.  Face functions are expanded in
the orthonormal Legendre basis in the face's global orientation, so two
cells sharing a face see identical trace functions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .basis import CellBasis, FaceBasis
from .mesh import FaceClass, Mesh2D, Region
from .quadrature import edge_quadrature, triangle_quadrature

KappaLike = Union[float, Callable[[np.ndarray, np.ndarray], np.ndarray]]

REF_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class PhysicalParams:
    """Viscosity ``mu``, permeability ``kappa`` (constant or field), BJS ``alpha``.

    ``eta`` defaults to ``4 k**2``.  ``c_alpha`` is the constant of the
    assumption ``alpha <= c_alpha * sqrt(kappa)`` and is only used for
    reporting.
    """

    mu: float = 1.0
    kappa: KappaLike = 1.0
    alpha: float = 1.0
    k: int = 2
    eta: float | None = None
    c_alpha: float = 10.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("polynomial degree k must be >= 1")
        if not self.mu > 0 or not self.alpha > 0:
            raise ValueError("mu and alpha must be positive")
        if not callable(self.kappa) and not float(self.kappa) > 0:
            raise ValueError("kappa must be positive")
        if self.eta is None:
            object.__setattr__(self, "eta", 4.0 * self.k**2)
        if not self.eta > 0:
            raise ValueError("eta must be positive")

    def kappa_at(self, pts: np.ndarray) -> np.ndarray:
        """Permeability at points of shape (..., 2)."""
        pts = np.asarray(pts, dtype=float)
        if callable(self.kappa):
            val = np.asarray(self.kappa(pts[..., 0], pts[..., 1]), dtype=float)
            if np.any(val <= 0):
                raise ValueError("kappa field must be positive at all quadrature points")
            return np.broadcast_to(val, pts.shape[:-1]).copy()
        return np.full(pts.shape[:-1], float(self.kappa))

    def with_(self, **kw) -> "PhysicalParams":
        d = dict(mu=self.mu, kappa=self.kappa, alpha=self.alpha, k=self.k,
                 eta=self.eta, c_alpha=self.c_alpha)
        d.update(kw)
        if "k" in kw and "eta" not in kw:
            d["eta"] = None
        return PhysicalParams(**d)

    def assumption_violations(self, kappa_min: float | None = None) -> list[str]:
        out = []
        if self.eta <= 1:
            out.append(f"penalty eta={self.eta} is not > 1")
        kmin = kappa_min if kappa_min is not None else (
            None if callable(self.kappa) else float(self.kappa))
        if kmin is not None and self.alpha > self.c_alpha * np.sqrt(kmin):
            out.append(f"alpha={self.alpha} > c_alpha*sqrt(kappa)={self.c_alpha * np.sqrt(kmin):g}")
        return out


class ReferenceTables:
    """Basis tables at the reference quadrature points for degree ``k``."""

    def __init__(self, k: int, extra_degree: int = 0):
        self.k = k
        self.vbasis = CellBasis(k)
        self.qbasis = CellBasis(k - 1)
        self.fbasis = FaceBasis(k)
        self.cell_quad = triangle_quadrature(2 * k + 2 + extra_degree)
        self.face_quad = edge_quadrature(2 * k + 2 + extra_degree)
        pts = self.cell_quad.points
        self.V, self.dV = self.vbasis.values(pts), self.vbasis.gradients(pts)
        self.Q, self.dQ = self.qbasis.values(pts), self.qbasis.gradients(pts)
        t = self.face_quad.points[:, 0]
        self.F = self.fbasis.values(t)
        # face tables indexed [local face e][flip]; flip=1 reverses the edge
        self.Vf, self.dVf, self.Qf, self.dQf = [], [], [], []
        for e in range(3):
            a, b = REF_VERTICES[(e + 1) % 3], REF_VERTICES[(e + 2) % 3]
            per = [[], [], [], []]
            for s in (t, 1.0 - t):
                x = a[None, :] + s[:, None] * (b - a)[None, :]
                per[0].append(self.vbasis.values(x))
                per[1].append(self.vbasis.gradients(x))
                per[2].append(self.qbasis.values(x))
                per[3].append(self.qbasis.gradients(x))
            self.Vf.append(np.array(per[0]))
            self.dVf.append(np.array(per[1]))
            self.Qf.append(np.array(per[2]))
            self.dQf.append(np.array(per[3]))

    @property
    def nk(self) -> int:
        return self.vbasis.count

    @property
    def nq(self) -> int:
        return self.qbasis.count

    @property
    def nf(self) -> int:
        return self.fbasis.count


@dataclass
class MeshGeometry:
    """Affine-map data for every cell plus basis tables for degree ``k``."""

    mesh: Mesh2D
    k: int
    extra_degree: int = 0
    tables: ReferenceTables = field(init=False)

    def __post_init__(self):
        m = self.mesh
        self.tables = T = ReferenceTables(self.k, self.extra_degree)
        p = m.vertices[m.cells]
        J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)  # columns
        self.J = J
        self.detJ = np.linalg.det(J)
        self.JinvT = np.transpose(np.linalg.inv(J), (0, 2, 1))
        self.cell_points = p[:, 0][:, None, :] + np.einsum("cij,qj->cqi", J, T.cell_quad.points)
        self.cell_weights = T.cell_quad.weights[None, :] * np.abs(self.detJ)[:, None]
        self.h = m.h_K
        fv = m.vertices[m.faces]
        t = T.face_quad.points[:, 0]
        self.face_points = fv[:, 0][:, None, :] + t[None, :, None] * (fv[:, 1] - fv[:, 0])[:, None, :]
        self.face_len = m.face_lengths()
        self.face_weights = T.face_quad.weights[None, :] * self.face_len[:, None]
        self.face_normal = m.face_normals()
        self.flip = (m.cell_face_sign < 0).astype(int)
        # outward normals of each cell on its local faces, (nc, 3, 2)
        self.cell_normals = self.face_normal[m.cell_faces] * m.cell_face_sign[:, :, None]
        self.grad_V = np.einsum("cde,ieq->cidq", self.JinvT, T.dV)
        self.grad_Q = np.einsum("cde,ieq->cidq", self.JinvT, T.dQ)

    def face_tables(self, cells, e):
        """Cell basis values/physical gradients on local face ``e``."""
        T = self.tables
        fl = self.flip[cells, e]
        JT = self.JinvT[cells]
        V = T.Vf[e][fl]
        dV = np.einsum("cde,cieq->cidq", JT, T.dVf[e][fl])
        Q = T.Qf[e][fl]
        dQ = np.einsum("cde,cieq->cidq", JT, T.dQf[e][fl])
        return V, dV, Q, dQ

    def interface_stokes_normal(self, faces) -> np.ndarray:
        """Unit normal on interface faces pointing from Stokes into Darcy."""
        m = self.mesh
        faces = np.atleast_1d(faces)
        out = np.empty((len(faces), 2))
        for i, f in enumerate(faces):
            c0, c1 = m.face_cells[f]
            c = c0 if m.cell_region[c0] == Region.STOKES else c1
            e = int(np.flatnonzero(m.cell_faces[c] == f)[0])
            out[i] = self.cell_normals[c, e]
        return out


def _as_cells(geo: MeshGeometry, cells, region):
    scalar = np.ndim(cells) == 0
    cells = np.atleast_1d(np.asarray(cells, dtype=int))
    bad = geo.mesh.cell_region[cells] != int(region)
    if np.any(bad):
        raise ValueError(f"cells {cells[bad].tolist()} are not in the {Region(region).name} region")
    return cells, scalar


def _ret(A, scalar):
    return A[0] if scalar else A


def _vector_sym_grad(G):
    """Symmetric gradients of the vector basis from scalar gradients.

    G has shape (nc, nk, 2, nq); the result has shape (nc, 2 nk, 2, 2, nq)
    ordered ``[x components | y components]``.
    """
    nc, nk, _, nq = G.shape
    E = np.zeros((nc, 2, nk, 2, 2, nq))
    for comp in range(2):
        E[:, comp, :, comp, :, :] += 0.5 * G
        E[:, comp, :, :, comp, :] += 0.5 * G
    return E.reshape(nc, 2 * nk, 2, 2, nq)


def stokes_cell_matrix(geo: MeshGeometry, cells, params: PhysicalParams,
                       consistency: bool = True) -> np.ndarray:
    """Local matrix of the Stokes velocity form on ``[u | ubar]``.

    With ``consistency=False`` the two symmetric-gradient flux terms are
    dropped, which gives the weighted velocity inner product of the Stokes
    region instead of the bilinear form.
    """
    cells, scalar = _as_cells(geo, cells, Region.STOKES)
    T = geo.tables
    nk, nf = T.nk, T.nf
    nc = len(cells)
    mu, eta = params.mu, params.eta
    ncell = 2 * nk
    size = ncell + 3 * 2 * nf
    E = _vector_sym_grad(geo.grad_V[cells])
    W = geo.cell_weights[cells]
    A = np.zeros((nc, size, size))
    A[:, :ncell, :ncell] = 2 * mu * np.einsum("cIabq,cJabq,cq->cIJ", E, E, W)
    for e in range(3):
        V, dV, _, _ = geo.face_tables(cells, e)
        n = geo.cell_normals[cells, e]
        wf = geo.face_weights[geo.mesh.cell_faces[cells, e]]
        nqf = wf.shape[1]
        jump = np.zeros((nc, size, 2, nqf))
        off = ncell + e * 2 * nf
        for comp in range(2):
            jump[:, comp * nk:(comp + 1) * nk, comp, :] = V
            jump[:, off + comp * nf:off + (comp + 1) * nf, comp, :] = -T.F[None]
        pen = (2 * mu * eta / geo.h[cells])[:, None, None]
        A += pen * np.einsum("cIaq,cJaq,cq->cIJ", jump, jump, wf)
        if consistency:
            Ef = _vector_sym_grad(dV)
            En = np.zeros((nc, size, 2, nqf))
            En[:, :ncell] = np.einsum("cIabq,cb->cIaq", Ef, n)
            C = -2 * mu * np.einsum("cIaq,cJaq,cq->cIJ", En, jump, wf)
            A += C + np.transpose(C, (0, 2, 1))
    return _ret(A, scalar)


def darcy_cell_matrix(geo: MeshGeometry, cells, params: PhysicalParams) -> np.ndarray:
    """``mu * (kappa^{-1} u, v)_K`` on ``[u_x | u_y]``, kappa at quadrature points."""
    cells, scalar = _as_cells(geo, cells, Region.DARCY)
    T = geo.tables
    nk = T.nk
    W = geo.cell_weights[cells] / params.kappa_at(geo.cell_points[cells])
    M = params.mu * np.einsum("iq,jq,cq->cij", T.V, T.V, W)
    A = np.zeros((len(cells), 2 * nk, 2 * nk))
    A[:, :nk, :nk] = M
    A[:, nk:, nk:] = M
    return _ret(A, scalar)


def divergence_blocks(geo: MeshGeometry, cells):
    """Cell divergence blocks ``(B_cell, B_face)``.

    ``B_cell[l, I] = -(q_l, div v_I)_K`` has shape (nq, 2 nk) and
    ``B_face[j, I] = <qbar_j, v_I . n>_{dK}`` has shape (3 (k+1), 2 nk), with
    rows grouped by local face.  The same blocks serve both regions.
    """
    scalar = np.ndim(cells) == 0
    cells = np.atleast_1d(np.asarray(cells, dtype=int))
    T = geo.tables
    nk, nf = T.nk, T.nf
    nc = len(cells)
    G = geo.grad_V[cells]
    W = geo.cell_weights[cells]
    Bc = -np.einsum("lq,cidq,cq->cldi", T.Q, G, W).reshape(nc, T.nq, 2 * nk)
    Bf = np.zeros((nc, 3 * nf, 2 * nk))
    for e in range(3):
        V, _, _, _ = geo.face_tables(cells, e)
        n = geo.cell_normals[cells, e]
        wf = geo.face_weights[geo.mesh.cell_faces[cells, e]]
        Bf[:, e * nf:(e + 1) * nf] = np.einsum(
            "jq,ciq,cd,cq->cjdi", T.F, V, n, wf).reshape(nc, nf, 2 * nk)
    if scalar:
        return Bc[0], Bf[0]
    return Bc, Bf


def tilde_dh_matrix(geo: MeshGeometry, cells, params: PhysicalParams,
                    consistency: bool = True) -> np.ndarray:
    """Interior-penalty HDG diffusion form with coefficient ``kappa / mu``.

    Acts on ``[p | pbar]`` of a Darcy cell.  ``consistency=False`` gives the
    weighted Darcy pressure inner product (gradient plus penalty only).
    """
    cells, scalar = _as_cells(geo, cells, Region.DARCY)
    T = geo.tables
    nq, nf = T.nq, T.nf
    nc = len(cells)
    size = nq + 3 * nf
    imu = 1.0 / params.mu
    GQ = geo.grad_Q[cells]
    kW = geo.cell_weights[cells] * params.kappa_at(geo.cell_points[cells])
    A = np.zeros((nc, size, size))
    A[:, :nq, :nq] = imu * np.einsum("cidq,cjdq,cq->cij", GQ, GQ, kW)
    for e in range(3):
        _, _, Q, dQ = geo.face_tables(cells, e)
        faces = geo.mesh.cell_faces[cells, e]
        n = geo.cell_normals[cells, e]
        kwf = geo.face_weights[faces] * params.kappa_at(geo.face_points[faces])
        nqf = kwf.shape[1]
        jump = np.zeros((nc, size, nqf))
        jump[:, :nq] = Q
        jump[:, nq + e * nf:nq + (e + 1) * nf] = -T.F[None]
        pen = (imu * params.eta / geo.h[cells])[:, None, None]
        A += pen * np.einsum("cIq,cJq,cq->cIJ", jump, jump, kwf)
        if consistency:
            dn = np.zeros((nc, size, nqf))
            dn[:, :nq] = np.einsum("cidq,cd->ciq", dQ, n)
            C = -imu * np.einsum("cIq,cJq,cq->cIJ", dn, jump, kwf)
            A += C + np.transpose(C, (0, 2, 1))
    return _ret(A, scalar)


def stokes_pressure_norm_matrix(geo: MeshGeometry, cells, params: PhysicalParams) -> np.ndarray:
    """``(2 mu)^-1 (p, q)_K + (2 mu eta)^-1 h_K <pbar, qbar>_{dK}`` on ``[p | pbar]``."""
    cells, scalar = _as_cells(geo, cells, Region.STOKES)
    T = geo.tables
    nq, nf = T.nq, T.nf
    nc = len(cells)
    A = np.zeros((nc, nq + 3 * nf, nq + 3 * nf))
    A[:, :nq, :nq] = np.einsum("iq,jq,cq->cij", T.Q, T.Q, geo.cell_weights[cells]) / (2 * params.mu)
    for e in range(3):
        wf = geo.face_weights[geo.mesh.cell_faces[cells, e]]
        s = slice(nq + e * nf, nq + (e + 1) * nf)
        A[:, s, s] = np.einsum("iq,jq,cq->cij", T.F, T.F, wf) * (
            geo.h[cells] / (2 * params.mu * params.eta))[:, None, None]
    return _ret(A, scalar)


def _interface_faces(geo, faces):
    scalar = np.ndim(faces) == 0
    faces = np.atleast_1d(np.asarray(faces, dtype=int))
    bad = geo.mesh.face_class[faces] != FaceClass.INTERFACE
    if np.any(bad):
        raise ValueError(f"faces {faces[bad].tolist()} are not interface faces")
    return faces, scalar


def interface_bjs_matrix(geo: MeshGeometry, faces, params: PhysicalParams) -> np.ndarray:
    """``alpha mu <kappa^{-1/2} ubar^t, vbar^t>_F`` on ``[ubar_x | ubar_y]``."""
    faces, scalar = _interface_faces(geo, faces)
    F = geo.tables.F
    nf = F.shape[0]
    n = geo.interface_stokes_normal(faces)
    w = geo.face_weights[faces] / np.sqrt(params.kappa_at(geo.face_points[faces]))
    M = params.alpha * params.mu * np.einsum("iq,jq,cq->cij", F, F, w)
    P = np.eye(2)[None] - np.einsum("ca,cb->cab", n, n)
    A = np.einsum("cab,cij->caibj", P, M).reshape(len(faces), 2 * nf, 2 * nf)
    return _ret(A, scalar)


def interface_normal_coupling(geo: MeshGeometry, faces) -> np.ndarray:
    """``C[j, (a, i)] = <qbar_j, vbar_i n_a>_F`` with the Stokes-to-Darcy normal.

    The Stokes trace-pressure block of the interface coupling is ``-C`` and
    the Darcy one is ``+C`` (the Darcy outward normal is ``-n``).
    """
    scalar = np.ndim(faces) == 0
    faces = np.atleast_1d(np.asarray(faces, dtype=int))
    F = geo.tables.F
    nf = F.shape[0]
    if np.all(geo.mesh.face_class[faces] == FaceClass.INTERFACE):
        n = geo.interface_stokes_normal(faces)
    else:
        # Stokes boundary faces: outward normal of the only neighbour
        n = np.empty((len(faces), 2))
        for i, f in enumerate(faces):
            c = geo.mesh.face_cells[f, 0]
            e = int(np.flatnonzero(geo.mesh.cell_faces[c] == f)[0])
            n[i] = geo.cell_normals[c, e]
    M = np.einsum("iq,jq,cq->cij", F, F, geo.face_weights[faces])
    C = np.einsum("cji,ca->cjai", M, n).reshape(len(faces), nf, 2 * nf)
    return _ret(C, scalar)


def interface_pressure_mass(geo: MeshGeometry, faces, params: PhysicalParams) -> np.ndarray:
    """``alpha^-1 mu^-1 <kappa^{1/2} pbar, qbar>_F``."""
    faces, scalar = _interface_faces(geo, faces)
    F = geo.tables.F
    w = geo.face_weights[faces] * np.sqrt(params.kappa_at(geo.face_points[faces]))
    A = np.einsum("iq,jq,cq->cij", F, F, w) / (params.alpha * params.mu)
    return _ret(A, scalar)


def facet_seminorm_cell_matrix(geo: MeshGeometry, cells) -> np.ndarray:
    """``h_K^-1 ||vbar - m_K(vbar)||^2_{dK}`` on the trace-velocity layout."""
    scalar = np.ndim(cells) == 0
    cells = np.atleast_1d(np.asarray(cells, dtype=int))
    F = geo.tables.F
    nf = F.shape[0]
    nc = len(cells)
    faces = geo.mesh.cell_faces[cells]
    wf = geo.face_weights[faces]                       # (nc, 3, nq)
    Mf = np.einsum("iq,jq,ceq->ceij", F, F, wf)         # per-face mass
    mvec = np.einsum("iq,ceq->cei", F, wf).reshape(nc, 3 * nf)
    perim = geo.face_len[faces].sum(axis=1)
    S = np.zeros((nc, 3 * nf, 3 * nf))
    for e in range(3):
        S[:, e * nf:(e + 1) * nf, e * nf:(e + 1) * nf] = Mf[:, e]
    S -= np.einsum("ci,cj->cij", mvec, mvec) / perim[:, None, None]
    S /= geo.h[cells][:, None, None]
    # expand scalar layout (face, j) to vector layout (face, comp, j)
    A = np.zeros((nc, 3, 2, nf, 3, 2, nf))
    S4 = S.reshape(nc, 3, nf, 3, nf)
    for comp in range(2):
        A[:, :, comp, :, :, comp, :] = S4
    return _ret(A.reshape(nc, 6 * nf, 6 * nf), scalar)


def cell_mean(geo: MeshGeometry, cell: int, coeffs: np.ndarray, basis: str = "v") -> float:
    """Mean value over a cell of a scalar field given by basis coefficients."""
    T = geo.tables
    tab = T.V if basis == "v" else T.Q
    vals = coeffs @ tab
    w = geo.cell_weights[cell]
    return float(vals @ w / w.sum())
