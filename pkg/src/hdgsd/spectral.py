"""Dense eigenvalue oracles for the stability and robustness constants.

Every constant is an extreme (generalized) eigenvalue on a small mesh.
Square roots are taken where the underlying inequality is stated for
norms rather than squared norms.  The pressure null vector is removed
where it would make a constant zero or infinite.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sl

from . import forms
from .assembly import (BlockSystem, assemble, assemble_local_forms, assemble_preconditioner_form,
                       velocity_pressure_masks)
from .condensation import condense
from .forms import PhysicalParams
from .mesh import FaceClass, Mesh2D, Region

CONSTANT_NAMES = ("c_b", "c_i", "c_1", "c_s", "c_l", "c_gamma", "c_bar",
                  "phat_min", "phat_max", "neg_min", "neg_max", "pos_min", "pos_max")


def _geig(A, B):
    """Generalized symmetric eigenvalues; ``B`` must be SPD."""
    return sl.eigh(_dense(A), _dense(B), eigvals_only=True)


def _dense(A):
    return A.toarray() if hasattr(A, "toarray") else np.asarray(A)


def _drop_kernel(ev: np.ndarray, count: int = 1) -> np.ndarray:
    order = np.argsort(np.abs(ev))
    return np.sort(ev[order[count:]])


def _restrict_to_complement(A, B, c):
    """Express ``A``, ``B`` on the subspace ``{x : c . x = 0}``."""
    c = np.asarray(c, dtype=float)
    Q, _ = np.linalg.qr(np.column_stack([c / np.linalg.norm(c), np.eye(len(c))]))
    Z = Q[:, 1:len(c)]
    return Z.T @ _dense(A) @ Z, Z.T @ _dense(B) @ Z


@dataclass
class SpectralReport:
    n: int
    k: int
    mu: float
    kappa: float
    alpha: float
    eta: float
    c_b: float = math.nan
    c_i: float = math.nan
    c_1: float = math.nan
    c_s: float = math.nan
    c_l: float = math.nan
    c_gamma: float = math.nan
    c_gamma_velocity: float = math.nan
    c_gamma_pressure: float = math.nan
    c_bar: float = math.nan
    phat_min: float = math.nan
    phat_max: float = math.nan
    neg_min: float = math.nan
    neg_max: float = math.nan
    pos_min: float = math.nan
    pos_max: float = math.nan
    flags: list = field(default_factory=list)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = ";".join(self.flags)
        return d


def _stokes_velocity_indices(system: BlockSystem) -> np.ndarray:
    """System indices of Stokes cell velocities and trace velocities."""
    dm = system.dofmap
    sc = dm.mesh.cells_in(Region.STOKES)
    full = [dm.cell_full(sc)[:, :2 * dm.nk].ravel(), dm._face_range(dm.ubar_start)]
    idx = dm.full_to_sys[np.concatenate(full)]
    return np.sort(idx[idx >= 0])


def _darcy_pressure_indices(system: BlockSystem) -> tuple[np.ndarray, np.ndarray]:
    dm = system.dofmap
    dc = dm.mesh.cells_in(Region.DARCY)
    cell = dm.full_to_sys[dm.cell_full(dc)[:, 2 * dm.nk:].ravel()]
    trace = dm.full_to_sys[dm._face_range(dm.pd_start)]
    return np.sort(cell), np.sort(trace)


def interface_trace_constants(system: BlockSystem) -> tuple[float, float]:
    """Constants of the two interface trace bounds (velocity, Darcy pressure)."""
    dm, geo, p = system.dofmap, system.geo, system.params
    mesh = dm.mesh
    nf = dm.nf
    sc, dc = mesh.cells_in(Region.STOKES), mesh.cells_in(Region.DARCY)
    ifaces = mesh.faces_of_class(FaceClass.INTERFACE)
    unit = p.with_(mu=1.0, kappa=1.0, alpha=1.0)

    # velocity: ||vbar||_G^2 <= c^2 (||eps(v)||^2 + eta ||h^-1/2 (v - vbar)||^2)
    D = forms.stokes_cell_matrix(geo, sc, unit, consistency=False) / 2.0
    vidx = np.concatenate([dm.cell_full(sc)[:, :2 * dm.nk], dm.stokes_cell_facet_full(sc)[:, :6 * nf]],
                          axis=1)
    R = assemble_local_forms(dm, [(vidx, D)])
    Mf = forms.interface_pressure_mass(geo, ifaces, unit)
    Mv = np.zeros((len(ifaces), 2 * nf, 2 * nf))
    Mv[:, :nf, :nf] = Mf
    Mv[:, nf:, nf:] = Mf
    fidx = dm.ubar_start[ifaces][:, None] + np.arange(2 * nf)
    L = assemble_local_forms(dm, [(fidx, Mv)])
    sv = _stokes_velocity_indices(system)
    cv = math.sqrt(max(_geig(L[sv][:, sv], R[sv][:, sv]).max(), 0.0))

    # pressure: same with grad/penalty form, on the zero-mean Darcy pressures
    Dq = forms.tilde_dh_matrix(geo, dc, unit, consistency=False)
    qidx = np.concatenate([dm.cell_full(dc)[:, 2 * dm.nk:], dm.darcy_cell_facet_full(dc)], axis=1)
    Rq = assemble_local_forms(dm, [(qidx, Dq)])
    pidx = dm.pd_start[ifaces][:, None] + np.arange(nf)
    Lq = assemble_local_forms(dm, [(pidx, Mf)])
    cidx, tidx = _darcy_pressure_indices(system)
    sq = np.concatenate([cidx, tidx])
    # cell-pressure integrals: the zero-mean constraint
    W = geo.cell_weights[dc]
    ints = np.einsum("iq,cq->ci", geo.tables.Q, W).ravel()
    c = np.concatenate([ints, np.zeros(len(tidx))])
    order = np.argsort(dm.full_to_sys[dm.cell_full(dc)[:, 2 * dm.nk:].ravel()])
    c[:len(cidx)] = ints[order]
    A2, B2 = _restrict_to_complement(Lq[sq][:, sq], Rq[sq][:, sq], c)
    cq = math.sqrt(max(_geig(A2, B2).max(), 0.0))
    return cv, cq


def facet_norm_constant(system: BlockSystem) -> float:
    """Smallest ``c`` with ``2 mu eta |||vbar|||_{v,h}^2 <= c^2 |||v|||_{v,s}^2``."""
    dm, geo, p = system.dofmap, system.geo, system.params
    sc = dm.mesh.cells_in(Region.STOKES)
    nf = dm.nf
    D = forms.stokes_cell_matrix(geo, sc, p, consistency=False)
    vidx = np.concatenate([dm.cell_full(sc)[:, :2 * dm.nk], dm.stokes_cell_facet_full(sc)[:, :6 * nf]],
                          axis=1)
    R = assemble_local_forms(dm, [(vidx, D)])
    Sf = forms.facet_seminorm_cell_matrix(geo, sc) * (2 * p.mu * p.eta)
    L = assemble_local_forms(dm, [(dm.stokes_cell_facet_full(sc)[:, :6 * nf], Sf)])
    sv = _stokes_velocity_indices(system)
    return math.sqrt(max(_geig(L[sv][:, sv], R[sv][:, sv]).max(), 0.0))


def spectral_suite(mesh: Mesh2D, params: PhysicalParams) -> SpectralReport:
    """Measure the stability/robustness constants on a (small) mesh."""
    kappa = params.kappa if not callable(params.kappa) else math.nan
    rep = SpectralReport(mesh.num_cells, params.k, params.mu, kappa, params.alpha, params.eta)
    system = assemble(mesh, params)
    dm = system.dofmap
    A = system.matrix().toarray()
    Nh = assemble_preconditioner_form(system, variant="P")
    N = Nh.matrix().toarray()
    vel, pre = velocity_pressure_masks(dm)

    def guarded(name, fn):
        try:
            fn()
        except (np.linalg.LinAlgError, ValueError) as exc:
            rep.flags.append(f"{name}: {exc}")

    def boundedness():
        ev = _drop_kernel(_geig(A, N))
        rep.c_b = float(np.abs(ev).max())
        rep.c_i = float(np.abs(ev).min())

    def coercivity():
        rep.c_1 = float(_geig(A[np.ix_(vel, vel)], N[np.ix_(vel, vel)]).min())
        if rep.c_1 <= 0:
            rep.flags.append("c_1: velocity form is not coercive (penalty too small)")

    def infsup():
        B = A[np.ix_(pre, vel)]
        Nv = N[np.ix_(vel, vel)]
        BNB = B @ np.linalg.solve(Nv, B.T)
        ev = _drop_kernel(_geig(BNB, N[np.ix_(pre, pre)]))
        rep.c_s = float(math.sqrt(max(ev.min(), 0.0)))

    def lifting():
        ncd = dm.n_cell_dofs
        A11 = A[:ncd, :ncd]
        A21 = A[ncd:, :ncd]
        E = np.vstack([-np.linalg.solve(A11, A21.T), np.eye(dm.n_facet)])
        SP = condense(Nh, spd=True).S.toarray()
        rep.c_l = float(math.sqrt(_geig(E.T @ N @ E, SP).max()))

    def traces():
        cv, cq = interface_trace_constants(system)
        rep.c_gamma_velocity, rep.c_gamma_pressure = cv, cq
        rep.c_gamma = max(cv, cq)

    def facet():
        rep.c_bar = facet_norm_constant(system)

    def precond_spectra():
        SP = condense(Nh, spd=True).S.toarray()
        Hh = assemble_preconditioner_form(system, variant="Phat")
        SPh = condense(Hh).S.toarray()
        ev = _geig(SPh, SP)
        rep.phat_min, rep.phat_max = float(ev.min()), float(ev.max())
        if ev.min() <= 0:
            rep.flags.append("phat: condensed form-based preconditioner is not positive definite")
        SA = condense(system).S.toarray()
        ev = _drop_kernel(_geig(SA, SP))
        neg, pos = ev[ev < 0], ev[ev > 0]
        if len(neg):
            rep.neg_min, rep.neg_max = float(neg.min()), float(neg.max())
        if len(pos):
            rep.pos_min, rep.pos_max = float(pos.min()), float(pos.max())

    for name, fn in (("boundedness", boundedness), ("coercivity", coercivity), ("infsup", infsup),
                     ("lifting", lifting), ("traces", traces), ("facet", facet),
                     ("spectra", precond_spectra)):
        guarded(name, fn)
    return rep


def sweep_parameters(mus=(1e-4, 1.0, 1e4), kappas=(1e-4, 1.0, 1e4), alphas=(0.1, 1.0),
                     c_alpha: float = 10.0):
    """Parameter triples satisfying ``alpha <= c_alpha * sqrt(kappa)``."""
    return [(mu, ka, al) for mu in mus for ka in kappas for al in alphas
            if al <= c_alpha * math.sqrt(ka) * (1 + 1e-12)]


def variation(values) -> float:
    """max/min ratio of magnitudes (inf if signs differ or a value is zero)."""
    v = np.asarray([x for x in values if np.isfinite(x)], dtype=float)
    if len(v) == 0:
        return math.nan
    if np.any(v == 0) or (np.any(v > 0) and np.any(v < 0)):
        return math.inf
    a = np.abs(v)
    return float(a.max() / a.min())
