"""Manufactured and heterogeneous-permeability test cases, and error norms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import BlockSystem, ProblemData
from .forms import MeshGeometry, PhysicalParams
from .mesh import Mesh2D, Region

PI = np.pi
INTERFACE_Y = 0.5


# ---------------------------------------------------------------------------
# manufactured solution


def manufactured_eval(region, x, y, mu: float = 1.0, kappa: float = 1.0):
    """Exact ``(u, p)`` of the manufactured solution in ``region``.

    ``u`` has a leading axis of length 2.
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    e = np.exp(y / 2)
    s, c = np.sin(PI * x), np.cos(PI * x)
    if Region(region) == Region.STOKES:
        u = np.stack([-s * e / (2 * PI**2), c * e / PI])
        p = -mu / kappa * c * e / PI
    else:
        u = np.stack([-2 * s * e, c * e / PI])
        p = -2 * mu / kappa * c * e / PI
    return u, p


def _grad_u_stokes(x, y):
    """Velocity gradient ``G[a, b] = d u_a / d x_b`` of the Stokes solution."""
    e = np.exp(y / 2)
    s, c = np.sin(PI * x), np.cos(PI * x)
    return np.array([[-c * e / (2 * PI), -s * e / (4 * PI**2)],
                     [-s * e, c * e / (2 * PI)]])


@dataclass(frozen=True)
class ManufacturedCase:
    """Manufactured solution with derived sources and interface residuals.

    The solution satisfies normal-velocity continuity on the interface but,
    in general, neither the normal-stress balance nor the slip law; the
    residuals of those two conditions are returned as interface load
    densities so that the discrete problem stays consistent.
    """

    params: PhysicalParams

    def __post_init__(self):
        if callable(self.params.kappa):
            raise ValueError("the manufactured case needs a constant permeability")

    @property
    def mu(self) -> float:
        return self.params.mu

    @property
    def kappa(self) -> float:
        return float(self.params.kappa)

    def exact(self, region, x, y):
        return manufactured_eval(region, x, y, self.mu, self.kappa)

    def f_stokes(self, x, y):
        mu, ka = self.mu, self.kappa
        e = np.exp(y / 2)
        s, c = np.sin(PI * x), np.cos(PI * x)
        fx = -mu * s * e * (0.5 - 1 / (8 * PI**2)) + mu / ka * s * e
        fy = -mu * c * e * (-PI + 1 / (4 * PI)) - mu / ka * c * e / (2 * PI)
        return np.stack([fx, fy])

    def f_darcy(self, x, y):
        return (2 * PI - 1 / (2 * PI)) * np.cos(PI * x) * np.exp(y / 2)

    def u_boundary(self, x, y):
        return self.exact(Region.STOKES, x, y)[0]

    def darcy_normal_flux(self, x, y, nx, ny):
        u = self.exact(Region.DARCY, x, y)[0]
        return u[0] * nx + u[1] * ny

    def normal_stress_residual(self, x, y):
        """``2 mu eps(u^s) n . n - p^s + p^d`` on the interface (n = (0, -1))."""
        G = _grad_u_stokes(x, y)
        _, ps = self.exact(Region.STOKES, x, y)
        _, pd = self.exact(Region.DARCY, x, y)
        return 2 * self.mu * G[1, 1] - ps + pd

    def slip_residual(self, x, y):
        """Tangential (x) component of ``2 mu eps(u^s) n + alpha mu kappa^-1/2 u^s``."""
        G = _grad_u_stokes(x, y)
        u, _ = self.exact(Region.STOKES, x, y)
        eps_xy = 0.5 * (G[0, 1] + G[1, 0])
        return -2 * self.mu * eps_xy + self.params.alpha * self.mu / np.sqrt(self.kappa) * u[0]

    def interface_traction(self, x, y):
        """Load density ``g`` such that ``<g, vbar>`` restores consistency."""
        # n = (0, -1): normal part acts on vbar_y with sign -1
        return np.stack([self.slip_residual(x, y), -self.normal_stress_residual(x, y)])

    def problem_data(self) -> ProblemData:
        return ProblemData(self.f_stokes, self.f_darcy, self.u_boundary,
                           self.darcy_normal_flux, self.interface_traction)


def derive_sources_and_corrections(params: PhysicalParams) -> ManufacturedCase:
    return ManufacturedCase(params)


# ---------------------------------------------------------------------------
# heterogeneous permeability case


class KappaField:
    """Oscillating permeability with values in [100, 1500]."""

    def __call__(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        osc = np.sin(10 * PI * x) * np.cos(20 * PI * y**2) + np.cos(6.4 * PI * x)**2 * np.sin(9.2 * PI * y)
        return 700 * (1 + 0.5 * osc) + 100

    def __repr__(self) -> str:
        return "KappaField()"


def heterogeneous_data() -> ProblemData:
    """Shear inflow on the top, no slip on the sides, no flux through the Darcy boundary."""

    def u_boundary(x, y):
        top = np.isclose(y, 1.0)
        ux = np.where(top, y * (1.5 - y) / 5, 0.0)
        return np.stack([ux, np.zeros_like(ux)])

    return ProblemData(u_boundary=u_boundary)


def heterogeneous_params(mu: float, k: int = 2, alpha: float = 1.0, **kw) -> PhysicalParams:
    return PhysicalParams(mu=mu, kappa=KappaField(), alpha=alpha, k=k, **kw)


# ---------------------------------------------------------------------------
# error norms


@dataclass
class ErrorReport:
    velocity_l2: float
    pressure_l2: float
    velocity_x: float
    pressure_x: float

    def as_dict(self) -> dict:
        return dict(velocity_l2=self.velocity_l2, pressure_l2=self.pressure_l2,
                    velocity_x=self.velocity_x, pressure_x=self.pressure_x)


def interpolate_exact(system: BlockSystem, case: ManufacturedCase, geo: MeshGeometry | None = None):
    """Cell-wise and face-wise L2 projections of the exact solution (system numbering)."""
    from .assembly import DATA_EXTRA_DEGREE

    dm = system.dofmap
    mesh = dm.mesh
    geo = geo or MeshGeometry(mesh, dm.k, extra_degree=DATA_EXTRA_DEGREE)
    T = geo.tables
    nk, nf = dm.nk, dm.nf
    full = np.zeros(dm.n_full)
    p_mean_num = 0.0
    for region in (Region.STOKES, Region.DARCY):
        cells = mesh.cells_in(region)
        if not len(cells):
            continue
        X = geo.cell_points[cells]
        W = geo.cell_weights[cells]
        u, p = case.exact(region, X[..., 0], X[..., 1])
        area = W.sum(axis=1)
        # orthonormal reference basis: physical mass matrix is |det J| * 2 * I
        scale = 1.0 / (2 * area)
        cu = np.einsum("iq,acq,cq->cai", T.V, u, W) * scale[:, None, None]
        cp = np.einsum("iq,cq,cq->ci", T.Q, p, W) * scale[:, None]
        idx = dm.cell_full(cells)
        full[idx[:, :2 * nk]] = cu.reshape(len(cells), 2 * nk)
        full[idx[:, 2 * nk:]] = cp
        p_mean_num += np.sum(p * W)
    L = geo.face_len
    for start, region, vec in ((dm.ubar_start, Region.STOKES, True),
                               (dm.ps_start, Region.STOKES, False),
                               (dm.pd_start, Region.DARCY, False)):
        faces = np.flatnonzero(start >= 0)
        X = geo.face_points[faces]
        u, p = case.exact(region, X[..., 0], X[..., 1])
        wf = geo.face_weights[faces] / L[faces][:, None]
        if vec:
            c = np.einsum("jq,afq,fq->faj", T.F, u, wf).reshape(len(faces), 2 * nf)
            full[start[faces][:, None] + np.arange(2 * nf)] = c
        else:
            c = np.einsum("jq,fq,fq->fj", T.F, p, wf)
            full[start[faces][:, None] + np.arange(nf)] = c
    return full[dm.sys_to_full], p_mean_num


def error_norms(system: BlockSystem, x: np.ndarray, case: ManufacturedCase,
                norm_matrix=None) -> ErrorReport:
    """L2 errors against the exact fields and discrete X_h-norm errors.

    ``x`` is the system-numbering solution.  Its pressure is shifted along
    the null vector so that the mean pressure equals the exact one.  The
    L2 errors use a quadrature rule of degree ``2k + 2 + 14``, which
    resolves the exponential/trigonometric integrands to round-off at the
    mesh sizes of interest.  The X_h errors compare against the cell and
    face L2 projections of the exact solution.
    """
    from .assembly import DATA_EXTRA_DEGREE, norm_matrix as _norm, velocity_pressure_masks

    dm = system.dofmap
    mesh = dm.mesh
    geo = MeshGeometry(mesh, dm.k, extra_degree=DATA_EXTRA_DEGREE)
    T = geo.tables
    nk = dm.nk
    z = system.nullspace
    # align the mean pressure with the exact one
    xi, exact_p_int = interpolate_exact(system, case, geo)
    xc = x[:dm.n_cell_dofs].reshape(mesh.num_cells, dm.cell_size)
    zc = z[:dm.n_cell_dofs].reshape(mesh.num_cells, dm.cell_size)
    W = geo.cell_weights
    ph = np.einsum("ci,iq->cq", xc[:, 2 * nk:], T.Q)
    zh = np.einsum("ci,iq->cq", zc[:, 2 * nk:], T.Q)
    shift = (exact_p_int - np.sum(ph * W)) / np.sum(zh * W)
    x = x + shift * z
    xc = x[:dm.n_cell_dofs].reshape(mesh.num_cells, dm.cell_size)
    eu2 = ep2 = 0.0
    for region in (Region.STOKES, Region.DARCY):
        cs = mesh.cells_in(region)
        X = geo.cell_points[cs]
        u, p = case.exact(region, X[..., 0], X[..., 1])
        uh = np.einsum("cai,iq->acq", xc[cs, :2 * nk].reshape(len(cs), 2, nk), T.V)
        phr = np.einsum("ci,iq->cq", xc[cs, 2 * nk:], T.Q)
        eu2 += np.sum((uh - u) ** 2 * W[cs][None])
        ep2 += np.sum((phr - p) ** 2 * W[cs])
    N = norm_matrix if norm_matrix is not None else _norm(system)
    vel, pre = velocity_pressure_masks(dm)
    d = xi - x
    dv, dp = np.where(vel, d, 0.0), np.where(pre, d, 0.0)
    return ErrorReport(float(np.sqrt(eu2)), float(np.sqrt(ep2)),
                       float(np.sqrt(max(dv @ (N @ dv), 0.0))),
                       float(np.sqrt(max(dp @ (N @ dp), 0.0))))
