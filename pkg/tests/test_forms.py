"""Element kernels against exact symbolic integration on a two-cell mesh."""
import numpy as np
import pytest
import sympy as sp

import oracles
from conftest import PAIR_CELLS, PAIR_VERTICES
from hdgsd import forms
from hdgsd.forms import MeshGeometry, PhysicalParams
from hdgsd.mesh import FaceClass

TOL = 1e-12


def sym_triangle(mesh, c):
    verts = [PAIR_VERTICES[v] for v in PAIR_CELLS[c]]
    rat = lambda p: sp.Matrix([sp.Rational(p[0].numerator, p[0].denominator),
                               sp.Rational(p[1].numerator, p[1].denominator)])
    fv = []
    for e in range(3):
        a, b = mesh.faces[mesh.cell_faces[c, e]]
        fv.append((rat(PAIR_VERTICES[a]), rat(PAIR_VERTICES[b])))
    return oracles.SymTriangle([(sp.Rational(x.numerator, x.denominator),
                                 sp.Rational(y.numerator, y.denominator)) for x, y in verts], fv)


def assert_close(A, B):
    scale = max(1.0, np.abs(B).max())
    np.testing.assert_allclose(A, B, rtol=0, atol=TOL * scale)


@pytest.fixture(scope="module", params=[1, 2], ids=["k1", "k2"])
def setup(request, two_cell_mesh):
    k = request.param
    geo = MeshGeometry(two_cell_mesh, k)
    return k, geo, sym_triangle(two_cell_mesh, 0), sym_triangle(two_cell_mesh, 1)


@pytest.mark.parametrize("consistency", [True, False])
def test_stokes_cell_matrix(setup, consistency):
    k, geo, ts, _ = setup
    p = PhysicalParams(mu=1.7, k=k)
    A = forms.stokes_cell_matrix(geo, 0, p, consistency=consistency)
    assert_close(A, oracles.stokes_matrix(ts, k, 1.7, p.eta, consistency))


def test_darcy_cell_matrix(setup):
    k, geo, _, td = setup
    p = PhysicalParams(mu=1.7, kappa=0.3, k=k)
    assert_close(forms.darcy_cell_matrix(geo, 1, p), oracles.darcy_matrix(td, k, 1.7, 0.3))


@pytest.mark.parametrize("cell", [0, 1])
def test_divergence_blocks(setup, cell):
    k, geo, ts, td = setup
    Bc, Bf = forms.divergence_blocks(geo, cell)
    Oc, Of = oracles.divergence(ts if cell == 0 else td, k)
    assert_close(Bc, Oc)
    assert_close(Bf, Of)


@pytest.mark.parametrize("consistency", [True, False])
def test_tilde_dh_matrix(setup, consistency):
    k, geo, _, td = setup
    p = PhysicalParams(mu=0.5, kappa=3.0, k=k, eta=7.0)
    A = forms.tilde_dh_matrix(geo, 1, p, consistency=consistency)
    assert_close(A, oracles.tilde_dh(td, k, 0.5, 3.0, 7.0, consistency))


def test_stokes_pressure_norm_matrix(setup):
    k, geo, ts, _ = setup
    p = PhysicalParams(mu=2.0, k=k)
    A = forms.stokes_pressure_norm_matrix(geo, 0, p)
    assert_close(A, oracles.stokes_pressure_norm(ts, k, 2.0, p.eta))


def _interface_local_face(mesh):
    f = int(mesh.faces_of_class(FaceClass.INTERFACE)[0])
    return f, int(np.flatnonzero(mesh.cell_faces[0] == f)[0])


def test_interface_forms(setup):
    k, geo, ts, _ = setup
    f, e = _interface_local_face(geo.mesh)
    p = PhysicalParams(mu=1.3, kappa=0.04, alpha=0.7, k=k)
    assert_close(forms.interface_bjs_matrix(geo, f, p), oracles.bjs(ts, e, k, 1.3, 0.04, 0.7))
    assert_close(forms.interface_normal_coupling(geo, f), oracles.normal_coupling(ts, e, k))
    assert_close(forms.interface_pressure_mass(geo, f, p),
                 oracles.face_mass(ts, e, k) * np.sqrt(0.04) / (0.7 * 1.3))


def test_facet_seminorm(setup):
    k, geo, ts, _ = setup
    assert_close(forms.facet_seminorm_cell_matrix(geo, 0), oracles.facet_seminorm(ts, k))


def test_interface_normal_points_into_darcy(two_cell_mesh):
    geo = MeshGeometry(two_cell_mesh, 1)
    f, _ = _interface_local_face(two_cell_mesh)
    np.testing.assert_allclose(geo.interface_stokes_normal([f])[0], [0.0, -1.0], atol=1e-15)


def test_region_checks(two_cell_mesh):
    geo = MeshGeometry(two_cell_mesh, 1)
    with pytest.raises(ValueError, match="STOKES"):
        forms.stokes_cell_matrix(geo, 1, PhysicalParams(k=1))
    with pytest.raises(ValueError, match="interface"):
        forms.interface_bjs_matrix(geo, 0 if two_cell_mesh.face_class[0] != FaceClass.INTERFACE else 1,
                                   PhysicalParams(k=1))


def test_stokes_matrix_symmetric_and_rigid_kernel(setup):
    k, geo, _, _ = setup
    A = forms.stokes_cell_matrix(geo, 0, PhysicalParams(k=k))
    np.testing.assert_allclose(A, A.T, atol=1e-12)
    # a constant velocity with matching traces has zero energy
    nk, nf = geo.tables.nk, geo.tables.nf
    from hdgsd.basis import CellBasis, FaceBasis
    c, fc = CellBasis(k).constant_coeffs(), FaceBasis(k).constant_coeffs()
    v = np.concatenate([c, 0 * c] + [np.concatenate([fc, 0 * fc])] * 3)
    assert abs(v @ A @ v) < 1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams(mu=-1.0)
    with pytest.raises(ValueError):
        PhysicalParams(k=0)
    with pytest.raises(ValueError):
        PhysicalParams(kappa=0.0)
    assert PhysicalParams(k=3).eta == 36.0
    assert PhysicalParams(k=1).with_(k=2).eta == 16.0
    assert PhysicalParams(alpha=1.0, kappa=1e-4).assumption_violations() != []
