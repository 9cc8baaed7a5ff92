import numpy as np
import pytest
import scipy.linalg as sl
from hypothesis import given, settings, strategies as st

from hdgsd.assembly import (ProblemData, assemble, assemble_preconditioner_form, build_dof_map,
                            compatibility_check, dump_system, load_matrix, norm_matrix,
                            velocity_pressure_masks)
from hdgsd.forms import PhysicalParams
from hdgsd.manufactured import ManufacturedCase
from hdgsd.mesh import FaceClass, build_structured_mesh

param_st = st.tuples(st.sampled_from([1e-4, 1e-2, 1.0, 1e2, 1e4]),
                     st.sampled_from([1e-4, 1e-2, 1.0, 1e2, 1e4]),
                     st.sampled_from([0.1, 1.0]))


def manufactured_system(n, k, mu=1.0, kappa=1.0, alpha=1.0):
    params = PhysicalParams(mu=mu, kappa=kappa, alpha=alpha, k=k)
    return assemble(build_structured_mesh(n), params, ManufacturedCase(params).problem_data())


@pytest.mark.parametrize("n,k", [(2, 1), (4, 1), (4, 2), (8, 3)])
def test_dof_counts_closed_form(n, k):
    dm = build_dof_map(build_structured_mesh(n), k)
    nk, nq, nf = (k + 1) * (k + 2) // 2, k * (k + 1) // 2, k + 1
    half_faces = 3 * n * n // 2 + 3 * n // 2       # faces of the closed Stokes (or Darcy) half
    assert dm.n_cell_dofs == 2 * n * n * (2 * nk + nq)
    assert dm.n_full == dm.n_cell_dofs + half_faces * 3 * nf + half_faces * nf
    assert dm.constrained.sum() == 2 * n * 2 * nf
    assert dm.n_facet == half_faces * 4 * nf - 4 * n * nf
    b = dm.facet_blocks()
    assert b["ubar"].stop - b["ubar"].start == (half_faces - 2 * n) * 2 * nf
    assert b["ps"].stop - b["ps"].start == half_faces * nf
    assert b["pd"].stop - b["pd"].start == half_faces * nf


def test_one_dimensional_kernel():
    s = manufactured_system(2, 1)
    A = s.matrix().toarray()
    np.testing.assert_allclose(A, A.T, atol=1e-12)
    assert np.abs(A @ s.nullspace).max() < 1e-12
    sv = sl.svdvals(A)
    assert sv[-1] < 1e-12 * sv[0]
    assert sv[-2] > 1e-8 * sv[0]


@settings(max_examples=10)
@given(param_st)
def test_symmetry_kernel_and_compatibility_over_parameters(prm):
    mu, kappa, alpha = prm
    s = manufactured_system(2, 2, mu, kappa, alpha)
    A = s.matrix()
    assert abs(A - A.T).max() <= 1e-12 * abs(A).max()
    assert np.abs(A @ s.nullspace).max() <= 1e-11 * abs(A).max()
    assert compatibility_check(s).compatible


@settings(max_examples=10)
@given(param_st, st.sampled_from(["P", "Phat"]))
def test_preconditioner_forms_symmetric(prm, variant):
    mu, kappa, alpha = prm
    s = manufactured_system(2, 2, mu, kappa, alpha)
    P = assemble_preconditioner_form(s, variant=variant).matrix()
    assert abs(P - P.T).max() <= 1e-12 * abs(P).max()


def test_norm_matrix_is_spd():
    s = manufactured_system(2, 1, mu=1e-2, kappa=1e2, alpha=0.1)
    ev = np.linalg.eigvalsh(norm_matrix(s).toarray())
    assert ev.min() > 0


def test_velocity_pressure_masks_partition():
    s = manufactured_system(2, 2)
    vel, pre = velocity_pressure_masks(s.dofmap)
    assert np.all(vel ^ pre)
    # the null vector is pure pressure
    assert not np.any(s.nullspace[vel])


def test_zero_data_gives_zero_rhs():
    s = assemble(build_structured_mesh(2), PhysicalParams(k=1), ProblemData())
    assert np.all(s.rhs == 0)
    assert compatibility_check(s).compatible


def test_prescribed_values_inserted():
    s = manufactured_system(2, 1)
    dm = s.dofmap
    x = np.zeros(dm.n_sys)
    full = s.full_vector(x)
    assert np.any(full[dm.constrained] != 0)
    assert np.all(full[~dm.constrained] == 0)


def test_inconsistent_rhs_detected():
    s = manufactured_system(2, 1)
    s.fbar = s.fbar + 1e-3 * s.nullspace[s.dofmap.n_cell_dofs:]
    assert not compatibility_check(s).compatible


def test_dump_roundtrip(tmp_path):
    s = manufactured_system(2, 1)
    paths = dump_system(s, tmp_path / "out")
    A = load_matrix(paths[0])
    assert abs(A - s.matrix()).max() == 0
    b = load_matrix(paths[1]).toarray().ravel()
    np.testing.assert_array_equal(b, s.rhs)
    z = load_matrix(paths[2]).toarray().ravel()
    np.testing.assert_array_equal(z, s.nullspace)


def test_interface_faces_carry_all_traces():
    dm = build_dof_map(build_structured_mesh(4), 1)
    f = dm.mesh.faces_of_class(FaceClass.INTERFACE)
    assert np.all(dm.ubar_start[f] >= 0) and np.all(dm.ps_start[f] >= 0) and np.all(dm.pd_start[f] >= 0)
    g = dm.mesh.faces_of_class(FaceClass.GAMMA_D)
    assert np.all(dm.ubar_start[g] < 0) and np.all(dm.pd_start[g] >= 0)
