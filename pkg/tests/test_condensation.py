import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdgsd.assembly import assemble, assemble_preconditioner_form
from hdgsd.condensation import NotPositiveDefiniteError, condense, local_solve, recover
from hdgsd.forms import PhysicalParams
from hdgsd.manufactured import ManufacturedCase
from hdgsd.mesh import build_structured_mesh


@pytest.fixture(scope="module")
def system():
    params = PhysicalParams(mu=0.3, kappa=5.0, alpha=0.5, k=2)
    return assemble(build_structured_mesh(2), params, ManufacturedCase(params).problem_data())


def dense_schur(system):
    A = system.matrix().toarray()
    n = system.dofmap.n_cell_dofs
    A11, A12, A21, A22 = A[:n, :n], A[:n, n:], A[n:, :n], A[n:, n:]
    S = A22 - A21 @ np.linalg.solve(A11, A12)
    g = system.fbar - A21 @ np.linalg.solve(A11, system.f)
    return S, g


def test_schur_complement_matches_dense(system):
    cs = condense(system, system.f, system.fbar)
    S, g = dense_schur(system)
    np.testing.assert_allclose(cs.S.toarray(), S, atol=1e-10 * abs(S).max())
    np.testing.assert_allclose(cs.g, g, atol=1e-10 * abs(g).max())
    assert abs(cs.S - cs.S.T).max() < 1e-10 * abs(S).max()


def test_recover_solves_full_system(system):
    A = system.matrix().toarray()
    xbar = np.random.default_rng(0).standard_normal(system.n_facet)
    x = recover(system, xbar, system.f)
    n = system.dofmap.n_cell_dofs
    np.testing.assert_allclose((A @ x)[:n], system.f, atol=1e-10 * np.abs(system.f).max())


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_local_solve_is_linear(system, seed, a, b):
    rng = np.random.default_rng(seed)
    x1, x2 = rng.standard_normal((2, system.n_facet))
    f1, f2 = rng.standard_normal((2, system.dofmap.n_cell_dofs))
    lhs = local_solve(system, a * x1 + b * x2, a * f1 + b * f2)
    rhs = a * local_solve(system, x1, f1) + b * local_solve(system, x2, f2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9 * (1 + np.abs(rhs).max()))


def test_spd_condensation_of_norm_operator(system):
    H = assemble_preconditioner_form(system, variant="P")
    S = condense(H, spd=True).S.toarray()
    assert np.linalg.eigvalsh(S).min() > 0


def test_indefinite_cell_block_reported():
    # a penalty well below the coercivity threshold makes the Stokes cell block indefinite
    mesh = build_structured_mesh(2)
    H = assemble_preconditioner_form(mesh, PhysicalParams(k=1, eta=0.5), variant="Phat")
    with pytest.raises(NotPositiveDefiniteError, match="stokes"):
        condense(H, spd=True)
    H = assemble_preconditioner_form(mesh, PhysicalParams(k=1, eta=8.0), variant="Phat")
    S = condense(H, spd=True).S.toarray()
    assert np.linalg.eigvalsh(S).min() > 0
