import numpy as np
import pytest

from hdgsd.assembly import assemble, norm_matrix
from hdgsd.forms import PhysicalParams
from hdgsd.manufactured import ManufacturedCase
from hdgsd.mesh import build_structured_mesh
from hdgsd.solve import (kernel_distance, project_rhs, solve_condensed_direct, solve_full_direct,
                         solve_iterative)


def system(n, k, **kw):
    params = PhysicalParams(k=k, **kw)
    return assemble(build_structured_mesh(n), params, ManufacturedCase(params).problem_data())


@pytest.mark.parametrize("n,k", [(2, 1), (4, 2)])
def test_condensed_matches_full(n, k):
    s = system(n, k)
    x_full = solve_full_direct(s)
    x_cond = solve_condensed_direct(s)
    assert kernel_distance(s, x_cond, x_full, norm_matrix(s)) < 1e-9
    A = s.matrix()
    assert np.linalg.norm(A @ x_full - s.rhs) < 1e-10 * np.linalg.norm(s.rhs)


@pytest.mark.parametrize("variant,mode,solver", [("P", "exact", "minres"), ("P", "exact", "gmres"),
                                                 ("Phat", "exact", "minres"),
                                                 ("P", "inexact", "gmres"),
                                                 ("Phat", "inexact", "minres")])
def test_iterative_matches_direct(variant, mode, solver):
    s = system(4, 2, mu=0.1, kappa=10.0)
    res = solve_iterative(s, variant, mode, solver, tol=1e-10)
    assert res.converged
    assert kernel_distance(s, res.x, solve_full_direct(s), norm_matrix(s)) < 1e-6


def test_kernel_distance_ignores_null_shift():
    s = system(2, 1)
    x = solve_full_direct(s)
    assert kernel_distance(s, x + 5.0 * s.nullspace, x, norm_matrix(s)) < 1e-12


def test_project_rhs_orthogonal():
    z = np.array([1.0, 2.0, 0.0])
    b = np.array([3.0, -1.0, 4.0])
    assert project_rhs(b, z) @ z == pytest.approx(0.0, abs=1e-14)
    assert project_rhs(b, None) is b


def test_unknown_solver():
    with pytest.raises(ValueError, match="unknown solver"):
        solve_iterative(system(2, 2), solver="cg")
