import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from hdgsd.assembly import ProblemData, assemble
from hdgsd.forms import PhysicalParams
from hdgsd.manufactured import ManufacturedCase
from hdgsd.mesh import build_structured_mesh, mesh_from_json
from hdgsd.preconditioners import (PreconditionerBuildError, SymmetricGaussSeidel, build_precond)
from hdgsd.solve import solve_iterative


def system(n=4, k=2, **kw):
    params = PhysicalParams(k=k, **kw)
    return assemble(build_structured_mesh(n), params, ManufacturedCase(params).problem_data())


@pytest.fixture(scope="module")
def sys4():
    return system(mu=0.01, kappa=100.0, alpha=0.1)


@pytest.fixture(scope="module", params=[("P", "exact"), ("Phat", "exact"), ("P", "inexact"),
                                        ("Phat", "inexact")], ids=lambda p: "-".join(p))
def pc(request, sys4):
    return build_precond(sys4, *request.param)


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1))
def test_apply_inverse_symmetric_positive(pc, seed):
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal((2, pc.n))
    a, b = u @ pc.apply_inverse(v), v @ pc.apply_inverse(u)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12 * np.linalg.norm(u) * np.linalg.norm(v))
    assert u @ pc.apply_inverse(u) >= -1e-12


def test_output_orthogonal_to_kernel_and_projection_idempotent(pc):
    rng = np.random.default_rng(0)
    r = rng.standard_normal(pc.n)
    x = pc.apply_inverse(r)
    Sz = pc.S @ pc.zbar
    assert abs(Sz @ x) <= 1e-10 * np.linalg.norm(Sz) * np.linalg.norm(x)
    y = pc.project_kernel(r)
    np.testing.assert_allclose(pc.project_kernel(y), y, atol=1e-12 * np.abs(y).max())
    np.testing.assert_allclose(pc.project_kernel(pc.zbar), 0.0, atol=1e-12)


def test_exact_block_solves(sys4):
    pc = build_precond(sys4, "P", "exact")
    r = np.random.default_rng(1).standard_normal(pc.n)
    x = pc.solve_blocks(r)
    for name, s in pc.slices.items():
        np.testing.assert_allclose(pc.block(name) @ x[s], r[s], atol=1e-9 * np.abs(r[s]).max())


def test_blocks_tile_the_facet_vector(sys4):
    pc = build_precond(sys4, "P")
    s = pc.slices
    assert s["ubar"].start == 0 and s["ubar"].stop == s["ps"].start
    assert s["ps"].stop == s["pd"].start and s["pd"].stop == pc.n


def test_symmetric_gauss_seidel_converges():
    rng = np.random.default_rng(2)
    n = 30
    A = sp.diags([-1.0, 2.5, -1.0], [-1, 0, 1], shape=(n, n)).tocsr()
    r = rng.standard_normal(n)
    xe = np.linalg.solve(A.toarray(), r)
    err = [np.linalg.norm(SymmetricGaussSeidel(A, m)(r) - xe) for m in (1, 2, 4, 8, 16)]
    assert all(b < a for a, b in zip(err, err[1:]))
    assert err[-1] < 1e-6 * np.linalg.norm(xe)
    M = np.array([SymmetricGaussSeidel(A, 3)(e) for e in np.eye(n)]).T
    np.testing.assert_allclose(M, M.T, atol=1e-12)
    assert np.linalg.eigvalsh(M).min() > 0
    with pytest.raises(ValueError):
        SymmetricGaussSeidel(A, 0)


def test_form_based_variant_rejected_when_indefinite():
    s = system(n=2, k=1)
    with pytest.raises(PreconditionerBuildError, match="ubar"):
        build_precond(s, "Phat")
    build_precond(s, "P")


def test_bad_arguments(sys4):
    with pytest.raises(ValueError):
        build_precond(sys4, "Q")
    with pytest.raises(ValueError):
        build_precond(sys4, "P", "approximate")


@pytest.mark.parametrize("region", ["darcy", "stokes"])
def test_single_region_meshes(region):
    mesh = mesh_from_json({"format": "hdgsd-mesh", "version": 1,
                           "vertices": [[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]],
                           "cells": [[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
                           "cell_region": [region] * 4})
    data = ProblemData(f_darcy=lambda x, y: np.cos(np.pi * x),
                       f_stokes=lambda x, y: np.stack([y + 0 * x, 0 * x]))
    s = assemble(mesh, PhysicalParams(k=2), data)
    for mode in ("exact", "inexact"):
        assert solve_iterative(s, "P", mode, "minres").converged
