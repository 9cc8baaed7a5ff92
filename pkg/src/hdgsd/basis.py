"""Polynomial bases on the reference triangle and the reference edge.

Cell bases are stored as coefficient matrices over the monomials
``x**a * y**b`` (ordered by total degree), so values and gradients are
exact polynomial evaluations.  The default ``"orthonormal"`` kind is the
Gram-Schmidt (Cholesky) orthonormalisation of the monomials against the
exact reference mass matrix; ``"nodal"`` is the Lagrange basis on the
equispaced lattice and exists mostly for checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np


def dim_pk(k: int) -> int:
    """Dimension of P_k in two variables (0 for k < 0)."""
    return (k + 1) * (k + 2) // 2 if k >= 0 else 0


def monomial_exponents(k: int) -> list[tuple[int, int]]:
    return [(d - b, b) for d in range(k + 1) for b in range(d + 1)]


def monomial_integral(a: int, b: int) -> float:
    """Exact integral of x^a y^b over the reference triangle."""
    return factorial(a) * factorial(b) / factorial(a + b + 2)


def _monomials(exps, pts):
    x, y = pts[:, 0], pts[:, 1]
    return np.array([x**a * y**b for a, b in exps])


def _monomial_grads(exps, pts):
    x, y = pts[:, 0], pts[:, 1]
    out = np.zeros((len(exps), 2, len(pts)))
    for m, (a, b) in enumerate(exps):
        if a > 0:
            out[m, 0] = a * x ** (a - 1) * y**b
        if b > 0:
            out[m, 1] = b * x**a * y ** (b - 1)
    return out


def lattice_points(k: int) -> np.ndarray:
    """Equispaced nodes of the degree-k Lagrange element."""
    if k == 0:
        return np.array([[1.0 / 3.0, 1.0 / 3.0]])
    # vertices first so that k=1 nodes are the triangle vertices in order
    pts = [(i / k, j / k) for j in range(k + 1) for i in range(k + 1 - j)]
    verts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    rest = [p for p in pts if p not in verts]
    return np.array(verts + rest)


@dataclass(frozen=True)
class CellBasis:
    degree: int
    kind: str = "orthonormal"
    coeffs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        exps = monomial_exponents(self.degree)
        if self.kind == "orthonormal":
            M = np.array([[monomial_integral(a1 + a2, b1 + b2) for a2, b2 in exps]
                          for a1, b1 in exps])
            L = np.linalg.cholesky(M)
            C = np.linalg.inv(L)
        elif self.kind == "nodal":
            V = _monomials(exps, lattice_points(self.degree))
            C = np.linalg.inv(V)
        else:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        object.__setattr__(self, "coeffs", C)

    @property
    def count(self) -> int:
        return dim_pk(self.degree)

    @property
    def exponents(self):
        return monomial_exponents(self.degree)

    def values(self, pts: np.ndarray) -> np.ndarray:
        """Table of shape (count, npts)."""
        pts = np.atleast_2d(pts)
        return self.coeffs @ _monomials(self.exponents, pts)

    def gradients(self, pts: np.ndarray) -> np.ndarray:
        """Reference gradients, shape (count, 2, npts)."""
        pts = np.atleast_2d(pts)
        G = _monomial_grads(self.exponents, pts)
        return np.einsum("im,mdq->idq", self.coeffs, G)

    def constant_coeffs(self) -> np.ndarray:
        """Coefficients representing the constant function 1."""
        e = np.zeros(self.count)
        e[0] = 1.0
        # monomial 1 has index 0: coeffs.T @ c = e
        return np.linalg.solve(self.coeffs.T, e)


@dataclass(frozen=True)
class FaceBasis:
    """Orthonormal Legendre polynomials on [0, 1]."""

    degree: int

    @property
    def count(self) -> int:
        return self.degree + 1

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float).ravel()
        out = np.empty((self.count, len(t)))
        for j in range(self.count):
            c = np.zeros(j + 1)
            c[j] = 1.0
            out[j] = np.sqrt(2 * j + 1) * np.polynomial.legendre.legval(2 * t - 1, c)
        return out

    def constant_coeffs(self) -> np.ndarray:
        e = np.zeros(self.count)
        e[0] = 1.0
        return e


def eval_basis(basis, points):
    """Return ``(values, gradients)`` tables; gradients are None on edges."""
    if isinstance(basis, FaceBasis):
        return basis.values(points), None
    return basis.values(points), basis.gradients(points)
