"""Quadrature rules on the reference triangle and the unit interval."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DEGREE = 40


@dataclass(frozen=True)
class QuadRule:
    """Points and weights of a quadrature rule.

    ``points`` has shape (npts, dim) in reference coordinates; for edge
    rules ``dim == 1`` and the reference interval is [0, 1].
    """

    points: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def npts(self) -> int:
        return len(self.weights)


def _check_degree(degree: int) -> None:
    if not 0 <= degree <= MAX_DEGREE:
        raise ValueError(
            f"unsupported exactness degree {degree}; supported range is 0..{MAX_DEGREE}"
        )


def _gauss01(m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (x + 1.0), 0.5 * w


def edge_quadrature(exactness_degree: int) -> QuadRule:
    """Gauss-Legendre rule on [0, 1]; m points integrate degree 2m-1 exactly."""
    _check_degree(exactness_degree)
    m = max(1, (exactness_degree + 2) // 2)
    x, w = _gauss01(m)
    return QuadRule(x[:, None], w, 2 * m - 1)


def triangle_quadrature(exactness_degree: int) -> QuadRule:
    """Collapsed (Duffy) tensor Gauss rule on {(0,0), (1,0), (0,1)}.

    With x = s, y = t (1 - s) a degree-d polynomial becomes degree d + 1 in
    s (including the Jacobian 1 - s) and degree d in t.
    """
    _check_degree(exactness_degree)
    d = exactness_degree
    ms = max(1, (d + 3) // 2)
    mt = max(1, (d + 2) // 2)
    s, ws = _gauss01(ms)
    t, wt = _gauss01(mt)
    S, T = np.meshgrid(s, t, indexing="ij")
    W = np.outer(ws * (1.0 - s), wt)
    pts = np.column_stack([S.ravel(), (T * (1.0 - S)).ravel()])
    return QuadRule(pts, W.ravel(), d)
