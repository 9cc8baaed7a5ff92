"""Triangulations of the unit square split into a Stokes and a Darcy region.

The Stokes region is [0, 1] x [0.5, 1] and the Darcy region is
[0, 1] x [0, 0.5].  Local face ``e`` of a cell is the edge opposite its
local vertex ``e``.  Every face carries a global reference orientation
from its lower to its higher vertex index; its reference normal is the
clockwise rotation of that edge vector, and ``cell_face_sign`` records
whether the cell's outward normal agrees with it (+1) or not (-1).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

INTERFACE_Y = 0.5


class Region(IntEnum):
    STOKES = 0
    DARCY = 1


class FaceClass(IntEnum):
    INTERIOR_S = 0
    INTERIOR_D = 1
    INTERFACE = 2
    GAMMA_S = 3
    GAMMA_D = 4


class MeshTopologyError(ValueError):
    pass


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Mesh2D:
    vertices: np.ndarray        # (nv, 2)
    cells: np.ndarray           # (nc, 3), counter-clockwise
    cell_region: np.ndarray     # (nc,) Region values
    faces: np.ndarray           # (nf, 2), sorted vertex pairs
    face_cells: np.ndarray      # (nf, 2), second entry -1 on the boundary
    face_class: np.ndarray      # (nf,) FaceClass values
    cell_faces: np.ndarray      # (nc, 3)
    cell_face_sign: np.ndarray  # (nc, 3) in {+1, -1}
    h_K: np.ndarray             # (nc,) cell diameters

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def h(self) -> float:
        return float(self.h_K.max())

    def cell_areas(self) -> np.ndarray:
        p = self.vertices[self.cells]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def face_lengths(self) -> np.ndarray:
        p = self.vertices[self.faces]
        return np.linalg.norm(p[:, 1] - p[:, 0], axis=1)

    def face_normals(self) -> np.ndarray:
        """Reference unit normals (rotation of the lower-to-higher edge)."""
        p = self.vertices[self.faces]
        d = p[:, 1] - p[:, 0]
        n = np.column_stack([d[:, 1], -d[:, 0]])
        return n / np.linalg.norm(n, axis=1)[:, None]

    def faces_of_class(self, *classes: FaceClass) -> np.ndarray:
        return np.flatnonzero(np.isin(self.face_class, [int(c) for c in classes]))

    def cells_in(self, region: Region) -> np.ndarray:
        return np.flatnonzero(self.cell_region == int(region))

    # -- serialisation -------------------------------------------------
    def to_json(self) -> dict:
        return {
            "format": "hdgsd-mesh",
            "version": 1,
            "vertices": self.vertices.tolist(),
            "cells": self.cells.tolist(),
            "cell_region": [Region(r).name.lower() for r in self.cell_region],
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))


def mesh_from_json(data: dict) -> Mesh2D:
    if data.get("format") != "hdgsd-mesh":
        raise ValueError("not an hdgsd mesh document")
    regions = np.array([Region[r.upper()] for r in data["cell_region"]], dtype=int)
    return _build(np.array(data["vertices"], float), np.array(data["cells"], int), regions)


def load_mesh(path) -> Mesh2D:
    return mesh_from_json(json.loads(Path(path).read_text()))


def _build(vertices, cells, regions) -> Mesh2D:
    nc = len(cells)
    face_index: dict[tuple[int, int], int] = {}
    faces, face_cells = [], []
    cell_faces = np.empty((nc, 3), dtype=int)
    cell_face_sign = np.empty((nc, 3), dtype=int)
    for c, tri in enumerate(cells):
        for e in range(3):
            a, b = int(tri[(e + 1) % 3]), int(tri[(e + 2) % 3])
            key = (a, b) if a < b else (b, a)
            f = face_index.get(key)
            if f is None:
                f = face_index[key] = len(faces)
                faces.append(key)
                face_cells.append([c])
            else:
                face_cells[f].append(c)
            cell_faces[c, e] = f
            # counter-clockwise traversal a -> b has the outward normal on
            # the right; it matches the reference normal iff a < b
            cell_face_sign[c, e] = 1 if a < b else -1
    for f, nb in enumerate(face_cells):
        if not 1 <= len(nb) <= 2:
            raise MeshTopologyError(f"face {f} has {len(nb)} neighbouring cells")
    fc = np.array([nb + [-1] * (2 - len(nb)) for nb in face_cells], dtype=int)
    faces = np.array(faces, dtype=int)
    p = vertices[cells]
    edges = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]], axis=1)
    h_K = np.linalg.norm(edges, axis=2).max(axis=1)
    mesh = Mesh2D(
        vertices=_frozen(vertices), cells=_frozen(cells), cell_region=_frozen(regions),
        faces=_frozen(faces), face_cells=_frozen(fc),
        face_class=_frozen(np.zeros(len(faces), dtype=int)),
        cell_faces=_frozen(cell_faces), cell_face_sign=_frozen(cell_face_sign),
        h_K=_frozen(h_K),
    )
    if np.any(mesh.cell_areas() <= 0):
        raise MeshTopologyError("cells must be counter-clockwise with positive area")
    object.__setattr__(mesh, "face_class", _frozen(classify_faces(mesh)))
    return mesh


def classify_faces(mesh: Mesh2D) -> np.ndarray:
    """Tag each face as interior (Stokes/Darcy), interface, or boundary."""
    out = np.empty(mesh.num_faces, dtype=int)
    for f, (c0, c1) in enumerate(mesh.face_cells):
        if c0 < 0:
            raise MeshTopologyError(f"face {f} has no neighbouring cell")
        r0 = mesh.cell_region[c0]
        if c1 < 0:
            out[f] = FaceClass.GAMMA_S if r0 == Region.STOKES else FaceClass.GAMMA_D
            continue
        r1 = mesh.cell_region[c1]
        if r0 != r1:
            out[f] = FaceClass.INTERFACE
        else:
            out[f] = FaceClass.INTERIOR_S if r0 == Region.STOKES else FaceClass.INTERIOR_D
    return out


def build_structured_mesh(n: int, perturb: float = 0.0, seed: int = 0) -> Mesh2D:
    """Uniform n x n grid of squares, each cut along its (0,0)-(1,1) diagonal.

    ``perturb`` moves interior vertices by at most ``perturb * h`` (capped at
    0.2) using a seeded generator; vertices on the interface line only move
    horizontally so the line stays a union of faces.
    """
    if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise ValueError(
            f"n must be an even integer >= 2 so that y = 0.5 is a mesh line (got {n!r})"
        )
    if not 0.0 <= perturb <= 0.2:
        raise ValueError("perturb must lie in [0, 0.2]")
    h = 1.0 / n
    xs = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])
    if perturb > 0:
        rng = np.random.default_rng(seed)
        r = perturb * h / np.sqrt(2.0)
        d = rng.uniform(-r, r, size=vertices.shape)
        interior = (X.ravel() > 0) & (X.ravel() < 1) & (Y.ravel() > 0) & (Y.ravel() < 1)
        on_line = np.isclose(Y.ravel(), INTERFACE_Y)
        d[~interior] = 0.0
        d[on_line, 1] = 0.0
        vertices = vertices + d
    vid = np.arange((n + 1) ** 2).reshape(n + 1, n + 1)  # [row j (y), col i (x)]
    cells, regions = [], []
    for j in range(n):
        for i in range(n):
            v00, v10 = vid[j, i], vid[j, i + 1]
            v01, v11 = vid[j + 1, i], vid[j + 1, i + 1]
            region = Region.STOKES if (j + 0.5) * h > INTERFACE_Y else Region.DARCY
            cells += [(v00, v10, v11), (v00, v11, v01)]
            regions += [region, region]
    return _build(vertices, np.array(cells, dtype=int), np.array(regions, dtype=int))
