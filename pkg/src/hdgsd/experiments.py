"""Experiment configuration, sweep execution and CSV/JSON output."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .assembly import assemble, compatibility_check
from .forms import PhysicalParams
from .manufactured import ManufacturedCase, error_norms, heterogeneous_data, heterogeneous_params
from .mesh import build_structured_mesh, load_mesh
from .preconditioners import VARIANTS, MODES, build_precond
from .solve import condense_system, solve_iterative

CASES = ("manufactured", "heterogeneous", "custom")
SOLVERS = ("minres", "gmres")

CSV_COLUMNS = ("case", "solver", "variant", "mode", "n", "k", "mu", "kappa", "alpha", "eta",
               "n_facet", "iterations", "converged", "final_residual",
               "velocity_l2", "pressure_l2", "velocity_x", "pressure_x", "message")


def _as_list(v) -> list:
    if isinstance(v, (list, tuple)):
        return list(v)
    return [v]


@dataclass
class ExperimentConfig:
    """One experiment or a sweep (list-valued fields are swept as a product)."""

    case: str = "manufactured"
    n: list = field(default_factory=lambda: [8])
    k: int = 2
    mu: list = field(default_factory=lambda: [1.0])
    kappa: list = field(default_factory=lambda: [1.0])
    alpha: list = field(default_factory=lambda: [1.0])
    solver: list = field(default_factory=lambda: ["minres"])
    precond: list = field(default_factory=lambda: ["Phat"])
    mode: list = field(default_factory=lambda: ["exact"])
    tol: float = 1e-8
    maxit: int = 1000
    restart: int = 0
    sweeps: int = 5
    eta: float | None = None
    perturb: float = 0.0
    seed: int = 0
    mesh: str | None = None
    output: str | None = None
    errors: bool = True

    def __post_init__(self):
        for name in ("n", "mu", "kappa", "alpha", "solver", "precond", "mode"):
            setattr(self, name, _as_list(getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}, got {self.case!r}")
        if self.case == "custom" and not self.mesh:
            raise ValueError("case 'custom' needs a mesh file")
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")
        for n in self.n:
            if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
                raise ValueError(f"n must be an even integer >= 2, got {n!r}")
        for name in ("mu", "kappa", "alpha"):
            for v in getattr(self, name):
                if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                    raise ValueError(f"{name} values must be positive numbers, got {v!r}")
        for s in self.solver:
            if s not in SOLVERS:
                raise ValueError(f"solver must be one of {SOLVERS}, got {s!r}")
        for p in self.precond:
            if p not in VARIANTS:
                raise ValueError(f"precond must be one of {VARIANTS}, got {p!r}")
        for m in self.mode:
            if m not in MODES:
                raise ValueError(f"mode must be one of {MODES}, got {m!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.maxit < 1:
            raise ValueError("maxit must be >= 1")
        if self.eta is not None and not self.eta > 0:
            raise ValueError("eta must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)

    def system_cells(self):
        """Parameter tuples that need their own assembled system."""
        kappas = [None] if self.case == "heterogeneous" else self.kappa
        return list(itertools.product(self.n, self.mu, kappas, self.alpha))


def _mesh_for(cfg: ExperimentConfig, n: int):
    if cfg.case == "custom":
        return load_mesh(cfg.mesh)
    return build_structured_mesh(n, perturb=cfg.perturb, seed=cfg.seed)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else str(v))
    return "" if v is None else str(v)


def make_system(case: str, mesh, k: int, mu: float, kappa, alpha: float, eta: float | None = None):
    """Assemble the system of a named case; returns ``(system, ManufacturedCase or None)``."""
    extra = {} if eta is None else {"eta": eta}
    if case == "heterogeneous":
        params = heterogeneous_params(mu, k=k, alpha=alpha, **extra)
        return assemble(mesh, params, heterogeneous_data()), None
    params = PhysicalParams(mu=mu, kappa=kappa, alpha=alpha, k=k, **extra)
    mc = ManufacturedCase(params)
    return assemble(mesh, params, mc.problem_data()), mc


def run_cell(cfg: ExperimentConfig, n: int, mu: float, kappa, alpha: float) -> list[dict]:
    """Assemble one system and run every (variant, mode, solver) combination on it."""
    mesh = _mesh_for(cfg, n)
    system, case = make_system(cfg.case, mesh, cfg.k, mu, kappa, alpha, cfg.eta)
    params = system.params
    cs = condense_system(system)
    rows = []
    base = dict(case=cfg.case, n=n if cfg.case != "custom" else mesh.num_cells, k=cfg.k, mu=mu,
                kappa="field" if cfg.case == "heterogeneous" else kappa, alpha=alpha,
                eta=params.eta, n_facet=cs.n)
    compat = compatibility_check(system)
    for variant, mode in itertools.product(cfg.precond, cfg.mode):
        try:
            pc = build_precond(system, variant, mode, sweeps=cfg.sweeps)
        except Exception as exc:  # recorded, surfaced through the exit code
            for solver in cfg.solver:
                rows.append(dict(base, solver=solver, variant=variant, mode=mode, iterations=0,
                                 converged=False, final_residual=math.nan,
                                 message=f"preconditioner: {exc}"))
            continue
        for solver in cfg.solver:
            res = solve_iterative(system, variant, mode, solver, tol=cfg.tol, maxit=cfg.maxit,
                                  restart=cfg.restart, cs=cs, pc=pc)
            row = dict(base, solver=solver, variant=variant, mode=mode,
                       iterations=res.iterations, converged=res.converged,
                       final_residual=res.report.final_residual,
                       message=res.report.message)
            if not compat.compatible:
                row["message"] = (row["message"] + "; " if row["message"] else "") + str(compat)
            if cfg.errors and case is not None:
                row.update(error_norms(system, res.x, case).as_dict())
            rows.append(row)
    return rows


def _run_cell_args(args):
    cfg, cell = args
    return run_cell(cfg, *cell)


def run_experiment(cfg: ExperimentConfig, jobs: int | None = None) -> list[dict]:
    """Run all sweep cells; rows come back in a deterministic order."""
    cells = cfg.system_cells()
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cells))) as ex:
            results = list(ex.map(_run_cell_args, [(cfg, c) for c in cells]))
    else:
        results = [run_cell(cfg, *c) for c in cells]
    return [row for rows in results for row in rows]


def rows_to_csv(rows: Sequence[dict], path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in CSV_COLUMNS])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def summarize(rows: Sequence[dict]) -> dict:
    """Iteration ranges per (solver, variant, mode) and overall convergence."""
    groups: dict = {}
    for r in rows:
        key = f"{r['solver']}/{r['variant']}/{r['mode']}"
        groups.setdefault(key, []).append(r)
    out = {"all_converged": all(r["converged"] for r in rows), "cells": len(rows), "groups": {}}
    for key, rs in sorted(groups.items()):
        its = [r["iterations"] for r in rs if r["converged"]]
        out["groups"][key] = {
            "min_iterations": min(its) if its else None,
            "max_iterations": max(its) if its else None,
            "ratio": (max(its) / min(its)) if its else None,
            "converged": sum(bool(r["converged"]) for r in rs),
            "total": len(rs),
        }
    return out


def iteration_ratio(rows: Sequence[dict], solver: str, variant: str, mode: str = "exact") -> float:
    its = [r["iterations"] for r in rows
           if r["solver"] == solver and r["variant"] == variant and r["mode"] == mode]
    return max(its) / min(its)
