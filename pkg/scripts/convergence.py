"""Error norms and observed orders under refinement (manufactured case, direct solves)."""
import argparse
import csv
import math
from pathlib import Path

from hdgsd.assembly import assemble
from hdgsd.forms import PhysicalParams
from hdgsd.manufactured import ManufacturedCase, error_norms
from hdgsd.mesh import build_structured_mesh
from hdgsd.solve import solve_condensed_direct

FIELDS = ("velocity_l2", "pressure_l2", "velocity_x", "pressure_x")

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", default="4,8,16,32")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--output-dir", default="results")
    args = p.parse_args()
    params = PhysicalParams(mu=args.mu, kappa=args.kappa, alpha=args.alpha, k=args.k)
    case = ManufacturedCase(params)
    rows, prev = [], None
    for n in (int(v) for v in args.n.split(",")):
        s = assemble(build_structured_mesh(n), params, case.problem_data())
        err = error_norms(s, solve_condensed_direct(s), case).as_dict()
        row = dict(n=n, h=1.0 / n, **err)
        for f in FIELDS:
            row[f"{f}_order"] = math.log2(prev[f] / err[f]) if prev else float("nan")
        rows.append(row)
        prev = err
        print(f"n={n:3d} " + " ".join(f"{f}={err[f]:.3e} ({row[f + '_order']:.2f})" for f in FIELDS))
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"convergence_k{args.k}.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows({k: repr(float(v)) if isinstance(v, float) else v for k, v in r.items()}
                    for r in rows)
