"""Stability constants over the parameter sweep, with their variation factors."""
import argparse
import csv
from pathlib import Path

from hdgsd.forms import PhysicalParams
from hdgsd.mesh import build_structured_mesh
from hdgsd.spectral import CONSTANT_NAMES, SpectralReport, spectral_suite, sweep_parameters, variation

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", default="2,4")
    p.add_argument("--k", default="1,2")
    p.add_argument("--c-alpha", type=float, default=10.0)
    p.add_argument("--output-dir", default="results")
    args = p.parse_args()
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = list(SpectralReport.__dataclass_fields__)
    with open(out / "spectral.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for n in (int(v) for v in args.n.split(",")):
            for k in (int(v) for v in args.k.split(",")):
                mesh = build_structured_mesh(n)
                reps = [spectral_suite(mesh, PhysicalParams(mu=mu, kappa=ka, alpha=al, k=k))
                        for mu, ka, al in sweep_parameters(c_alpha=args.c_alpha)]
                for r in reps:
                    d = r.as_dict()
                    w.writerow([repr(float(d[c])) if isinstance(d[c], float) else d[c] for c in cols])
                print(f"n={n} k={k}: " + ", ".join(
                    f"{c} {variation([getattr(r, c) for r in reps]):.2f}" for c in CONSTANT_NAMES))
