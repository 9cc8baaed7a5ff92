"""Iteration counts for the oscillating-permeability case over viscosity."""
from _common import parser, print_pivot, write

from hdgsd.experiments import ExperimentConfig, run_experiment

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--n", default="8,16")
    args = p.parse_args()
    cfg = ExperimentConfig(case="heterogeneous", n=[int(v) for v in args.n.split(",")], k=2,
                           mu=[1.0, 1e-2, 1e-4, 1e-6], solver=["minres", "gmres"],
                           precond=["P", "Phat"], mode=[args.mode])
    rows = run_experiment(cfg, jobs=args.jobs)
    write(rows, args.output_dir, f"heterogeneous_{args.mode}")
    print_pivot(rows, "n", "mu", "rows: n, columns: mu")
