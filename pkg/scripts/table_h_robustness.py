"""Iteration counts under mesh refinement (manufactured case, k=2, unit parameters)."""
from _common import parser, write

from hdgsd.experiments import ExperimentConfig, run_experiment

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--n", default="4,8,16,32")
    args = p.parse_args()
    cfg = ExperimentConfig(n=[int(v) for v in args.n.split(",")], k=2, solver=["minres", "gmres"],
                           precond=["P", "Phat"], mode=[args.mode])
    rows = run_experiment(cfg, jobs=args.jobs)
    summary = write(rows, args.output_dir, f"h_robustness_{args.mode}")
    for key, g in summary["groups"].items():
        its = [r["iterations"] for r in rows if f"{r['solver']}/{r['variant']}/{r['mode']}" == key]
        print(f"{key:24s} iterations {its}  ratio {g['ratio']:.2f}")
