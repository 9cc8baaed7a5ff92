"""Iteration counts over viscosity and permeability (manufactured case, k=2)."""
from _common import parser, print_pivot, write

from hdgsd.experiments import ExperimentConfig, run_experiment

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--alpha", type=float, default=1.0)
    args = p.parse_args()
    vals = [1e-4, 1e-2, 1.0, 1e2, 1e4]
    cfg = ExperimentConfig(n=[args.n], k=2, mu=vals, kappa=vals, alpha=[args.alpha],
                           solver=["minres", "gmres"], precond=["P", "Phat"], mode=[args.mode])
    rows = run_experiment(cfg, jobs=args.jobs)
    write(rows, args.output_dir, f"mu_kappa_{args.mode}")
    print_pivot(rows, "mu", "kappa", "rows: mu, columns: kappa")
