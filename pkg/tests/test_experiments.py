import json

import pytest
from hypothesis import given, strategies as st

from hdgsd.experiments import CSV_COLUMNS, ExperimentConfig, rows_to_csv, run_experiment, summarize


def test_defaults_valid():
    cfg = ExperimentConfig()
    assert cfg.tol == 1e-8 and cfg.case == "manufactured"


@pytest.mark.parametrize("bad", [dict(case="spiral"), dict(n=[3]), dict(n=[0]), dict(k=0),
                                 dict(mu=[-1.0]), dict(kappa=[float("nan")]), dict(solver=["cg"]),
                                 dict(precond=["ILU"]), dict(mode=["fast"]), dict(tol=0.0),
                                 dict(maxit=0), dict(eta=-1.0), dict(case="custom")])
def test_invalid_configs_rejected(bad):
    with pytest.raises(ValueError):
        ExperimentConfig(**bad)


def test_unknown_keys_rejected(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"n": [4], "colour": "red"}))
    with pytest.raises(ValueError, match="colour"):
        ExperimentConfig.from_json(p)


@given(st.lists(st.sampled_from([2, 4, 6]), min_size=1, max_size=3),
       st.lists(st.sampled_from([1e-2, 1.0]), min_size=1, max_size=2))
def test_scalars_promoted_and_cells_enumerated(ns, mus):
    cfg = ExperimentConfig(n=ns, mu=mus, kappa=1.0, alpha=1.0)
    assert cfg.kappa == [1.0]
    assert len(cfg.system_cells()) == len(ns) * len(mus)
    het = ExperimentConfig(case="heterogeneous", n=ns, mu=mus, kappa=[1.0, 2.0])
    assert len(het.system_cells()) == len(ns) * len(mus)


def test_run_and_csv_deterministic():
    cfg = ExperimentConfig(n=[2, 4], k=2, solver=["minres", "gmres"], precond=["P", "Phat"])
    a = rows_to_csv(run_experiment(cfg, jobs=1))
    b = rows_to_csv(run_experiment(cfg, jobs=2))
    assert a == b
    lines = a.splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert len(lines) == 1 + 2 * 2 * 2
    assert "np." not in a


def test_summary_and_failures():
    cfg = ExperimentConfig(n=[2], maxit=3, solver=["minres"], precond=["P"])
    rows = run_experiment(cfg)
    s = summarize(rows)
    assert not s["all_converged"] and s["groups"]["minres/P/exact"]["converged"] == 0


def test_heterogeneous_rows_have_no_errors():
    rows = run_experiment(ExperimentConfig(case="heterogeneous", n=[2], mu=[1e-2]))
    assert rows[0]["kappa"] == "field" and rows[0]["converged"]
    assert "velocity_l2" not in rows[0]


def test_form_based_failure_recorded_not_raised():
    rows = run_experiment(ExperimentConfig(n=[2], k=1, precond=["Phat"]))
    assert not rows[0]["converged"] and rows[0]["message"].startswith("preconditioner:")
