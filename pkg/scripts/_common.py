"""Shared helpers for the table scripts."""
import argparse
import json
import os
from pathlib import Path

from hdgsd.experiments import rows_to_csv, summarize


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--output-dir", default="results", help="directory for CSV/JSON output")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--mode", default="exact", choices=("exact", "inexact"))
    return p


def write(rows, out_dir, stem) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows_to_csv(rows, out / f"{stem}.csv")
    summary = summarize(rows)
    (out / f"{stem}.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def print_pivot(rows, row_key, col_key, label):
    """Print iteration counts as a (row_key x col_key) table per solver/variant."""
    combos = sorted({(r["solver"], r["variant"], r["mode"]) for r in rows})
    rvals = sorted({r[row_key] for r in rows}, key=float)
    cvals = sorted({r[col_key] for r in rows}, key=float)
    for solver, variant, mode in combos:
        print(f"\n{label}: {solver} / S_{variant} ({mode})")
        print(f"{row_key:>10} " + " ".join(f"{c:>8g}" for c in cvals))
        for rv in rvals:
            cells = []
            for cv in cvals:
                m = [r for r in rows if r[row_key] == rv and r[col_key] == cv
                     and r["solver"] == solver and r["variant"] == variant and r["mode"] == mode]
                cells.append(f"{m[0]['iterations']:>8d}" if m and m[0]["converged"] else f"{'-':>8}")
            print(f"{rv:>10g} " + " ".join(cells))
