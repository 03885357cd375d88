"""CSV emission of learning curves, steady-state tables and mixing trajectories."""
from __future__ import annotations

import csv
import warnings
from pathlib import Path

from .config import dump_config
from .experiment import RunResult, SweepResult
from .metrics import DbFloorWarning, to_db

CURVES = "curves.csv"
STEADY = "steady_state.csv"
LAMBDA = "lambda.csv"
RESOLVED = "config.resolved"
SWEEP_SUMMARY = "sweep_summary.csv"


def fmt(x) -> str:
    return format(float(x), ".9g")


def _writer(path: Path):
    fh = open(path, "w", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def emit_curves(result: RunResult, output_dir) -> list[Path]:
    """Write ``curves.csv``, ``steady_state.csv``, ``lambda.csv`` and
    ``config.resolved`` into ``output_dir`` (created if missing).

    Raises ``OSError`` if the directory cannot be written.
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / CURVES, out / STEADY, out / LAMBDA, out / RESOLVED]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DbFloorWarning)
        db = {alg: to_db(c.msd_linear) for alg, c in result.curves.items()}
    n_iter = result.config.n_iterations

    fh, w = _writer(paths[0])
    with fh:
        w.writerow(["iteration", "algorithm", "msd_linear", "msd_db"])
        for t in range(n_iter):
            for alg, curve in result.curves.items():
                w.writerow([t, alg, fmt(curve.msd_linear[t]), fmt(db[alg][t])])

    fh, w = _writer(paths[1])
    with fh:
        w.writerow(["algorithm", "msd_db", "window_fraction"])
        for alg, est in result.steady.items():
            w.writerow([alg, fmt(est.msd_db), fmt(est.window_fraction)])

    trajectories = dict(result.lambda_mean)
    trajectories.update({f"{alg}:optimal": v for alg, v in result.optimal_lambda_mean.items()})
    fh, w = _writer(paths[2])
    with fh:
        w.writerow(["iteration", "algorithm", "lambda_mean"])
        for t in range(n_iter):
            for alg, lam in trajectories.items():
                w.writerow([t, alg, fmt(lam[t])])

    paths[3].write_text(dump_config(result.config))
    return paths


def emit_sweep(sweep: SweepResult, output_dir) -> list[Path]:
    """One subdirectory ``delta_<value>`` per swept value plus ``sweep_summary.csv``."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for delta, result in zip(sweep.deltas, sweep.results):
        paths += emit_curves(result, out / f"delta_{fmt(delta)}")
    summary = out / SWEEP_SUMMARY
    fh, w = _writer(summary)
    with fh:
        w.writerow(["delta", "algorithm", "msd_db"])
        for delta, alg, msd_db in sweep.summary():
            w.writerow([fmt(delta), alg, fmt(msd_db)])
    return paths + [summary]
