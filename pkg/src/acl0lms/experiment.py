"""Seeded Monte-Carlo learning-curve experiments.

Each run draws one sparse system and one input/noise stream and drives every
requested algorithm on that same stream (paired comparison).  Runs are
simulated in batches: every filter state carries a leading run axis and all
per-run arithmetic is row-wise, so a run's trajectory is bit-identical no
matter which batch or worker process it lands in.
"""
from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .adaptive_filters import FilterState, SparsityParams, filter_error, l0lms_step, lms_step
from .affine_combiner import CombinedFilter, combined_iteration, equivalent_weights, optimal_lambda_white
from .config import COMBINED, ExperimentConfig, canonical, derive_step_sizes
from .errors import ConfigError, DivergenceError
from .metrics import LearningCurve, SteadyStateEstimate, monte_carlo_average, msd, steady_state
from .signal_model import (
    RegressorWindow,
    generate_sparse_fir,
    noise_variance_from_snr,
    push_sample,
    system_output,
    white_input,
)

log = logging.getLogger(__name__)

# Runs per in-process batch; only affects speed and memory, never results.
BATCH_SIZE = 250


def run_seed(master_seed: int, index: int) -> int:
    """Seed of run ``index``; a pure function of ``(master_seed, index)``."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass
class RunDraw:
    """Random quantities of one run, in draw order."""

    system: np.ndarray
    inputs: np.ndarray
    noise: np.ndarray
    noise_variance: float

    def checksum(self) -> str:
        h = hashlib.sha256()
        h.update(self.inputs.tobytes())
        h.update(self.noise.tobytes())
        return h.hexdigest()


def draw_run(cfg: ExperimentConfig, seed: int) -> RunDraw:
    rng = np.random.default_rng(seed)
    system = generate_sparse_fir(cfg.n_taps, cfg.n_active, rng, cfg.normalize_system)
    inputs = white_input(rng, cfg.n_iterations, cfg.input_variance)
    signal_power = float(system.weights @ system.weights) * cfg.input_variance
    nv = noise_variance_from_snr(cfg.snr_db, signal_power)
    noise = np.sqrt(nv) * rng.standard_normal(cfg.n_iterations)
    return RunDraw(system.weights, inputs, noise, nv)


@dataclass
class BatchOutput:
    msd: dict[str, np.ndarray]           # algorithm -> (runs, iterations)
    lam: dict[str, np.ndarray]           # combined algorithm -> (runs, iterations)
    lam_opt: dict[str, np.ndarray]
    diverged: np.ndarray                 # (runs,) bool
    divergence: list[tuple[int, str, int]]  # (row, algorithm, iteration)
    checksums: list[str]


def _simulate(cfg: ExperimentConfig, seeds) -> BatchOutput:
    """Drive all requested algorithms over a batch of runs."""
    draws = [draw_run(cfg, s) for s in seeds]
    batch = len(draws)
    n, T = cfg.n_taps, cfg.n_iterations
    w_true = np.stack([d.system for d in draws])
    inputs = np.stack([d.inputs for d in draws])
    noise = np.stack([d.noise for d in draws])
    beta = cfg.beta_coeff * np.array([d.noise_variance for d in draws])[:, np.newaxis]
    sparsity = SparsityParams(beta, cfg.alpha, cfg.attractor_scaling)
    mu1, mu2 = derive_step_sizes(cfg)

    names = [canonical(a) for a in cfg.algorithms]
    labels = dict(zip(names, cfg.algorithms))
    singles = {}
    combos = {}
    for name in names:
        if name in COMBINED:
            combos[name] = CombinedFilter.initial(
                n, mu1, mu2, cfg.lambda_init, cfg.mu_lambda,
                sparsity if name == "ac_l0lms" else None, cfg.lambda_clamp, batch,
            )
        else:
            step = mu1 if name.endswith("_fast") else mu2
            singles[name] = FilterState.zeros(n, step, batch)

    msd_out = {labels[k]: np.empty((batch, T)) for k in names}
    lam_out = {labels[k]: np.empty((batch, T)) for k in combos}
    lam_opt = {labels[k]: np.empty((batch, T)) for k in combos} if cfg.track_optimal_lambda else {}
    diverged = np.zeros(batch, dtype=bool)
    divergence = []
    window = RegressorWindow.zeros(n, batch)

    def flag(values, name, t):
        nonlocal diverged
        bad = ~np.isfinite(values) & ~diverged
        if np.any(bad):
            for row in np.flatnonzero(bad):
                if cfg.divergence_policy == "abort":
                    raise DivergenceError("filter diverged", run_seed=seeds[row], iteration=t, algorithm=name)
                divergence.append((int(row), name, t))
            diverged = diverged | bad

    # overflow is detected explicitly through flag()
    with np.errstate(all="ignore"):
        for t in range(T):
            window = push_sample(window, inputs[:, t])
            d = system_output(w_true, window, noise[:, t])
            for name, st in singles.items():
                m = msd(w_true, st.weights)
                msd_out[labels[name]][:, t] = m
                flag(m, labels[name], t)
                e = filter_error(d, st, window)
                if name.startswith("l0lms"):
                    singles[name] = l0lms_step(st, sparsity, window, e, check=False)
                else:
                    singles[name] = lms_step(st, window, e, check=False)
            for name, cf in combos.items():
                label = labels[name]
                m = msd(w_true, equivalent_weights(cf))
                msd_out[label][:, t] = m
                lam_out[label][:, t] = cf.lam
                flag(m, label, t)
                flag(cf.lam, label, t)
                if lam_opt:
                    lam_opt[label][:, t] = optimal_lambda_white(w_true, cf)
                combos[name] = combined_iteration(cf, window, d, check=False)

    return BatchOutput(msd_out, lam_out, lam_opt, diverged, divergence, [d.checksum() for d in draws])


def simulate_runs(cfg: ExperimentConfig, seeds) -> BatchOutput:
    """Per-run (unaveraged) MSD and mixing trajectories for the given seeds."""
    parts = [_simulate(cfg, seeds[i:i + BATCH_SIZE]) for i in range(0, len(seeds), BATCH_SIZE)]
    if len(parts) == 1:
        return parts[0]
    return _concat(parts)


def _concat(parts) -> BatchOutput:
    offsets = np.cumsum([0] + [len(p.diverged) for p in parts])
    return BatchOutput(
        {k: np.concatenate([p.msd[k] for p in parts]) for k in parts[0].msd},
        {k: np.concatenate([p.lam[k] for p in parts]) for k in parts[0].lam},
        {k: np.concatenate([p.lam_opt[k] for p in parts]) for k in parts[0].lam_opt},
        np.concatenate([p.diverged for p in parts]),
        [(int(row + off), a, t) for p, off in zip(parts, offsets) for row, a, t in p.divergence],
        [c for p in parts for c in p.checksums],
    )


@dataclass
class SingleRun:
    run_seed: int
    msd: dict[str, np.ndarray]
    lam: dict[str, np.ndarray]
    stream_checksum: str
    diverged: bool = False


def run_single(cfg: ExperimentConfig, run_seed: int) -> SingleRun:
    """One Monte-Carlo run: per-iteration MSD for each algorithm and the
    mixing-parameter trajectory of each combined algorithm."""
    out = _simulate(cfg, [run_seed])
    return SingleRun(
        run_seed,
        {k: v[0] for k, v in out.msd.items()},
        {k: v[0] for k, v in out.lam.items()},
        out.checksums[0],
        bool(out.diverged[0]),
    )


@dataclass
class RunResult:
    config: ExperimentConfig
    curves: dict[str, LearningCurve]
    steady: dict[str, SteadyStateEstimate]
    lambda_mean: dict[str, np.ndarray]
    run_seeds: list[int]
    optimal_lambda_mean: dict[str, np.ndarray] = field(default_factory=dict)
    excluded: list[tuple[int, str, int]] = field(default_factory=list)  # (seed, algorithm, iteration)

    @property
    def algorithms(self) -> list[str]:
        return list(self.curves)


def _chunks(seq, parts):
    size, extra = divmod(len(seq), parts)
    out, start = [], 0
    for i in range(parts):
        stop = start + size + (i < extra)
        if stop > start:
            out.append(seq[start:stop])
        start = stop
    return out


def run_scenario(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    """Run ``cfg.n_runs`` seeded runs and average them.

    ``workers > 1`` fans the runs out over processes; the result is
    identical for every worker count.
    """
    seeds = [run_seed(cfg.master_seed, i) for i in range(cfg.n_runs)]
    workers = max(1, min(int(workers), len(seeds)))
    log.info("running %d runs x %d iterations (K=%d, delta=%g) on %d worker(s)",
             cfg.n_runs, cfg.n_iterations, cfg.n_active, cfg.delta, workers)
    if workers == 1:
        out = simulate_runs(cfg, seeds)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(simulate_runs, [cfg] * workers, _chunks(seeds, workers)))
        out = _concat(parts) if len(parts) > 1 else parts[0]
    return _aggregate(cfg, seeds, out)


def _aggregate(cfg: ExperimentConfig, seeds, out: BatchOutput) -> RunResult:
    keep = np.flatnonzero(~out.diverged)
    excluded = [(seeds[row], alg, t) for row, alg, t in out.divergence]
    for seed, alg, t in excluded:
        log.warning("excluded run seed=%d: %s diverged at iteration %d", seed, alg, t)
    if keep.size == 0:
        raise DivergenceError("every run diverged", run_seed=seeds[0])

    def mean(arrays, label):
        return monte_carlo_average([arrays[i] for i in keep], label)

    curves = {label: mean(arr, label) for label, arr in out.msd.items()}
    steady = {label: steady_state(c, cfg.steady_window) for label, c in curves.items()}
    lam = {label: mean(arr, label).msd_linear for label, arr in out.lam.items()}
    lam_opt = {label: mean(arr, label).msd_linear for label, arr in out.lam_opt.items()}
    return RunResult(cfg, curves, steady, lam, seeds, lam_opt, excluded)


@dataclass
class SweepResult:
    deltas: list[float]
    results: list[RunResult]

    def summary(self) -> list[tuple[float, str, float]]:
        """``(delta, algorithm, steady-state MSD in dB)`` rows."""
        return [
            (d, alg, est.msd_db)
            for d, res in zip(self.deltas, self.results)
            for alg, est in res.steady.items()
        ]


def sweep_delta(cfg: ExperimentConfig, deltas, workers: int = 1) -> SweepResult:
    """Paired sweep over the slow-filter step ratio: every delta reuses the
    same run seeds."""
    deltas = [float(d) for d in deltas]
    if not deltas:
        raise ConfigError("need at least one value", field="deltas")
    configs = [replace(cfg, delta=d) for d in deltas]  # validates every delta up front
    return SweepResult(deltas, [run_scenario(c, workers) for c in configs])
