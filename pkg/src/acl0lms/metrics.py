"""Mean-square deviation, Monte-Carlo averaging and steady-state estimates."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError

DB_FLOOR = -320.0


class DbFloorWarning(RuntimeWarning):
    """A non-positive value was mapped to the dB floor."""


@dataclass(frozen=True)
class LearningCurve:
    algorithm_id: str
    msd_linear: np.ndarray
    n_runs: int

    @property
    def msd_db(self) -> np.ndarray:
        return to_db(self.msd_linear)

    def __len__(self):
        return len(self.msd_linear)


@dataclass(frozen=True)
class SteadyStateEstimate:
    msd_db: float
    window_fraction: float


def msd(w_true, w_est):
    """Squared deviation ``sum((w_true - w_est)**2)`` along the last axis."""
    w_true = np.asarray(w_true, dtype=float)
    w_est = np.asarray(w_est, dtype=float)
    if w_true.shape[-1] != w_est.shape[-1]:
        raise DimensionError(f"lengths differ: {w_true.shape[-1]} vs {w_est.shape[-1]}")
    d = w_true - w_est
    out = np.sum(d * d, axis=-1)
    return out if np.ndim(out) else float(out)


def _compensated_sum(arrays) -> np.ndarray:
    # Neumaier summation, elementwise, in list order.
    total = np.array(arrays[0], dtype=float)
    comp = np.zeros_like(total)
    for x in arrays[1:]:
        t = total + x
        comp += np.where(np.abs(total) >= np.abs(x), (total - t) + x, (x - t) + total)
        total = t
    return total + comp


def monte_carlo_average(curves, algorithm_id: str = "") -> LearningCurve:
    """Pointwise mean of per-run MSD vectors.

    Runs are reduced in list order with compensated summation plus one
    residual-correction pass, which makes the mean of identical curves exact
    and the result insensitive to run order at the last-bit level.
    """
    curves = [np.asarray(c, dtype=float) for c in curves]
    if not curves:
        raise ValueError("no curves to average")
    length = curves[0].shape
    if any(c.shape != length or c.ndim != 1 for c in curves):
        raise ValueError("curves must be 1-D and of equal length")
    n = len(curves)
    mean = _compensated_sum(curves) / n
    mean = mean + _compensated_sum([c - mean for c in curves]) / n
    return LearningCurve(algorithm_id, mean, n)


def to_db(x):
    """``10*log10(x)``; non-positive inputs map to ``DB_FLOOR`` with a warning."""
    x = np.asarray(x, dtype=float)
    bad = ~(x > 0)
    if np.any(bad):
        warnings.warn(f"{int(np.sum(bad))} non-positive value(s) mapped to {DB_FLOOR} dB", DbFloorWarning)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(bad, DB_FLOOR, 10.0 * np.log10(np.where(bad, 1.0, x)))
    return out if out.ndim else float(out)


def steady_state(curve: LearningCurve, window_fraction: float = 0.1) -> SteadyStateEstimate:
    """Mean of the trailing ``ceil(window_fraction * len)`` points, in dB."""
    if not 0 < window_fraction <= 1:
        raise ConfigError(f"must lie in (0, 1], got {window_fraction}", field="steady_window")
    n = len(curve.msd_linear)
    # guard against 0.1*30 = 3.0000000000000004 style round-up
    count = max(1, math.ceil(window_fraction * n - 1e-9))
    tail = curve.msd_linear[n - count:]
    return SteadyStateEstimate(to_db(float(np.mean(tail))), window_fraction)


def convergence_iteration(curve: LearningCurve, level_db: float, margin_db: float = 3.0) -> int:
    """First iteration at which the curve is within ``margin_db`` of ``level_db``.

    Returns ``len(curve)`` if the curve never gets there.
    """
    hit = np.flatnonzero(curve.msd_db <= level_db + margin_db)
    return int(hit[0]) if hit.size else len(curve)
