"""Affine combination of a fast and a slow adaptive filter.

The combined output is ``lam*y_fast + (1 - lam)*y_slow``, which equals the
output of the equivalent filter ``lam*(w_fast - w_slow) + w_slow``.  ``lam``
is not restricted to ``[0, 1]``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .adaptive_filters import FilterState, SparsityParams, l0lms_step, lms_step, predict
from .errors import ConfigError, DegenerateCombinerError, DimensionError, DivergenceError
from .signal_model import RegressorWindow


@dataclass(frozen=True)
class CombinerState:
    """Mixing parameter and its step size.

    ``lam`` is a scalar, or an array of shape ``(batch,)`` for batched runs.
    """

    lam: float
    step_size: float = 1.0
    clamp_range: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.step_size > 0:
            raise ConfigError(f"must be > 0, got {self.step_size}", field="mu_lambda")
        if self.clamp_range is not None:
            lo, hi = self.clamp_range
            if not lo < hi:
                raise ConfigError(f"empty interval {self.clamp_range}", field="lambda_clamp")


@dataclass(frozen=True)
class CombinedFilter:
    fast: FilterState
    slow: FilterState
    combiner: CombinerState
    sparsity: SparsityParams | None = None

    def __post_init__(self):
        if self.fast.step_size < self.slow.step_size:
            raise ConfigError(
                f"fast step {self.fast.step_size} is below slow step {self.slow.step_size}",
                field="step_size",
            )
        if self.fast.weights.shape != self.slow.weights.shape:
            raise DimensionError(
                f"component shapes differ: {self.fast.weights.shape} vs {self.slow.weights.shape}"
            )

    @classmethod
    def initial(
        cls,
        n_taps: int,
        mu_fast: float,
        mu_slow: float,
        lam: float = 0.5,
        mu_lambda: float = 1.0,
        sparsity: SparsityParams | None = None,
        clamp_range=None,
        batch: int | None = None,
    ) -> "CombinedFilter":
        """Zero-initialized filters with a common starting ``lam``."""
        lam0 = lam if batch is None else np.full(batch, float(lam))
        return cls(
            FilterState.zeros(n_taps, mu_fast, batch),
            FilterState.zeros(n_taps, mu_slow, batch),
            CombinerState(lam0, mu_lambda, clamp_range),
            sparsity,
        )

    @property
    def lam(self):
        return self.combiner.lam


def _lam_column(cf: CombinedFilter):
    lam = np.asarray(cf.combiner.lam, dtype=float)
    return lam[..., np.newaxis] if lam.ndim else lam


def difference_filter(cf: CombinedFilter) -> np.ndarray:
    return cf.fast.weights - cf.slow.weights


def equivalent_weights(cf: CombinedFilter) -> np.ndarray:
    """``lam*(w_fast - w_slow) + w_slow``.

    Evaluated as ``lam*w_fast + (1 - lam)*w_slow`` so that ``lam`` = 1 and 0
    return the component filters exactly.
    """
    lam = _lam_column(cf)
    return lam * cf.fast.weights + (1.0 - lam) * cf.slow.weights


def combined_output(cf: CombinedFilter, window: RegressorWindow):
    lam = cf.combiner.lam
    return lam * predict(cf.fast, window) + (1.0 - lam) * predict(cf.slow, window)


def combined_error(cf: CombinedFilter, desired, window: RegressorWindow):
    return desired - combined_output(cf, window)


def combiner_step(state: CombinerState, combined_error, y_fast, y_slow, check: bool = True) -> CombinerState:
    """Stochastic-gradient update of the mixing parameter.

    ``lam' = lam + mu_lambda * e * (y_fast - y_slow)``, then clamped when a
    range is configured.  ``y_fast - y_slow`` is the difference filter's
    output, so ``lam`` freezes whenever the two filters agree.
    """
    lam = state.lam + state.step_size * combined_error * (y_fast - y_slow)
    if state.clamp_range is not None:
        lam = np.clip(lam, *state.clamp_range)
    if check and not np.all(np.isfinite(lam)):
        raise DivergenceError("non-finite mixing parameter")
    if np.ndim(lam) == 0:
        lam = float(lam)
    return replace(state, lam=lam)


def optimal_lambda(w_true, w_fast, w_slow, r_xx=None) -> float:
    """Mixing parameter minimizing the excess error given the true system.

    ``(w_true - w_slow)^T R (w_fast - w_slow) / (w_fast - w_slow)^T R (w_fast - w_slow)``
    with ``R`` the input autocorrelation (identity when omitted).

    Raises
    ------
    DegenerateCombinerError
        If the two filters (numerically) coincide.
    """
    w_true, w_fast, w_slow = (np.asarray(v, dtype=float) for v in (w_true, w_fast, w_slow))
    if not w_true.shape == w_fast.shape == w_slow.shape:
        raise DimensionError("weight vectors must have equal length")
    w12 = w_fast - w_slow
    wo2 = w_true - w_slow
    r = np.eye(w12.size) if r_xx is None else np.asarray(r_xx, dtype=float)
    if r.shape != (w12.size, w12.size):
        raise DimensionError(f"autocorrelation must be {w12.size}x{w12.size}")
    den = w12 @ r @ w12
    if den <= 1e-12 * (w12 @ w12):
        raise DegenerateCombinerError("difference filter is (numerically) zero")
    return float((wo2 @ r @ w12) / den)


def optimal_lambda_white(w_true: np.ndarray, cf: CombinedFilter) -> np.ndarray:
    """Batched :func:`optimal_lambda` for white input, degenerate rows set to 0."""
    w12 = difference_filter(cf)
    den = np.sum(w12 * w12, axis=-1)
    num = np.sum((w_true - cf.slow.weights) * w12, axis=-1)
    ok = den > 0.0
    return np.where(ok, num / np.where(ok, den, 1.0), 0.0)


def combined_iteration(cf: CombinedFilter, window: RegressorWindow, desired, check: bool = True) -> CombinedFilter:
    """Advance the combined filter by one sample.

    Every quantity is computed from the time-n weights; the mixing parameter
    and the two component filters are then updated independently.
    """
    y_fast = predict(cf.fast, window)
    y_slow = predict(cf.slow, window)
    lam = cf.combiner.lam
    e = desired - (lam * y_fast + (1.0 - lam) * y_slow)
    combiner = combiner_step(cf.combiner, e, y_fast, y_slow, check=check)
    e_fast = desired - y_fast
    e_slow = desired - y_slow
    if cf.sparsity is None:
        fast = lms_step(cf.fast, window, e_fast, check=check)
        slow = lms_step(cf.slow, window, e_slow, check=check)
    else:
        fast = l0lms_step(cf.fast, cf.sparsity, window, e_fast, check=check)
        slow = l0lms_step(cf.slow, cf.sparsity, window, e_slow, check=check)
    return CombinedFilter(fast, slow, combiner, cf.sparsity)
