"""Sparse FIR systems, tap-delay regressors and SNR-calibrated noise.

The observation model is ``d(t) = w_o^T x(t) + z(t)`` where ``x(t)`` holds the
last ``n_taps`` input samples, most recent first.

All functions accept either a single realization (1-D buffers) or a batch of
independent realizations stacked along the leading axis, so the Monte-Carlo
harness can drive many runs with the same code path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray | float:
    # Row-wise reduction; result per row does not depend on the batch size.
    return np.sum(a * b, axis=-1)


@dataclass(frozen=True)
class SparseFir:
    """Ground-truth FIR weight vector with a known support."""

    weights: np.ndarray
    active_indices: tuple[int, ...]

    @property
    def n_taps(self) -> int:
        return self.weights.shape[-1]

    @property
    def n_active(self) -> int:
        return len(self.active_indices)


@dataclass(frozen=True)
class RegressorWindow:
    """Tap-delay line ``[x(t), x(t-1), ..., x(t-N+1)]``.

    ``buffer`` has shape ``(n_taps,)`` or ``(batch, n_taps)``.
    """

    buffer: np.ndarray

    @classmethod
    def zeros(cls, n_taps: int, batch: int | None = None) -> "RegressorWindow":
        shape = (n_taps,) if batch is None else (batch, n_taps)
        return cls(np.zeros(shape))

    @property
    def n_taps(self) -> int:
        return self.buffer.shape[-1]


@dataclass(frozen=True)
class NoiseSpec:
    variance: float

    def __post_init__(self):
        if not self.variance >= 0:
            raise ConfigError(f"must be >= 0, got {self.variance}", field="variance")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return np.sqrt(self.variance) * rng.standard_normal(size)


def generate_sparse_fir(
    n_taps: int, n_active: int, rng: np.random.Generator, normalize: bool = True
) -> SparseFir:
    """Draw a random sparse system.

    The support is ``n_active`` positions chosen uniformly without
    replacement; the active gains are standard Gaussian.

    Parameters
    ----------
    n_taps : int
        Filter length ``N``.
    n_active : int
        Number of nonzero taps ``K``, ``1 <= K <= N``.
    rng : numpy.random.Generator
        Random source, owned by the caller.
    normalize : bool, optional
        Scale the result to unit Euclidean norm (default).

    Returns
    -------
    SparseFir
    """
    if n_taps < 1:
        raise ConfigError(f"must be >= 1, got {n_taps}", field="n_taps")
    if not 1 <= n_active <= n_taps:
        raise ConfigError(
            f"must lie in [1, n_taps={n_taps}], got {n_active}", field="n_active"
        )
    support = np.sort(rng.choice(n_taps, size=n_active, replace=False))
    weights = np.zeros(n_taps)
    weights[support] = rng.standard_normal(n_active)
    if normalize:
        weights /= np.linalg.norm(weights)
    return SparseFir(weights, tuple(int(k) for k in support))


def push_sample(window: RegressorWindow, x) -> RegressorWindow:
    """Shift one new sample (or one per batch row) into the delay line."""
    old = window.buffer
    new = np.empty(old.shape)
    new[..., 0] = x
    new[..., 1:] = old[..., :-1]
    return RegressorWindow(new)


def noise_variance_from_snr(snr_db: float, signal_power: float) -> float:
    """Noise power giving ``signal_power / noise = 10**(snr_db/10)``.

    ``snr_db = inf`` gives a noiseless system.
    """
    if not signal_power > 0:
        raise ConfigError(f"must be > 0, got {signal_power}", field="signal_power")
    return signal_power * 10.0 ** (-snr_db / 10.0)


def system_output(system, window: RegressorWindow, noise=0.0):
    """Observed output ``w_o^T x(t) + z(t)``.

    ``system`` may be a :class:`SparseFir` or a bare weight array.
    """
    weights = system.weights if isinstance(system, SparseFir) else np.asarray(system)
    if weights.shape[-1] != window.buffer.shape[-1]:
        raise DimensionError(
            f"system has {weights.shape[-1]} taps, regressor has {window.buffer.shape[-1]}"
        )
    return _dot(weights, window.buffer) + noise


def white_input(rng: np.random.Generator, n_samples: int, variance: float = 1.0) -> np.ndarray:
    """Zero-mean white Gaussian input sequence."""
    if not variance > 0:
        raise ConfigError(f"must be > 0, got {variance}", field="input_variance")
    return np.sqrt(variance) * rng.standard_normal(n_samples)
