"""LMS and l0-penalized LMS weight updates.

The l0 penalty ``beta * sum(1 - exp(-alpha*|w_k|))`` is handled in two forms:

* :func:`l0_penalty_gradient_exact` - the exact per-tap gradient,
* :func:`zero_attract` - its first-order (piecewise linear) surrogate, which is
  what :func:`l0lms_step` applies.  Within ``|w| <= 1/alpha`` it equals
  ``-2/beta`` times the linearized gradient, and zero outside.

The L0-LMS update descends the penalty, so small taps are pulled toward zero::

    w' = w + mu*e*x + (mu*beta/2) * zero_attract(w, alpha)
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DimensionError, DivergenceError
from .signal_model import RegressorWindow, _dot

ATTRACTOR_SCALINGS = ("mu_beta", "alpha_mu")

# Debug hook for mutation testing of the self-test; see flipped_attractor().
_ATTRACTOR_SIGN = 1.0


@contextlib.contextmanager
def flipped_attractor():
    """Temporarily reverse the sign of the l0 penalty terms (debug only)."""
    global _ATTRACTOR_SIGN
    _ATTRACTOR_SIGN = -1.0
    try:
        yield
    finally:
        _ATTRACTOR_SIGN = 1.0


@dataclass(frozen=True)
class FilterState:
    """Weights of one adaptive filter and its step size.

    ``weights`` has shape ``(n_taps,)`` or ``(batch, n_taps)``.
    """

    weights: np.ndarray
    step_size: float

    def __post_init__(self):
        if not self.step_size > 0:
            raise ConfigError(f"must be > 0, got {self.step_size}", field="step_size")

    @classmethod
    def zeros(cls, n_taps: int, step_size: float, batch: int | None = None) -> "FilterState":
        shape = (n_taps,) if batch is None else (batch, n_taps)
        return cls(np.zeros(shape), step_size)

    @property
    def n_taps(self) -> int:
        return self.weights.shape[-1]


@dataclass(frozen=True)
class SparsityParams:
    """l0 penalty settings.

    ``beta`` may be an array of shape ``(batch, 1)`` when each Monte-Carlo run
    has its own noise level.  ``scaling`` selects the attractor gain:
    ``"mu_beta"`` gives ``mu*beta/2`` and ``"alpha_mu"`` gives ``alpha*mu``.
    """

    beta: float
    alpha: float = 10.0
    scaling: str = "mu_beta"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"must be > 0, got {self.alpha}", field="alpha")
        if not np.all(np.asarray(self.beta) >= 0):
            raise ConfigError(f"must be >= 0, got {self.beta}", field="beta")
        if self.scaling not in ATTRACTOR_SCALINGS:
            raise ConfigError(
                f"must be one of {ATTRACTOR_SCALINGS}, got {self.scaling!r}",
                field="attractor_scaling",
            )

    def attractor_gain(self, step_size: float):
        if self.scaling == "mu_beta":
            return step_size * self.beta / 2.0
        return self.alpha * step_size


def _check_dims(weights: np.ndarray, window: RegressorWindow):
    if weights.shape[-1] != window.buffer.shape[-1]:
        raise DimensionError(
            f"filter has {weights.shape[-1]} taps, regressor has {window.buffer.shape[-1]}"
        )


def _check_finite(weights: np.ndarray):
    if not np.all(np.isfinite(weights)):
        raise DivergenceError("non-finite filter weights")


def predict(state: FilterState, window: RegressorWindow):
    """Filter output ``w^T x``."""
    _check_dims(state.weights, window)
    return _dot(state.weights, window.buffer)


def filter_error(desired, state: FilterState, window: RegressorWindow):
    return desired - predict(state, window)


def _lms_update(state: FilterState, window: RegressorWindow, error) -> np.ndarray:
    _check_dims(state.weights, window)
    e = np.asarray(error, dtype=float)[..., np.newaxis]
    return state.weights + (state.step_size * e) * window.buffer


def lms_step(state: FilterState, window: RegressorWindow, error, check: bool = True) -> FilterState:
    """Standard LMS update ``w + mu*e*x``.

    With ``check=False`` the finiteness test is left to the caller.
    """
    weights = _lms_update(state, window, error)
    if check:
        _check_finite(weights)
    return replace(state, weights=weights)


def l0_penalty_gradient_exact(w, alpha: float, beta: float):
    """Gradient of ``beta*(1 - exp(-alpha*|w|))``: ``beta*alpha*sgn(w)*exp(-alpha*|w|)``.

    ``sgn(0)`` is 0, so the gradient vanishes at the origin.
    """
    w = np.asarray(w, dtype=float)
    g = _ATTRACTOR_SIGN * beta * alpha * np.sign(w) * np.exp(-alpha * np.abs(w))
    return g if g.ndim else float(g)


def l0_penalty_gradient_taylor(w, alpha: float, beta: float):
    """:func:`l0_penalty_gradient_exact` with ``exp(-alpha|w|)`` linearized.

    The linearization ``1 - alpha|w|`` is used inside ``|w| <= 1/alpha`` and
    the gradient is zero outside.
    """
    w = np.asarray(w, dtype=float)
    inside = np.abs(w) <= 1.0 / alpha
    g = np.where(inside, beta * alpha * np.sign(w) * (1.0 - alpha * np.abs(w)), 0.0)
    g = _ATTRACTOR_SIGN * g
    return g if g.ndim else float(g)


def zero_attract(w, alpha: float):
    """Piecewise zero attractor.

    Returns ``2*alpha**2*w - 2*alpha*sgn(w)`` for ``|w| <= 1/alpha`` and 0
    elsewhere.  Its sign is opposite to ``w`` inside the window.
    """
    w = np.asarray(w, dtype=float)
    s = 2.0 * alpha * alpha * w - 2.0 * alpha * np.sign(w)
    s = _ATTRACTOR_SIGN * np.where(np.abs(w) <= 1.0 / alpha, s, 0.0)
    return s if s.ndim else float(s)


def l0lms_step(
    state: FilterState,
    params: SparsityParams,
    window: RegressorWindow,
    error,
    check: bool = True,
) -> FilterState:
    """L0-LMS update: the LMS step plus the zero attractor.

    ``beta = 0`` reproduces :func:`lms_step` bit for bit.
    """
    weights = _lms_update(state, window, error)
    gain = params.attractor_gain(state.step_size)
    weights = weights + gain * zero_attract(state.weights, params.alpha)
    if check:
        _check_finite(weights)
    return replace(state, weights=weights)
