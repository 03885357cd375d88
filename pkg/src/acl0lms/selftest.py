"""Small-scale oracle and identity checks behind ``acl0lms selftest``."""
from __future__ import annotations

import time

import numpy as np
from scipy.optimize import minimize_scalar

from .adaptive_filters import (
    FilterState,
    SparsityParams,
    l0_penalty_gradient_exact,
    l0_penalty_gradient_taylor,
    l0lms_step,
    lms_step,
    predict,
    zero_attract,
)
from .affine_combiner import CombinedFilter, CombinerState, combined_output, equivalent_weights, optimal_lambda
from .config import ExperimentConfig
from .experiment import run_single
from .signal_model import RegressorWindow, push_sample


def _penalty(w, alpha, beta):
    return beta * (1.0 - np.exp(-alpha * np.abs(w)))


def check_affine_identity(rng, n=1000):
    worst = 0.0
    for _ in range(n):
        taps = int(rng.integers(1, 40))
        cf = CombinedFilter(
            FilterState(rng.standard_normal(taps), 1.0),
            FilterState(rng.standard_normal(taps), 0.5),
            CombinerState(float(rng.uniform(-3, 3))),
        )
        window = RegressorWindow(rng.standard_normal(taps))
        y = combined_output(cf, window)
        err = abs(y - float(equivalent_weights(cf) @ window.buffer)) / (1 + abs(y))
        worst = max(worst, err)
    return worst <= 1e-12, f"max rel err {worst:.2e}"


def check_optimal_lambda(rng, n=20):
    worst = 0.0
    for _ in range(n):
        w_o, w1, w2 = rng.standard_normal((3, 16))
        lam = optimal_lambda(w_o, w1, w2)
        if abs(lam) > 5:
            continue
        res = minimize_scalar(
            lambda l: float(np.sum((w_o - (l * (w1 - w2) + w2)) ** 2)),
            bounds=(-5, 5), method="bounded", options={"xatol": 1e-8},
        )
        worst = max(worst, abs(res.x - lam))
    return worst <= 1e-3, f"max |analytic - search| {worst:.2e}"


def check_gradient(rng, n=100, alpha=10.0, h=1e-6):
    w = rng.uniform(0.01, 1.0, n) * rng.choice([-1.0, 1.0], n)
    fd = (_penalty(w + h, alpha, 1.0) - _penalty(w - h, alpha, 1.0)) / (2 * h)
    exact = l0_penalty_gradient_exact(w, alpha, 1.0)
    rel = np.max(np.abs(exact - fd) / np.abs(fd))
    return bool(rel <= 1e-4), f"max rel err {rel:.2e}"


def check_taylor(rng, n=100, alpha=10.0):
    w = rng.uniform(-1 / alpha, 1 / alpha, n)
    lhs = -zero_attract(w, alpha) / 2.0
    rhs = l0_penalty_gradient_taylor(w, alpha, 1.0)
    err = np.max(np.abs(lhs - rhs))
    return bool(err <= 1e-12), f"max abs err {err:.2e}"


def check_attraction(rng, n=100, alpha=10.0):
    w = rng.uniform(1e-6, 1 / alpha - 1e-6, n) * rng.choice([-1.0, 1.0], n)
    ok = np.all(np.sign(zero_attract(w, alpha)) == -np.sign(w))
    # a zero-error step must shrink every tap; gain*2*alpha stays below |w|
    w = rng.uniform(0.01, 1 / alpha, n) * rng.choice([-1.0, 1.0], n)
    st = FilterState(w.copy(), 0.05)
    new = l0lms_step(st, SparsityParams(0.01, alpha), RegressorWindow(np.zeros(n)), 0.0)
    ok = ok and np.all(np.abs(new.weights) < np.abs(w))
    return bool(ok), "taps pulled toward zero" if ok else "attractor pushes taps away from zero"


def check_beta_zero(rng, steps=200, taps=8):
    a = FilterState.zeros(taps, 0.05)
    b = FilterState.zeros(taps, 0.05)
    w_o = rng.standard_normal(taps)
    window = RegressorWindow.zeros(taps)
    params = SparsityParams(0.0, 10.0)
    for _ in range(steps):
        window = push_sample(window, rng.standard_normal())
        d = float(w_o @ window.buffer) + 0.1 * rng.standard_normal()
        a = lms_step(a, window, d - predict(a, window))
        b = l0lms_step(b, params, window, d - predict(b, window))
    same = np.array_equal(a.weights, b.weights)
    return bool(same), "bit-identical" if same else "trajectories differ"


def check_determinism(rng):
    cfg = ExperimentConfig(n_iterations=200, n_runs=1, algorithms=("lms", "ac_l0lms"))
    seed = int(rng.integers(2**31))
    a, b = run_single(cfg, seed), run_single(cfg, seed)
    same = all(np.array_equal(a.msd[k], b.msd[k]) for k in a.msd)
    return same, "repeatable" if same else "run_single not repeatable"


CHECKS = [
    ("affine identity", check_affine_identity),
    ("optimal lambda vs search", check_optimal_lambda),
    ("penalty gradient vs finite difference", check_gradient),
    ("taylor form consistency", check_taylor),
    ("attraction direction", check_attraction),
    ("beta = 0 reduces to LMS", check_beta_zero),
    ("seeded determinism", check_determinism),
]


def selftest(seed: int = 0, echo=print) -> bool:
    """Run every check, print a table and return True iff all pass."""
    rng = np.random.default_rng(seed)
    ok = True
    width = max(len(name) for name, _ in CHECKS)
    start = time.perf_counter()
    for name, check in CHECKS:
        passed, detail = check(rng)
        ok &= bool(passed)
        echo(f"{'PASS' if passed else 'FAIL'}  {name:<{width}}  {detail}")
    echo(f"{'all checks passed' if ok else 'FAILED'} in {time.perf_counter() - start:.2f} s")
    return ok
