import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acl0lms.adaptive_filters import (
    FilterState,
    SparsityParams,
    filter_error,
    flipped_attractor,
    l0_penalty_gradient_exact,
    l0_penalty_gradient_taylor,
    l0lms_step,
    lms_step,
    predict,
    zero_attract,
)
from acl0lms.errors import ConfigError, DimensionError, DivergenceError
from acl0lms.signal_model import RegressorWindow, push_sample

ALPHA = 10.0
# 10*exp(-0.5) from an arbitrary-precision evaluation
GRAD_AT_005 = 6.065306597126334236


def window(*x):
    return RegressorWindow(np.array(x, dtype=float))


def state(*w, mu=0.1):
    return FilterState(np.array(w, dtype=float), mu)


# -- predict / filter_error ------------------------------------------------

def test_predict_examples():
    assert predict(state(1, 1), window(2, 3)) == 5.0
    assert predict(state(0, 0, 0), window(4, -2, 9)) == 0.0
    x = window(4.0, -2.0, 9.0)
    for k in range(3):
        e_k = np.zeros(3)
        e_k[k] = 1.0
        assert predict(FilterState(e_k, 0.1), x) == x.buffer[k]


def test_predict_dimension_error():
    with pytest.raises(DimensionError):
        predict(state(1, 1), window(1, 2, 3))


def test_filter_error_examples():
    assert filter_error(1.0, state(1, 0), window(1, 0)) == 0.0
    assert filter_error(1.0, state(0, 0), window(3, 4)) == 1.0
    assert filter_error(0.3, state(0.5, -0.5), window(1, 1)) == pytest.approx(0.3, abs=1e-15)


def test_filter_state_rejects_bad_step():
    with pytest.raises(ConfigError):
        FilterState(np.zeros(2), 0.0)


# -- lms_step --------------------------------------------------------------

def test_lms_step_hand_computed():
    s = state(0, 0, mu=0.5)
    x = window(1, -1)
    e = filter_error(1.0, s, x)
    assert e == 1.0
    new = lms_step(s, x, e)
    np.testing.assert_array_equal(new.weights, [0.5, -0.5])
    assert new.step_size == 0.5


def test_lms_step_zero_error_and_zero_regressor():
    s = state(0.3, -0.2)
    np.testing.assert_array_equal(lms_step(s, window(1, 2), 0.0).weights, s.weights)
    two = lms_step(lms_step(s, window(0, 0), 5.0), window(0, 0), -3.0)
    np.testing.assert_array_equal(two.weights, s.weights)


@pytest.mark.filterwarnings("ignore:overflow")
def test_lms_step_divergence_fault():
    with pytest.raises(DivergenceError):
        lms_step(state(1e308, 0.0, mu=1.0), window(1e308, 0), 1e308)


def test_lms_step_batched_matches_rowwise():
    rng = np.random.default_rng(0)
    w = rng.standard_normal((5, 4))
    x = rng.standard_normal((5, 4))
    e = rng.standard_normal(5)
    batched = lms_step(FilterState(w, 0.1), RegressorWindow(x), e).weights
    for i in range(5):
        row = lms_step(FilterState(w[i], 0.1), RegressorWindow(x[i]), e[i]).weights
        np.testing.assert_array_equal(batched[i], row)


# -- penalty gradient and attractor -----------------------------------------

def test_gradient_exact_examples():
    assert l0_penalty_gradient_exact(0.0, ALPHA, 1.0) == 0.0
    assert l0_penalty_gradient_exact(0.05, ALPHA, 1.0) == pytest.approx(GRAD_AT_005, rel=1e-14)
    w = np.linspace(-1, 1, 41)
    np.testing.assert_array_equal(
        l0_penalty_gradient_exact(-w, ALPHA, 0.3), -l0_penalty_gradient_exact(w, ALPHA, 0.3)
    )


def test_gradient_matches_central_difference():
    rng = np.random.default_rng(7)
    w = rng.uniform(0.01, 1.0, 100) * rng.choice([-1.0, 1.0], 100)
    h = 1e-6
    penalty = lambda v: 1.0 - np.exp(-ALPHA * np.abs(v))
    fd = (penalty(w + h) - penalty(w - h)) / (2 * h)
    rel = np.abs(l0_penalty_gradient_exact(w, ALPHA, 1.0) - fd) / np.abs(fd)
    assert rel.max() <= 1e-4


def test_zero_attract_examples():
    assert zero_attract(0.05, ALPHA) == pytest.approx(-10.0, abs=1e-12)
    assert zero_attract(0.2, ALPHA) == 0.0
    assert zero_attract(-0.05, ALPHA) == pytest.approx(10.0, abs=1e-12)
    assert zero_attract(0.0, ALPHA) == 0.0


def test_zero_attract_window_edges():
    assert zero_attract(1 / ALPHA, ALPHA) == pytest.approx(0.0, abs=1e-12)
    assert zero_attract(-1 / ALPHA, ALPHA) == pytest.approx(0.0, abs=1e-12)
    outside = np.array([0.1001, 0.5, 3.0, -0.2, -7.0])
    np.testing.assert_array_equal(zero_attract(outside, ALPHA), 0.0)


@given(st.floats(min_value=1e-9, max_value=0.1 - 1e-9), st.sampled_from([-1.0, 1.0]))
def test_attraction_direction(mag, sign):
    w = sign * mag
    assert np.sign(zero_attract(w, ALPHA)) == -np.sign(w)


@given(st.floats(min_value=-0.1, max_value=0.1), st.floats(min_value=0.5, max_value=50.0))
def test_taylor_consistency(w, alpha):
    w = max(min(w, 1 / alpha), -1 / alpha)
    lhs = -zero_attract(w, alpha) / 2.0
    assert lhs == pytest.approx(alpha * np.sign(w) * (1 - alpha * abs(w)), abs=1e-12 * alpha)
    assert lhs == pytest.approx(l0_penalty_gradient_taylor(w, alpha, 1.0), abs=1e-12 * alpha)


def test_taylor_gradient_vanishes_outside_window():
    np.testing.assert_array_equal(l0_penalty_gradient_taylor(np.array([0.2, -0.5]), ALPHA, 1.0), 0.0)


def test_flipped_attractor_hook_is_scoped():
    with flipped_attractor():
        assert zero_attract(0.05, ALPHA) == pytest.approx(10.0, abs=1e-12)
    assert zero_attract(0.05, ALPHA) == pytest.approx(-10.0, abs=1e-12)


# -- l0lms_step ------------------------------------------------------------

def test_l0lms_beta_zero_equals_lms():
    rng = np.random.default_rng(3)
    for _ in range(50):
        s = FilterState(rng.uniform(-0.2, 0.2, 6), 0.05)
        x = RegressorWindow(rng.standard_normal(6))
        e = float(rng.standard_normal())
        np.testing.assert_array_equal(
            l0lms_step(s, SparsityParams(0.0, ALPHA), x, e).weights, lms_step(s, x, e).weights
        )


def test_l0lms_hand_computed():
    s = state(0.05, mu=0.1)
    x = window(0.0)
    e = filter_error(0.0, s, x)
    assert e == 0.0
    big = l0lms_step(s, SparsityParams(0.4, ALPHA), x, e)
    assert big.weights[0] == pytest.approx(-0.15, abs=1e-12)
    small = l0lms_step(s, SparsityParams(0.004, ALPHA), x, e)
    assert small.weights[0] == pytest.approx(0.048, abs=1e-12)


def test_l0lms_outside_window_untouched():
    s = state(0.5, mu=0.1)
    assert l0lms_step(s, SparsityParams(0.4, ALPHA), window(0.0), 0.0).weights[0] == 0.5


def test_l0lms_repeated_attraction_follows_closed_form():
    mu, beta, w0 = 0.1, 0.004, 0.05
    g = mu * beta / 2
    growth = 1 + 2 * g * ALPHA**2
    # w_n - 1/alpha = growth**n * (w0 - 1/alpha): positive while growth**n < 2
    n_pos = int(np.floor(np.log(2.0) / np.log(growth)))
    s = state(w0, mu=mu)
    params = SparsityParams(beta, ALPHA)
    prev = w0
    for n in range(1, n_pos + 1):
        s = l0lms_step(s, params, window(0.0), 0.0)
        expected = 1 / ALPHA - growth**n * (1 / ALPHA - w0)
        assert s.weights[0] == pytest.approx(expected, abs=1e-12)
        assert 0 < s.weights[0] < prev
        prev = s.weights[0]


def test_l0lms_chatter_near_zero_is_bounded():
    mu, beta = 0.1, 0.004
    s = state(0.05, -0.03, 0.0, mu=mu)
    params = SparsityParams(beta, ALPHA)
    for _ in range(500):
        s = l0lms_step(s, params, window(0.0, 0.0, 0.0), 0.0)
    assert np.all(np.abs(s.weights) <= mu * beta * ALPHA)
    assert s.weights[2] == 0.0


def test_alpha_mu_scaling_gain():
    params = SparsityParams(0.004, ALPHA, scaling="alpha_mu")
    assert params.attractor_gain(0.1) == pytest.approx(1.0)
    assert SparsityParams(0.004, ALPHA).attractor_gain(0.1) == pytest.approx(0.0002)


@pytest.mark.parametrize("kwargs", [dict(beta=-1.0), dict(beta=0.1, alpha=0.0), dict(beta=0.1, scaling="x")])
def test_sparsity_params_validation(kwargs):
    with pytest.raises(ConfigError):
        SparsityParams(**kwargs)


def test_lms_reduces_msd_noiseless():
    rng = np.random.default_rng(4)
    w_o = rng.standard_normal(8)
    s = FilterState.zeros(8, 0.05)
    x = RegressorWindow.zeros(8)
    for _ in range(2000):
        x = push_sample(x, rng.standard_normal())
        s = lms_step(s, x, filter_error(float(w_o @ x.buffer), s, x))
    assert np.sum((s.weights - w_o) ** 2) < 1e-10


@settings(max_examples=50)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.floats(-2, 2))
def test_l0lms_is_lms_plus_attractor(w, e):
    s = FilterState(np.array(w), 0.05)
    x = RegressorWindow(np.array([0.3, -1.0, 2.0]))
    p = SparsityParams(0.01, ALPHA)
    diff = l0lms_step(s, p, x, e).weights - lms_step(s, x, e).weights
    np.testing.assert_allclose(diff, 0.05 * 0.01 / 2 * zero_attract(np.array(w), ALPHA), atol=1e-15)
