import numpy as np
import pytest

from acl0lms.errors import ConfigError, DimensionError
from acl0lms.signal_model import (
    NoiseSpec,
    RegressorWindow,
    SparseFir,
    generate_sparse_fir,
    noise_variance_from_snr,
    push_sample,
    system_output,
    white_input,
)


def test_sparse_fir_table_size():
    fir = generate_sparse_fir(32, 3, np.random.default_rng(1))
    assert fir.weights.shape == (32,)
    assert np.count_nonzero(fir.weights) == 3
    assert set(np.flatnonzero(fir.weights)) == set(fir.active_indices)
    assert np.linalg.norm(fir.weights) == pytest.approx(1.0, abs=1e-12)


def test_sparse_fir_dense_boundary():
    fir = generate_sparse_fir(4, 4, np.random.default_rng(2))
    assert np.count_nonzero(fir.weights == 0) == 0


@pytest.mark.parametrize("k", [1, 3, 6, 32])
def test_sparse_fir_deterministic(k):
    a = generate_sparse_fir(32, k, np.random.default_rng(99))
    b = generate_sparse_fir(32, k, np.random.default_rng(99))
    np.testing.assert_array_equal(a.weights, b.weights)
    assert a.active_indices == b.active_indices
    assert np.count_nonzero(a.weights) == k


def test_sparse_fir_unnormalized_is_gaussian_scale():
    fir = generate_sparse_fir(32, 6, np.random.default_rng(3), normalize=False)
    assert np.linalg.norm(fir.weights) != pytest.approx(1.0)


@pytest.mark.parametrize("n_active", [0, 33])
def test_sparse_fir_rejects_bad_support(n_active):
    with pytest.raises(ConfigError):
        generate_sparse_fir(32, n_active, np.random.default_rng(0))


def test_support_positions_are_uniform():
    rng = np.random.default_rng(5)
    hits = np.zeros(8)
    for _ in range(4000):
        hits[list(generate_sparse_fir(8, 2, rng).active_indices)] += 1
    # each position expected 4000 * 2/8 = 1000 times
    assert np.all(np.abs(hits - 1000) < 120)


def test_push_sample_shift():
    w = push_sample(RegressorWindow(np.array([1.0, 2.0, 3.0])), 9.0)
    np.testing.assert_array_equal(w.buffer, [9.0, 1.0, 2.0])


def test_push_sample_zero_fixed_point():
    w = push_sample(RegressorWindow(np.zeros(2)), 0.0)
    np.testing.assert_array_equal(w.buffer, [0.0, 0.0])


def test_push_sample_capacity():
    w = RegressorWindow(np.array([7.0, 7.0, 7.0, 7.0]))
    for x in [1.0, 2.0, 3.0, 4.0]:
        w = push_sample(w, x)
    np.testing.assert_array_equal(w.buffer, [4.0, 3.0, 2.0, 1.0])


def test_push_sample_does_not_mutate():
    old = RegressorWindow(np.array([1.0, 2.0]))
    push_sample(old, 5.0)
    np.testing.assert_array_equal(old.buffer, [1.0, 2.0])


def test_push_sample_batched_rows_independent():
    w = RegressorWindow(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
    w = push_sample(w, np.array([10.0, 20.0]))
    np.testing.assert_array_equal(w.buffer, [[10.0, 1.0, 2.0], [20.0, 4.0, 5.0]])


@pytest.mark.parametrize(
    "snr, power, expected",
    [(10.0, 1.0, 0.1), (0.0, 1.0, 1.0), (10.0, 2.0, 0.2), (20.0, 1.0, 0.01)],
)
def test_noise_variance_from_snr(snr, power, expected):
    assert noise_variance_from_snr(snr, power) == pytest.approx(expected, rel=1e-12)


def test_noise_variance_infinite_snr():
    assert noise_variance_from_snr(float("inf"), 1.0) == 0.0


@pytest.mark.parametrize("power", [0.0, -1.0])
def test_noise_variance_rejects_nonpositive_power(power):
    with pytest.raises(ConfigError):
        noise_variance_from_snr(10.0, power)


def test_system_output_examples():
    assert system_output(SparseFir(np.array([1.0, 0.0]), (0,)), RegressorWindow(np.array([2.0, 5.0]))) == 2.0
    assert system_output(np.zeros(3), RegressorWindow(np.array([1.0, 2.0, 3.0])), 0.7) == 0.7
    y = system_output(np.array([0.5, -0.5]), RegressorWindow(np.array([1.0, 1.0])), 0.3)
    assert y == pytest.approx(0.3, abs=1e-15)


def test_system_output_dimension_error():
    with pytest.raises(DimensionError):
        system_output(np.zeros(3), RegressorWindow(np.zeros(2)))


def test_noise_spec_rejects_negative():
    with pytest.raises(ConfigError):
        NoiseSpec(-0.1)


def test_empirical_noise_variance():
    v = 0.1
    z = NoiseSpec(v).sample(np.random.default_rng(11), 10**6)
    assert abs(np.var(z) - v) <= 0.03 * v


def test_empirical_output_power_unit_norm_system():
    rng = np.random.default_rng(12)
    fir = generate_sparse_fir(32, 3, rng)
    x = white_input(rng, 10**6 + 31)
    y = np.convolve(x, fir.weights, mode="valid")
    assert abs(np.mean(y**2) - 1.0) <= 0.03
