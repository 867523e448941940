import numpy as np
import pytest

from beamspace.channel import sample_paths, synthesize_channel, vectorize
from beamspace.damp import init, layer_step, noise_std_estimate, run
from beamspace.denoisers import Denoiser, SoftThresholdDenoiser
from beamspace.errors import NumericError
from beamspace.measurement import measure, sample_selection_network


class ConstantDenoiser(Denoiser):
    """Oracle that always returns a fixed vector."""

    name = "constant"

    def __init__(self, value):
        self.value = np.asarray(value, dtype=np.float64)

    def denoise(self, x, sigma_hat):
        return self.value.copy()


class ZeroDenoiser(Denoiser):
    name = "zero"

    def denoise(self, x, sigma_hat):
        return np.zeros_like(np.asarray(x, dtype=np.float64))


class LinearDenoiser(Denoiser):
    name = "linear"

    def __init__(self, c):
        self.c = c

    def denoise(self, x, sigma_hat):
        return self.c * np.asarray(x, dtype=np.float64)


class NanDenoiser(Denoiser):
    name = "nan"

    def denoise(self, x, sigma_hat):
        return np.full_like(np.asarray(x, dtype=np.float64), np.nan)


def small_instance(seed=0, k=4, m=4, n=4, sigma_n=0.0):
    rng = np.random.default_rng(seed)
    h = vectorize(synthesize_channel(sample_paths(rng, 2), m, n))
    op = sample_selection_network(k, m, n, rng)
    r = measure(op, h, sigma_n, rng)
    return h, op, r


def test_init_state():
    state = init(np.zeros(8), 64)
    assert state.sigma_hat == 0.0
    assert state.layer_index == 0
    np.testing.assert_array_equal(state.h_hat, np.zeros(64))
    # unit-row operator: sigma refers to the estimate domain, ||r|| sqrt(MN)/K
    state = init(np.ones(8), 64)
    assert state.sigma_hat == pytest.approx(np.sqrt(64 / 8))
    with pytest.raises(ValueError):
        init(np.array([]), 4)


def test_noise_std_estimate_matches_state():
    h, op, r = small_instance(sigma_n=0.1)
    state = init(r, op.mn)
    assert state.sigma_hat == noise_std_estimate(state.z, op.k, op.mn)
    state, _ = layer_step(state, op, r, SoftThresholdDenoiser(2.0),
                          np.random.default_rng(0))
    assert state.sigma_hat == noise_std_estimate(state.z, op.k, op.mn)


def test_oracle_denoiser_exact_recovery():
    h, op, r = small_instance(seed=1)
    oracle = ConstantDenoiser(h)
    state = init(r, op.mn)
    state, est = layer_step(state, op, r, oracle, np.random.default_rng(0))
    assert est.value == 0.0  # constant map has zero divergence
    np.testing.assert_array_equal(state.h_hat, h)
    np.testing.assert_allclose(state.z, 0.0, atol=1e-12)
    h_hat, traj = run(r, op, oracle, layers=10, rng=np.random.default_rng(0), truth=h)
    assert all(rec.nmse_truth == 0.0 for rec in traj.records[1:])


def test_zero_denoiser_keeps_residual():
    h, op, r = small_instance(seed=2, sigma_n=0.2)
    state = init(r, op.mn)
    state, _ = layer_step(state, op, r, ZeroDenoiser(), np.random.default_rng(0))
    np.testing.assert_array_equal(state.h_hat, np.zeros(op.mn))
    np.testing.assert_array_equal(state.z, r)


def test_linear_denoiser_hand_expansion():
    # K=4, MN=16; brute-force the one-layer update for D(x) = c x
    c = 0.25
    h, op, r = small_instance(seed=3, k=4, m=4, n=4, sigma_n=0.1)
    state = init(r, op.mn)
    new_state, est = layer_step(state, op, r, LinearDenoiser(c),
                                np.random.default_rng(7))
    b = np.random.default_rng(est.probe_seed).standard_normal(op.mn)
    assert est.value == pytest.approx(c * float(b @ b), rel=1e-8)
    x = state.h_hat + (op.mn / op.k) * op.apply_adjoint(state.z)
    expected_h = c * x
    expected_z = r - op.apply(expected_h) + (c * float(b @ b) / op.k) * state.z
    np.testing.assert_allclose(new_state.h_hat, expected_h, rtol=1e-10)
    np.testing.assert_allclose(new_state.z, expected_z, rtol=1e-8)


def test_first_layer_pseudo_data():
    # with h^0 = 0 and z^0 = r the first pseudo-data vector is (MN/K) W^T r
    c = 1.0
    h, op, r = small_instance(seed=4, sigma_n=0.3)
    h_hat, _ = run(r, op, LinearDenoiser(c), layers=1, rng=np.random.default_rng(0))
    np.testing.assert_allclose(h_hat, (op.mn / op.k) * op.apply_adjoint(r), rtol=1e-12)


def test_run_deterministic():
    h, op, r = small_instance(seed=5, k=8, m=8, n=8, sigma_n=0.2)
    den = SoftThresholdDenoiser(2.0)
    ha, ta = run(r, op, den, layers=5, rng=np.random.default_rng(11), truth=h)
    hb, tb = run(r, op, den, layers=5, rng=np.random.default_rng(11), truth=h)
    np.testing.assert_array_equal(ha, hb)
    assert ta == tb


def test_trajectory_length_and_records():
    h, op, r = small_instance(seed=6, sigma_n=0.2)
    _, traj = run(r, op, SoftThresholdDenoiser(2.0), layers=7,
                  rng=np.random.default_rng(0), truth=h)
    assert len(traj) == 8
    assert traj.records[0].divergence is None
    assert traj.records[0].nmse_truth == 1.0  # zero initial estimate
    assert traj.records[0].nmse_estimate is None  # undefined for h_hat = 0
    assert [rec.layer for rec in traj.records] == list(range(8))


def test_run_default_layer_count():
    h, op, r = small_instance(seed=10, sigma_n=0.2)
    _, traj = run(r, op, SoftThresholdDenoiser(2.0), rng=np.random.default_rng(0))
    assert len(traj) == 11


def test_sigma_hat_tracks_effective_noise():
    # sample std of x^l - h stays within 15% of sigma_hat^l (trial average)
    rng = np.random.default_rng(33)
    den = SoftThresholdDenoiser()
    ratios = []
    for _ in range(20):
        h = vectorize(synthesize_channel(sample_paths(rng, 4), 64, 64))
        op = sample_selection_network(410, 64, 64, rng)
        r = measure(op, h, 0.31623, rng)
        state = init(r, op.mn)
        for _ in range(2):
            state, _ = layer_step(state, op, r, den, rng)
        x = state.h_hat + (op.mn / op.k) * op.apply_adjoint(state.z)
        ratios.append(np.std(x - h) / state.sigma_hat)
    assert abs(np.mean(ratios) - 1.0) < 0.15


def test_run_rejects_bad_layers():
    h, op, r = small_instance(seed=7)
    with pytest.raises(ValueError):
        run(r, op, ZeroDenoiser(), layers=0, rng=np.random.default_rng(0))


def test_nonfinite_divergence_raises():
    h, op, r = small_instance(seed=8, sigma_n=0.1)
    with pytest.raises(NumericError) as exc:
        run(r, op, NanDenoiser(), layers=3, rng=np.random.default_rng(0))
    assert exc.value.layer == 0


def test_onsager_flag_changes_residual():
    h, op, r = small_instance(seed=9, k=8, m=8, n=8, sigma_n=0.2)
    den = SoftThresholdDenoiser(2.0)
    _, with_onsager = run(r, op, den, layers=3, rng=np.random.default_rng(1), truth=h)
    _, without = run(r, op, den, layers=3, rng=np.random.default_rng(1),
                     truth=h, onsager=False)
    assert with_onsager.records[-1].sigma_hat != without.records[-1].sigma_hat
