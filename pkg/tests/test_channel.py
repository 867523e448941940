import math

import numpy as np
import pytest

from beamspace.channel import (PathParameters, array_response, devectorize,
                               generate_dataset, load_dataset, sample_paths,
                               save_dataset, synthesize_channel, vectorize)
from beamspace.errors import FormatError, TruncatedFileError


def sinc_direct(t):
    # independent of np.sinc
    return 1.0 if t == 0 else math.sin(math.pi * t) / (math.pi * t)


def test_sample_paths_count_and_ranges():
    paths = sample_paths(np.random.default_rng(0), 4)
    assert len(paths) == 4
    for p in paths:
        assert -0.5 <= p.azimuth_freq < 0.5
        assert -0.5 <= p.elevation_freq < 0.5


def test_sample_paths_deterministic():
    a = sample_paths(np.random.default_rng(42), 6)
    b = sample_paths(np.random.default_rng(42), 6)
    assert a == b


def test_sample_paths_rejects_zero():
    with pytest.raises(ValueError):
        sample_paths(np.random.default_rng(0), 0)


def test_gain_statistics_standard_normal():
    # law-of-large-numbers check on 10^4 draws
    rng = np.random.default_rng(7)
    gains = np.array([p.gain for p in sample_paths(rng, 10_000)])
    assert abs(gains.mean()) < 0.05
    assert abs(gains.var() - 1.0) < 0.05


def test_path_parameters_validate_range():
    with pytest.raises(ValueError):
        PathParameters(1.0, 0.5, 0.0)
    with pytest.raises(ValueError):
        PathParameters(1.0, 0.0, -0.6)


def test_array_response_on_grid_is_one_hot():
    # m*az lands on grid point u_1 = -1.5+1 = -0.5, n*el on v_2 = 0.5
    m = n = 4
    az = -0.5 / m
    el = 0.5 / n
    response = array_response(az, el, m, n)
    expected = np.zeros((m, n))
    expected[1, 2] = 1.0
    np.testing.assert_allclose(response, expected, atol=1e-12)


def test_array_response_unit_frobenius_norm():
    rng = np.random.default_rng(5)
    for _ in range(20):
        az, el = rng.uniform(-0.5, 0.5, 2)
        response = array_response(az, el, 64, 64)
        assert abs(np.linalg.norm(response) - 1.0) <= 1e-12


def test_array_response_matches_direct_sinc_evaluation():
    m = n = 16
    az, el = 0.131, -0.287
    expected = np.array([[sinc_direct(p - (m - 1) / 2 - m * az)
                          * sinc_direct(q - (n - 1) / 2 - n * el)
                          for q in range(n)] for p in range(m)])
    expected /= np.linalg.norm(expected)
    np.testing.assert_allclose(array_response(az, el, m, n), expected, atol=1e-12)


def test_array_response_off_grid_spreads_energy():
    # az = el = 0 sits midway between grid points at even m, n
    response = array_response(0.0, 0.0, 64, 64)
    assert np.max(np.abs(response)) < 0.9
    col_energy = np.sort(np.sum(response**2, axis=0))[::-1]
    row_energy = np.sort(np.sum(response**2, axis=1))[::-1]
    assert col_energy[1] > 0.1 and row_energy[1] > 0.1


def test_array_response_rejects_out_of_range():
    with pytest.raises(ValueError):
        array_response(0.5, 0.0, 8, 8)
    with pytest.raises(ValueError):
        array_response(0.0, -0.51, 8, 8)


def test_synthesize_single_on_grid_path_norm():
    m = n = 64
    path = PathParameters(1.0, -0.5 / m, 0.5 / n)
    image = synthesize_channel([path], m, n)
    assert np.linalg.norm(image) == pytest.approx(64.0, abs=1e-10)


def test_synthesize_opposite_gains_cancel():
    p = PathParameters(1.0, 0.2, -0.3)
    q = PathParameters(-1.0, 0.2, -0.3)
    image = synthesize_channel([p, q], 16, 16)
    np.testing.assert_allclose(image, 0.0, atol=1e-12)


def test_synthesize_rejects_empty():
    with pytest.raises(ValueError):
        synthesize_channel([], 8, 8)


def test_synthesize_additive_in_paths():
    # without the 1/sqrt(P) factor the superposition is linear
    rng = np.random.default_rng(3)
    a = sample_paths(rng, 2)
    b = sample_paths(rng, 3)
    m = n = 16
    combined = synthesize_channel(a + b, m, n) / np.sqrt(m * n / 5)
    parts = (synthesize_channel(a, m, n) / np.sqrt(m * n / 2)
             + synthesize_channel(b, m, n) / np.sqrt(m * n / 3))
    np.testing.assert_allclose(combined, parts, atol=1e-12)


def test_ensemble_energy_near_unit_per_entry():
    # Monte-Carlo over the path distributions
    rng = np.random.default_rng(11)
    energies = []
    for _ in range(1000):
        image = synthesize_channel(sample_paths(rng, 4), 64, 64)
        energies.append(np.sum(image**2) / (64 * 64))
    assert 0.8 <= np.mean(energies) <= 1.2


def test_vectorize_column_major():
    image = np.array([[1.0, 3.0], [2.0, 4.0]])
    np.testing.assert_array_equal(vectorize(image), [1.0, 2.0, 3.0, 4.0])


def test_vectorize_round_trip_and_norm():
    rng = np.random.default_rng(2)
    image = rng.standard_normal((5, 7))
    vec = vectorize(image)
    assert np.linalg.norm(vec) == np.linalg.norm(image)
    np.testing.assert_array_equal(devectorize(vec, 5, 7), image)


def test_devectorize_rejects_length_mismatch():
    with pytest.raises(ValueError):
        devectorize(np.zeros(10), 3, 4)


def test_generate_dataset_deterministic(tmp_path):
    a = generate_dataset(4, 4, 16, 16, seed=123)
    b = generate_dataset(4, 4, 16, 16, seed=123)
    np.testing.assert_array_equal(a.samples, b.samples)
    pa, pb = tmp_path / "a.bchd", tmp_path / "b.bchd"
    save_dataset(a, pa)
    save_dataset(b, pb)
    assert pa.read_bytes() == pb.read_bytes()


def test_dataset_round_trip_bit_exact(tmp_path):
    dataset = generate_dataset(1, 4, 32, 16, seed=9)
    path = tmp_path / "one.bchd"
    save_dataset(dataset, path)
    loaded = load_dataset(path)
    assert (loaded.m, loaded.n, loaded.count, loaded.seed) == (32, 16, 1, 9)
    np.testing.assert_array_equal(loaded.samples, dataset.samples)


def test_dataset_seeds_differ():
    a = generate_dataset(2, 4, 16, 16, seed=0)
    b = generate_dataset(2, 4, 16, 16, seed=1)
    assert not np.array_equal(a.samples[0], b.samples[0])


def test_generate_dataset_rejects_zero_count():
    with pytest.raises(ValueError):
        generate_dataset(0, 4, 8, 8, seed=0)


def test_dataset_byte_layout(tmp_path):
    # little-endian header: magic, version, m, n, count, seed; then F-order f32
    dataset = generate_dataset(1, 2, 2, 3, seed=0xABCD)
    path = tmp_path / "layout.bchd"
    save_dataset(dataset, path)
    raw = path.read_bytes()
    assert raw[:4] == b"BCHD"
    assert int.from_bytes(raw[4:8], "little") == 1
    assert int.from_bytes(raw[8:12], "little") == 2
    assert int.from_bytes(raw[12:16], "little") == 3
    assert int.from_bytes(raw[16:20], "little") == 1
    assert int.from_bytes(raw[20:28], "little") == 0xABCD
    assert len(raw) == 28 + 4 * 6
    first_entry = np.frombuffer(raw[28:32], dtype="<f4")[0]
    assert first_entry == dataset.samples[0, 0, 0]


def test_load_dataset_bad_magic(tmp_path):
    path = tmp_path / "bad.bchd"
    path.write_bytes(b"XXXX" + b"\x00" * 24)
    with pytest.raises(FormatError):
        load_dataset(path)


def test_load_dataset_truncated(tmp_path):
    dataset = generate_dataset(2, 4, 16, 16, seed=0)
    path = tmp_path / "full.bchd"
    save_dataset(dataset, path)
    clipped = tmp_path / "clipped.bchd"
    clipped.write_bytes(path.read_bytes()[:-7])
    with pytest.raises(TruncatedFileError):
        load_dataset(clipped)
    header_only = tmp_path / "header.bchd"
    header_only.write_bytes(path.read_bytes()[:10])
    with pytest.raises(TruncatedFileError):
        load_dataset(header_only)
