import numpy as np
import pytest

from imbb.channel import (apply_channel, awgn_var, estimate_channel,
                          export_csv, import_csv, sample_channel,
                          unitary_pilot)


def test_sample_channel_shapes_and_flat():
    rng = np.random.default_rng(0)
    ch = sample_channel(4, 6, 8, flat=True, rng=rng)
    assert ch.matrices.shape == (8, 6, 4)
    assert ch.flat
    assert np.allclose(ch.matrices, ch.matrices[0])
    ch2 = sample_channel(4, 6, 8, flat=False, rng=rng)
    assert not np.allclose(ch2.matrices[0], ch2.matrices[1])
    with pytest.raises(ValueError):
        sample_channel(0, 4, 4, True, rng)


def test_sample_channel_statistics():
    rng = np.random.default_rng(1)
    ch = sample_channel(16, 16, 200, flat=False, rng=rng)
    h = ch.matrices
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, rel=0.02)
    assert abs(h.real.mean()) < 0.01
    assert abs(h.imag.mean()) < 0.01


def test_awgn_var():
    assert awgn_var(0.0) == pytest.approx(1.0)
    assert awgn_var(10.0) == pytest.approx(0.1)
    assert awgn_var(np.inf) == 0.0


def test_apply_channel_noiseless_oracle():
    rng = np.random.default_rng(2)
    h = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    y = apply_channel(h, x, np.inf, rng)
    assert np.allclose(y, h @ x)
    with pytest.raises(ValueError):
        apply_channel(h, np.zeros(3), 10.0, rng)


def test_apply_channel_noise_statistics():
    rng = np.random.default_rng(3)
    h = np.eye(2, dtype=complex)
    x = np.zeros((2, 40000), dtype=complex)
    y = apply_channel(h, x, 10.0, rng)
    assert np.mean(np.abs(y) ** 2) == pytest.approx(0.1, rel=0.05)
    y2 = apply_channel(h, x, 10.0, rng, noise_var=0.5)
    assert np.mean(np.abs(y2) ** 2) == pytest.approx(0.5, rel=0.05)


def test_unitary_pilot():
    for n in (1, 2, 4, 8):
        p = unitary_pilot(n)
        assert np.allclose(p @ p.conj().T, np.eye(n), atol=1e-12)
    with pytest.raises(ValueError):
        unitary_pilot(0)


def test_estimate_channel_noiseless_exact():
    rng = np.random.default_rng(4)
    h = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
    p = unitary_pilot(4)
    s = h @ p
    assert np.allclose(estimate_channel(s, p), h, atol=1e-12)
    with pytest.raises(ValueError):
        estimate_channel(s, p[:, :2])


def test_estimate_channel_error_shrinks_with_snr():
    rng = np.random.default_rng(5)
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    p = unitary_pilot(4)
    errs = []
    for snr in (10.0, 30.0):
        s = apply_channel(h, p, snr, rng)
        errs.append(np.abs(estimate_channel(s, p) - h).max())
    assert errs[1] < errs[0] / 3


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    ch = sample_channel(3, 4, 5, flat=False, rng=rng)
    path = tmp_path / "ch.csv"
    export_csv(ch, path)
    ch2 = import_csv(path)
    assert np.allclose(ch.matrices, ch2.matrices)
    assert ch2.flat == ch.flat
    flat = sample_channel(2, 2, 4, flat=True, rng=rng)
    export_csv(flat, path)
    assert import_csv(path).flat
