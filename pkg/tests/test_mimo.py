import numpy as np
import pytest

from imbb.device import preset
from imbb.mimo import (DetectionError, build_detector_bank, detect_crossbar,
                       detect_crossbar_block, detect_digital)


@pytest.fixture
def model():
    return preset("ta_taox_pt")


def _rand_channel(rng, n_r, n_t):
    return (rng.standard_normal((n_r, n_t))
            + 1j * rng.standard_normal((n_r, n_t))) / np.sqrt(2)


def test_digital_zf_inverts_noiseless():
    rng = np.random.default_rng(0)
    h = _rand_channel(rng, 6, 4)
    x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    y = h @ x
    assert np.allclose(detect_digital(h, y, 20.0, "zf"), x, atol=1e-10)
    assert np.allclose(detect_digital(h, y, np.inf, "lmmse"), x, atol=1e-10)


def test_digital_lmmse_oracle():
    rng = np.random.default_rng(1)
    h = _rand_channel(rng, 4, 4)
    y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    snr_db = 13.0
    reg = 10 ** (-snr_db / 10)
    expect = np.linalg.solve(h.conj().T @ h + reg * np.eye(4), h.conj().T @ y)
    assert np.allclose(detect_digital(h, y, snr_db, "lmmse"), expect, atol=1e-12)


def test_digital_mmse_approaches_zf_at_high_snr():
    rng = np.random.default_rng(2)
    h = _rand_channel(rng, 4, 4)
    y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    zf = detect_digital(h, y, 60.0, "zf")
    mmse = detect_digital(h, y, 60.0, "lmmse")
    assert np.abs(zf - mmse).max() < 1e-4


def test_digital_validation_and_rank():
    rng = np.random.default_rng(3)
    h = _rand_channel(rng, 4, 4)
    y = np.zeros(4, dtype=complex)
    with pytest.raises(ValueError):
        detect_digital(h, y, 10.0, "sideways")
    with pytest.raises(ValueError):
        detect_digital(h, np.zeros(3), 10.0, "zf")
    h_sing = np.ones((4, 4), dtype=complex)
    with pytest.raises(DetectionError):
        detect_digital(h_sing, y, 10.0, "zf")


def test_bank_validation(model):
    rng = np.random.default_rng(4)
    h = _rand_channel(rng, 4, 4)
    bank, _ = build_detector_bank(h, np.inf, "lmmse", model,
                                  "with_verification", 1, rng)
    assert bank.g1 == 0.0 and bank.g2 == 0.0  # falls back to ZF
    with pytest.raises(ValueError):
        build_detector_bank(h, 20.0, "sideways", model, "with_verification", 1, rng)
    with pytest.raises(ValueError):
        build_detector_bank(h[0], 20.0, "zf", model, "with_verification", 1, rng)


@pytest.mark.parametrize("mode", ["lmmse", "zf"])
def test_exact_bank_matches_digital(model, mode):
    rng = np.random.default_rng(5)
    nl = model.noiseless()
    h = _rand_channel(rng, 4, 4)
    y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    bank, rep = build_detector_bank(h, 20.0, mode, nl, "with_verification",
                                    1, rng, exact=True)
    got = detect_crossbar(bank, y, rng)
    want = detect_digital(h, y, 20.0, mode)
    assert np.allclose(got, want, atol=1e-8)
    with pytest.raises(ValueError):
        detect_crossbar(bank, np.zeros(5), rng)


def test_exact_bank_scale_invariance(model):
    # different sigma_value (so different alpha) must give the same answer
    rng = np.random.default_rng(6)
    nl = model.noiseless()
    h = _rand_channel(rng, 4, 4)
    y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    from imbb.linmap import real_map_matrix
    base = np.abs(real_map_matrix(h)).max() / 3.0
    outs = []
    for sv in (1.2 * base, 2.5 * base):
        bank, _ = build_detector_bank(h, 15.0, "lmmse", nl, "with_verification",
                                      1, rng, sigma_value=sv, exact=True)
        outs.append(detect_crossbar(bank, y, rng))
    assert np.allclose(outs[0], outs[1], atol=1e-9)


def test_block_matches_single_and_ledger(model):
    rng = np.random.default_rng(7)
    nl = model.noiseless()
    h = _rand_channel(rng, 4, 4)
    bank, _ = build_detector_bank(h, 18.0, "lmmse", nl, "with_verification",
                                  1, rng, exact=True)
    y = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    out = detect_crossbar_block(bank, y, rng)
    assert bank.left_pair.read_pulses == 6
    assert bank.right_pair.read_pulses == 6
    for j in range(6):
        assert np.allclose(out[:, j], detect_crossbar(bank, y[:, j], rng),
                           atol=1e-9)
    with pytest.raises(ValueError):
        detect_crossbar_block(bank, y[:2], rng)


def test_stochastic_bank_tracks_digital(model):
    rng = np.random.default_rng(8)
    h = _rand_channel(rng, 4, 4)
    bank, rep = build_detector_bank(h, 20.0, "lmmse", model,
                                    "with_verification", 1, rng)
    y = rng.standard_normal((4, 200)) + 1j * rng.standard_normal((4, 200))
    got = detect_crossbar_block(bank, y, rng)
    want = np.stack([detect_digital(h, y[:, j], 20.0, "lmmse")
                     for j in range(200)], axis=1)
    rel = np.linalg.norm(got - want) / np.linalg.norm(want)
    assert rel < 0.25
    assert rep.latency > 0 and rep.energy > 0


def test_k_copies_halve_read_noise_variance(model):
    rng = np.random.default_rng(9)
    h = _rand_channel(rng, 4, 4)
    y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    variances = []
    for k in (1, 2):
        bank, _ = build_detector_bank(h, 20.0, "lmmse", model,
                                      "with_verification", k, rng, exact=True)
        block = np.repeat(y[:, None], 2000, axis=1)
        out = detect_crossbar_block(bank, block, rng)
        v = out.real.var(axis=1).sum() + out.imag.var(axis=1).sum()
        variances.append(v)
    ratio = variances[0] / variances[1]
    assert 1.8 < ratio < 2.2


def test_sequential_pair_programming_latency(model):
    rng = np.random.default_rng(10)
    h = _rand_channel(rng, 4, 4)
    bank, rep = build_detector_bank(h, 20.0, "lmmse", model,
                                    "without_verification", 1, rng)
    # both pairs contribute: total exceeds any single-pair programming time
    single = bank.left_pair  # 8x8 real-mapped array
    t_one, _ = _single_pair_time(h, model, rng)
    assert rep.latency > t_one


def _single_pair_time(h, model, rng):
    from imbb.crossbar import CrossbarArray, encode_targets
    from imbb.linmap import real_map_matrix
    t = encode_targets(real_map_matrix(h), model, 1 / np.sqrt(2))
    xb = CrossbarArray(2 * h.shape[0], 2 * h.shape[1], model, k=1)
    rep = xb.program(t, "without_verification", rng)
    return rep.latency, rep.energy
