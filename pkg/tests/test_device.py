import numpy as np
import pytest

from imbb.device import (PRESETS, CellState, DeviceModel, apply_write_pulse,
                         defect_code, drift_params, effective_conductance,
                         preset, read_conductance)


def test_preset_values():
    m = preset("ta_taox_pt")
    assert m.g_min == pytest.approx(79.93e-6)
    assert m.g_max == pytest.approx(230.99e-6)
    assert m.n_states == 256
    assert m.pulse_width == pytest.approx(10e-9)
    assert m.gamma_pot == pytest.approx(0.0441)
    assert m.gamma_dep == pytest.approx(0.0544)
    assert preset("fefet").n_states == 32
    assert preset("ftj_10ns").g_max == pytest.approx(80e-6)
    assert preset("ftj_630ps").pulse_width == pytest.approx(630e-12)
    assert set(PRESETS) == {"ta_taox_pt", "fefet", "ftj_10ns", "ftj_630ps"}


def test_preset_unknown():
    with pytest.raises(KeyError):
        preset("nope")


def test_model_validation():
    with pytest.raises(ValueError):
        DeviceModel(g_min=2e-6, g_max=1e-6, n_states=10, pulse_width=1e-8,
                    gamma_pot=0.01, gamma_dep=0.01, v_set=1, v_reset=-1)
    with pytest.raises(ValueError):
        DeviceModel(g_min=1e-6, g_max=2e-6, n_states=1, pulse_width=1e-8,
                    gamma_pot=0.01, gamma_dep=0.01, v_set=1, v_reset=-1)
    with pytest.raises(ValueError):
        DeviceModel(g_min=1e-6, g_max=2e-6, n_states=10, pulse_width=1e-8,
                    gamma_pot=1.5, gamma_dep=0.01, v_set=1, v_reset=-1)


def test_drift_params():
    m = preset("ta_taox_pt")
    mu, sigma, sigma_c = drift_params(m)
    assert sigma_c == pytest.approx(0.0441 * m.g_range)
    assert mu == pytest.approx(m.g_range / (256 * 10e-9))
    assert sigma == pytest.approx(sigma_c / np.sqrt(10e-9))


def test_pulse_statistics():
    m = preset("ta_taox_pt")
    rng = np.random.default_rng(0)
    deltas = []
    for _ in range(4000):
        c = CellState((m.g_min + m.g_max) / 2)
        c2 = apply_write_pulse(c, "potentiate", m, rng)
        deltas.append(c2.conductance - c.conductance)
    deltas = np.array(deltas)
    assert abs(deltas.mean() - m.g_step) < 0.05 * m.gamma_pot * m.g_range
    assert abs(deltas.std() - m.gamma_pot * m.g_range) < 0.05 * m.gamma_pot * m.g_range


def test_clamp_and_reset():
    m = preset("ta_taox_pt")
    rng = np.random.default_rng(1)
    c = CellState(m.g_max)
    for _ in range(20):
        c = apply_write_pulse(c, "potentiate", m, rng)
        assert m.g_min <= c.conductance <= m.g_max
    c = apply_write_pulse(c, "full_reset", m, rng)
    assert c.conductance == m.g_min
    with pytest.raises(ValueError):
        apply_write_pulse(c, "sideways", m, rng)


def test_defects_pin_and_freeze():
    m = preset("ta_taox_pt")
    rng = np.random.default_rng(2)
    on = CellState(1e-4, defect=defect_code("stuck_on"))
    off = CellState(1e-4, defect=defect_code("stuck_off"))
    assert effective_conductance(on, m) == m.g_max
    assert effective_conductance(off, m) == m.g_min
    assert apply_write_pulse(on, "potentiate", m, rng).conductance == 1e-4


def test_read_noise():
    m = preset("ta_taox_pt")
    rng = np.random.default_rng(3)
    c = CellState(1e-4)
    reads = np.array([read_conductance(c, m, rng) for _ in range(4000)])
    assert abs(reads.mean() - 1e-4) < 1e-7
    assert abs(reads.std() - m.sigma_read) < 0.1 * m.sigma_read
    mn = m.noiseless()
    assert read_conductance(c, mn, rng) == 1e-4
    assert mn.gamma_pot == 0 and mn.sigma_read == 0
