import math

import pytest

from imbb.config import CONFIG_ENV, ConfigError, emit_config, parse_config
from imbb.pipeline import FrameConfig


def test_defaults_when_no_path(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    assert parse_config(None) == FrameConfig()


def test_env_var_path(tmp_path, monkeypatch):
    p = tmp_path / "cfg.toml"
    p.write_text("snr_db = 12.5\n")
    monkeypatch.setenv(CONFIG_ENV, str(p))
    assert parse_config(None).snr_db == 12.5
    # explicit path wins over the environment
    q = tmp_path / "other.toml"
    q.write_text("snr_db = 7.0\n")
    assert parse_config(q).snr_db == 7.0


def test_top_level_and_section(tmp_path):
    p = tmp_path / "cfg.toml"
    p.write_text('n_c = 64\n[frame]\nmode = "digital"\nk = 3\n')
    cfg = parse_config(p)
    assert cfg.n_c == 64
    assert cfg.mode == "digital"
    assert cfg.k == 3


def test_unknown_key_and_section(tmp_path):
    p = tmp_path / "cfg.toml"
    p.write_text("banana = 1\n")
    with pytest.raises(ConfigError):
        parse_config(p)
    p.write_text("[fruit]\nn_c = 64\n")
    with pytest.raises(ConfigError):
        parse_config(p)


def test_type_errors(tmp_path):
    p = tmp_path / "cfg.toml"
    for bad in ('n_c = "64"\n', "mode = 3\n", "flat = 1\n",
                'snr_db = "loud"\n', "k = 2.5\n"):
        p.write_text(bad)
        with pytest.raises(ConfigError):
            parse_config(p)


def test_invalid_value_wrapped(tmp_path):
    p = tmp_path / "cfg.toml"
    p.write_text("n_c = 33\n")
    with pytest.raises(ConfigError):
        parse_config(p)


def test_missing_file_and_bad_toml(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "nope.toml")
    p = tmp_path / "cfg.toml"
    p.write_text("n_c = = 3\n")
    with pytest.raises(ConfigError):
        parse_config(p)


def test_emit_round_trip(tmp_path):
    cfg = FrameConfig(n_c=64, n_t=2, n_r=3, pilots=2, symbols_per_frame=20,
                      snr_db=math.inf, mode="digital", flat=False, k=4,
                      p_stuck_on=0.01, seed=9)
    p = tmp_path / "cfg.toml"
    p.write_text(emit_config(cfg))
    assert parse_config(p) == cfg
    assert parse_config(p) is not cfg
