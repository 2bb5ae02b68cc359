"""Config file handling: a TOML-compatible subset mapping onto FrameConfig.

Keys may live at the top level or under a [frame] section; unknown keys are
rejected.  An empty file yields the full defaults.  The effective config can
be emitted and re-parsed to an identical FrameConfig.
"""

import dataclasses
import math
import os

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from imbb.pipeline import FrameConfig

CONFIG_ENV = "IMBB_CONFIG"

_FIELDS = {f.name: f for f in dataclasses.fields(FrameConfig)}
_BOOL_FIELDS = {"defection_correction", "flat"}
_STR_FIELDS = {"scheme", "mode", "detector", "preset"}
_FLOAT_FIELDS = {"snr_db", "p_stuck_on", "p_stuck_off"}


class ConfigError(ValueError):
    pass


def default_config_path():
    """Config path from the environment, if set."""
    return os.environ.get(CONFIG_ENV) or None


def parse_config(path=None) -> FrameConfig:
    """Parse a config file into a FrameConfig; path=None gives defaults."""
    if path is None:
        path = default_config_path()
    if path is None:
        return FrameConfig()
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config parse error in {path}: {e}") from None

    flat = {}
    for key, val in data.items():
        if isinstance(val, dict):
            if key != "frame":
                raise ConfigError(f"unknown config section [{key}]")
            for k2, v2 in val.items():
                flat[k2] = v2
        else:
            flat[key] = val

    kwargs = {}
    for key, val in flat.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        kwargs[key] = _coerce(key, val)
    try:
        return FrameConfig(**kwargs)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _coerce(key, val):
    if key in _BOOL_FIELDS:
        if not isinstance(val, bool):
            raise ConfigError(f"config key {key!r} must be a boolean")
        return val
    if key in _STR_FIELDS:
        if not isinstance(val, str):
            raise ConfigError(f"config key {key!r} must be a string")
        return val
    if key in _FLOAT_FIELDS:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"config key {key!r} must be a number")
        return float(val)
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"config key {key!r} must be an integer")
    return val


def emit_config(cfg: FrameConfig) -> str:
    """Effective config as text; re-parsing reproduces cfg exactly."""
    lines = []
    for f in dataclasses.fields(FrameConfig):
        v = getattr(cfg, f.name)
        if isinstance(v, bool):
            s = "true" if v else "false"
        elif isinstance(v, str):
            s = f'"{v}"'
        elif isinstance(v, float):
            s = "inf" if math.isinf(v) else repr(v)
        else:
            s = repr(v)
        lines.append(f"{f.name} = {s}")
    return "\n".join(lines) + "\n"
