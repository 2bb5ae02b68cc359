"""Behavioral model of a single memristive cell.

Each write pulse moves the conductance by a deterministic step plus a
zero-mean Gaussian cycle-to-cycle term; reads add Gaussian read noise.
The continuous abstraction of the same dynamics is a drifted Wiener process
dG = mu dt + sigma dW, which is what the latency theory operates on.
"""

from dataclasses import dataclass, replace

import numpy as np

HEALTHY = 0
STUCK_ON = 1
STUCK_OFF = 2

_DEFECT_NAMES = {"healthy": HEALTHY, "stuck_on": STUCK_ON, "stuck_off": STUCK_OFF}


@dataclass(frozen=True)
class DeviceModel:
    """Memristor behavioral parameters (SI units)."""

    g_min: float          # siemens
    g_max: float          # siemens
    n_states: int         # pulses to sweep the full conductance range
    pulse_width: float    # seconds
    gamma_pot: float      # cycle-to-cycle variation, fraction of full range
    gamma_dep: float      # same, for depression pulses
    v_set: float          # volts
    v_reset: float        # volts
    v_read: float = 0.15
    v_full_reset: float = -1.5
    sigma_read: float = 1e-6  # siemens

    def __post_init__(self):
        if not (self.g_max > self.g_min >= 0):
            raise ValueError("require g_max > g_min >= 0")
        if self.n_states < 2:
            raise ValueError("n_states must be >= 2")
        if self.pulse_width <= 0:
            raise ValueError("pulse_width must be positive")
        for g in (self.gamma_pot, self.gamma_dep):
            if not (0 <= g < 1):
                raise ValueError("gamma must lie in [0, 1)")
        if self.sigma_read < 0:
            raise ValueError("sigma_read must be non-negative")

    @property
    def g_range(self) -> float:
        return self.g_max - self.g_min

    @property
    def g_step(self) -> float:
        """Mean conductance change of one write pulse."""
        return self.g_range / self.n_states

    def noiseless(self) -> "DeviceModel":
        """Copy with all stochastic terms removed (ideal-device oracle)."""
        return replace(self, gamma_pot=0.0, gamma_dep=0.0, sigma_read=0.0)


# Measured behavioral models.  Voltages for the read pulse (0.15 V) and the
# full reset (-1.5 V), and the ~1 uS read noise, are taken from the measured
# Ta/TaOx/Pt programming procedure and used for every preset.
PRESETS = {
    "ta_taox_pt": DeviceModel(
        g_min=79.93e-6, g_max=230.99e-6, n_states=256, pulse_width=10e-9,
        gamma_pot=0.0441, gamma_dep=0.0544, v_set=0.65, v_reset=-0.575,
    ),
    "fefet": DeviceModel(
        g_min=0.04e-6, g_max=1.79e-6, n_states=32, pulse_width=75e-9,
        gamma_pot=0.005, gamma_dep=0.005, v_set=3.65, v_reset=-2.95,
    ),
    "ftj_10ns": DeviceModel(
        g_min=1e-6, g_max=80e-6, n_states=256, pulse_width=10e-9,
        gamma_pot=0.0206, gamma_dep=0.0206, v_set=1.675, v_reset=-3.5,
    ),
    "ftj_630ps": DeviceModel(
        g_min=1e-6, g_max=27.5e-6, n_states=150, pulse_width=630e-12,
        gamma_pot=0.0365, gamma_dep=0.0365, v_set=4.0, v_reset=-5.0,
    ),
}


def preset(name: str) -> DeviceModel:
    """Return one of the bundled device models by name."""
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown device preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None


def drift_params(model: DeviceModel):
    """Continuous-model parameters (mu, sigma, sigma_c).

    mu is the drift in S/s, sigma the diffusion in S/sqrt(s), sigma_c the
    per-pulse cycle-to-cycle std in S.  sigma_c is taken as gamma_pot times
    the full conductance range, which matches gamma * G_max of the
    continuous theory under its G_min = 0 convention.
    """
    sigma_c = model.gamma_pot * model.g_range
    mu = model.g_range / (model.n_states * model.pulse_width)
    sigma = sigma_c / np.sqrt(model.pulse_width)
    return mu, sigma, sigma_c


@dataclass
class CellState:
    conductance: float
    defect: int = HEALTHY

    @classmethod
    def healthy(cls, conductance):
        return cls(conductance=conductance, defect=HEALTHY)


def effective_conductance(state: CellState, model: DeviceModel) -> float:
    """Conductance actually presented to the circuit, honoring defects."""
    if state.defect == STUCK_ON:
        return model.g_max
    if state.defect == STUCK_OFF:
        return model.g_min
    return state.conductance


def apply_write_pulse(state: CellState, polarity: str, model: DeviceModel,
                      rng: np.random.Generator) -> CellState:
    """One write pulse; returns the new cell state.

    polarity is 'potentiate', 'depress' or 'full_reset'.  Healthy cells move
    by +-step plus cycle-to-cycle noise and clamp to [g_min, g_max];
    full_reset deterministically pins g_min.  Defective cells never move.
    """
    if state.defect != HEALTHY:
        return state
    if polarity == "full_reset":
        return CellState(model.g_min, state.defect)
    if polarity == "potentiate":
        delta = model.g_step + model.gamma_pot * model.g_range * rng.standard_normal()
    elif polarity == "depress":
        delta = -model.g_step + model.gamma_dep * model.g_range * rng.standard_normal()
    else:
        raise ValueError(f"unknown pulse polarity {polarity!r}")
    g = min(max(state.conductance + delta, model.g_min), model.g_max)
    return CellState(g, state.defect)


def read_conductance(state: CellState, model: DeviceModel,
                     rng: np.random.Generator) -> float:
    """Noisy conductance read; defective cells report their pinned value."""
    g = effective_conductance(state, model)
    if model.sigma_read > 0:
        g = g + model.sigma_read * rng.standard_normal()
    return g


def defect_code(name: str) -> int:
    return _DEFECT_NAMES[name]
