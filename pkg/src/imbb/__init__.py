"""Behavioral simulation of RRAM crossbar in-memory baseband processing.

Subpackages cover the complex-to-real mappings used to host complex
arithmetic on real-valued crossbars, a stochastic memristor device model,
differential-pair crossbar arrays with two programming schemes, the
first-passage-time latency theory, a 16-QAM MIMO-OFDM link simulation, and
an experiment CLI.
"""

from imbb.device import DeviceModel, preset, drift_params
from imbb.pipeline import FrameConfig, FrameResult, run_frame

__all__ = [
    "DeviceModel",
    "preset",
    "drift_params",
    "FrameConfig",
    "FrameResult",
    "run_frame",
]

__version__ = "0.1.0"
