"""NDIR absorption-trace analysis and its forward simulator."""

from .analysis import (
    AbsorptionResult,
    SignalFit,
    compute_absorption,
    detect_rolloff,
    fit_signal,
    normalize,
)
from .beer_lambert import beer_lambert_forward, beer_lambert_invert
from .simulate import simulate_trace
from .trace import Calibration, SignalTrace

__all__ = [
    "AbsorptionResult", "Calibration", "SignalFit", "SignalTrace", "beer_lambert_forward",
    "beer_lambert_invert", "compute_absorption", "detect_rolloff", "fit_signal", "normalize",
    "simulate_trace",
]
