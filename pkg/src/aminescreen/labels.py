"""Binary class labels for absorption capacity and observed initial rate."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .chem.amines import AmineProfile
from .errors import NoAmine

log = logging.getLogger(__name__)

RATE_THRESHOLD = 0.0868  # mol CO2 / mol amine / s, the MEA reference
CAPACITY_RATIO_THRESHOLD = 0.8

# expected mol CO2 per mol of amine group, by capture route
CARBAMATE_CAPACITY = 0.5
CARBONATE_CAPACITY = 1.0


def _clamp(name: str, value):
    if value is None:
        return None
    value = float(value)
    if math.isnan(value):
        return None
    if value < 0:
        log.warning("negative %s %.4g clamped to 0", name, value)
        return 0.0
    return value


@dataclass(frozen=True)
class PropertyRecord:
    """Measured properties; negative readings clamp to zero with a warning."""

    absorption_capacity: float | None = None
    observed_initial_rate: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "absorption_capacity", _clamp("absorption capacity", self.absorption_capacity))
        object.__setattr__(self, "observed_initial_rate", _clamp("observed initial rate", self.observed_initial_rate))


def expected_capacity(profile: AmineProfile) -> float:
    """Count-weighted mean of 0.5 (primary, secondary) and 1.0 (tertiary, tertiary-like)."""
    carbamate = profile.n_primary + profile.n_secondary
    carbonate = profile.n_tertiary + profile.n_tertiary_like
    total = carbamate + carbonate
    if total == 0:
        raise NoAmine("no primary, secondary, tertiary or tertiary-like nitrogen")
    return (CARBAMATE_CAPACITY * carbamate + CARBONATE_CAPACITY * carbonate) / total


def label_capacity(measured: float, profile: AmineProfile,
                   ratio_threshold: float = CAPACITY_RATIO_THRESHOLD) -> int:
    """1 iff measured >= ratio_threshold * expected_capacity(profile)."""
    if measured < 0:
        raise ValueError("measured capacity must be non-negative")
    return int(measured >= ratio_threshold * expected_capacity(profile))


def label_rate(measured: float, threshold: float = RATE_THRESHOLD) -> int:
    """1 iff measured >= threshold (closed on the positive side)."""
    if measured < 0:
        raise ValueError("measured rate must be non-negative")
    return int(measured >= threshold)
