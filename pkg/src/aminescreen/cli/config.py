"""Pipeline configuration with JSON round trip."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields

from ..errors import UsageError
from ..labels import CAPACITY_RATIO_THRESHOLD, RATE_THRESHOLD
from ..learn.registry import KINDS, PROPERTIES, canonical_kind

# default soft-voting members per property
DEFAULT_ENSEMBLES = {
    "absorption_capacity": ["DecisionTree", "GaussianProcess", "ExtraTrees"],
    "observed_initial_rate": ["DecisionTree", "GaussianProcess", "AdaBoost", "MLP",
                              "ExtraTrees", "LogisticRegression", "SupportVector"],
}


@dataclass
class PipelineConfig:
    seed: int = 0
    radius: int = 2
    variance_target: float = 0.95
    rate_threshold: float = RATE_THRESHOLD
    capacity_ratio_threshold: float = CAPACITY_RATIO_THRESHOLD
    grid_path: str | None = None
    calibration_path: str | None = None
    folds: int = 10
    pca_fit_on: str = "train"  # or "all" (every model-eligible row)
    kinds: list = field(default_factory=lambda: list(KINDS))
    ensembles: dict = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_ENSEMBLES.items()})
    column_map: dict = field(default_factory=dict)
    n_jobs: int = 0  # 0: one worker per CPU, at most 4
    # signal analysis
    rate_method: str = "fit"
    fit_space: str = "linearized"
    # candidate generation
    env_radius: int = 1
    water_solubility_min: float = -2.0
    pKb_max: float = 7.0
    LD50_min: float = 300.0
    strict_filters: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.folds < 2:
            raise UsageError(f"folds must be at least 2, got {self.folds}")
        if not 0 < self.variance_target <= 1:
            raise UsageError("variance_target must lie in (0, 1]")
        if not 0 <= self.radius <= 4:
            raise UsageError("radius must lie in [0, 4]")
        if not 0 <= self.env_radius <= 3:
            raise UsageError("env_radius must lie in [0, 3]")
        if self.pca_fit_on not in ("train", "all"):
            raise UsageError("pca_fit_on must be 'train' or 'all'")
        if self.rate_method not in ("fit", "slope"):
            raise UsageError("rate_method must be 'fit' or 'slope'")
        if self.fit_space not in ("linearized", "transmission"):
            raise UsageError("fit_space must be 'linearized' or 'transmission'")
        if self.rate_threshold < 0 or self.capacity_ratio_threshold < 0:
            raise UsageError("thresholds must be non-negative")
        try:
            self.kinds = [canonical_kind(k) for k in self.kinds]
            self.ensembles = {p: [canonical_kind(k) for k in v] for p, v in self.ensembles.items()}
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        unknown = set(self.ensembles) - set(PROPERTIES)
        if unknown:
            raise UsageError(f"unknown ensemble properties {sorted(unknown)}")

    def workers(self) -> int:
        return self.n_jobs if self.n_jobs > 0 else min(4, os.cpu_count() or 1)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        names = {f.name for f in fields(cls)}
        bad = sorted(set(data) - names)
        if bad:
            raise UsageError(f"unknown config keys {bad}")
        return cls(**data)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise UsageError(f"{path}: config must be a JSON object")
        return cls.from_dict(data)
