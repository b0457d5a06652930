"""Variance-targeted PCA on dense fingerprint matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DegenerateData
from .fragments import CountFingerprint, vectorize

FORMAT_NAME = "aminescreen.pca"
FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class PCAModel:
    mean: np.ndarray
    components: np.ndarray  # (n_components, n_features), orthonormal rows
    explained_variance: np.ndarray
    explained_variance_ratio: np.ndarray
    vocabulary: tuple[str, ...] = ()
    variance_target: float = 0.95
    radius: int = 2

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "radius": self.radius,
            "variance_target": self.variance_target,
            "vocabulary": list(self.vocabulary),
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PCAModel":
        if data.get("format") != FORMAT_NAME:
            raise ValueError("not a PCA model file")
        if data.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported PCA model version {data.get('version')}")
        n_features = len(data["mean"])
        return cls(
            mean=np.asarray(data["mean"], dtype=float),
            components=np.asarray(data["components"], dtype=float).reshape(-1, n_features),
            explained_variance=np.asarray(data["explained_variance"], dtype=float),
            explained_variance_ratio=np.asarray(data["explained_variance_ratio"], dtype=float),
            vocabulary=tuple(data["vocabulary"]),
            variance_target=float(data["variance_target"]),
            radius=int(data["radius"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "PCAModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def fit_pca(X, variance_target: float = 0.95, vocabulary=(), radius: int = 2) -> PCAModel:
    """Mean-centred SVD keeping the fewest components reaching ``variance_target``.

    Each component's sign is fixed so its largest-magnitude entry is positive.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DegenerateData("need a 2-D matrix with at least two rows")
    if not 0.0 < variance_target <= 1.0:
        raise ValueError("variance_target must lie in (0, 1]")
    mean = X.mean(axis=0)
    Xc = X - mean
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    var = s**2 / (X.shape[0] - 1)
    total = var.sum()
    if total <= 0.0 or not np.any(np.abs(Xc) > 0):
        raise DegenerateData("all rows are identical")
    ratio = var / total
    cum = np.cumsum(ratio)
    k = int(np.searchsorted(cum, variance_target - 1e-12) + 1)
    k = min(k, int(np.sum(var > total * 1e-15)) or 1, len(var))
    comps = vt[:k].copy()
    pivots = np.argmax(np.abs(comps), axis=1)
    signs = np.sign(comps[np.arange(k), pivots])
    comps *= signs[:, None]
    return PCAModel(mean, comps, var[:k], ratio[:k], tuple(vocabulary), variance_target, radius)


def project(model: PCAModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return (X - model.mean) @ model.components.T


def transform(model: PCAModel, fp: CountFingerprint) -> np.ndarray:
    """Feature vector of one fingerprint; keys outside the vocabulary are dropped."""
    row, _ = vectorize([fp], list(model.vocabulary))
    return project(model, row)[0]


def inverse_project(model: PCAModel, Z) -> np.ndarray:
    return np.atleast_2d(Z) @ model.components + model.mean
