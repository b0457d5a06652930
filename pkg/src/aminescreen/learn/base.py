"""Estimator plumbing: parameter introspection and input validation.

The parameter protocol matches scikit-learn's (``get_params`` /
``set_params``, constructor arguments stored verbatim), so these estimators
can be cloned and dropped into scikit-learn pipelines and search utilities.
"""

from __future__ import annotations

import inspect

import numpy as np

from ..errors import (
    DimensionMismatch,
    LengthMismatch,
    NonFiniteFeature,
    NotFittedError,
    SingleClassTraining,
)


class BaseEstimator:
    @classmethod
    def _param_names(cls) -> list[str]:
        init = cls.__init__
        if init is object.__init__:
            return []
        sig = inspect.signature(init)
        return sorted(
            p.name for p in sig.parameters.values()
            if p.name != "self" and p.kind not in (p.VAR_KEYWORD, p.VAR_POSITIONAL)
        )

    def get_params(self, deep: bool = True) -> dict:
        out = {}
        for name in self._param_names():
            value = getattr(self, name)
            if deep and hasattr(value, "get_params") and not isinstance(value, type):
                for k, v in value.get_params().items():
                    out[f"{name}__{k}"] = v
            out[name] = value
        return out

    def set_params(self, **params):
        valid = self._param_names()
        nested: dict[str, dict] = {}
        for key, value in params.items():
            name, _, sub = key.partition("__")
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for {type(self).__name__}")
            if sub:
                nested.setdefault(name, {})[sub] = value
            else:
                setattr(self, name, value)
        for name, sub_params in nested.items():
            getattr(self, name).set_params(**sub_params)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params(deep=False).items())
        return f"{type(self).__name__}({args})"


class ClassifierMixin:
    """Binary classifier over labels {0, 1}.

    Subclasses implement ``predict_proba``; ``predict`` thresholds the
    positive-class column at 0.5 (inclusive), so the two never disagree.
    """

    _estimator_type = "classifier"
    classes_ = np.array([0, 1])

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))


class TransformerMixin:
    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).transform(X)


def check_array(X, n_features: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D feature matrix, got {X.ndim} dims")
    if not np.all(np.isfinite(X)):
        raise NonFiniteFeature("feature matrix contains NaN or infinity")
    if n_features is not None and X.shape[1] != n_features:
        raise DimensionMismatch(f"model was fitted on {n_features} features, got {X.shape[1]}")
    return X


def check_X_y(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = check_array(X)
    y = np.asarray(y)
    if y.ndim != 1:
        y = y.ravel()
    if len(y) != X.shape[0]:
        raise LengthMismatch(f"X has {X.shape[0]} rows but y has {len(y)} labels")
    labels = set(np.unique(y).tolist())
    if not labels <= {0, 1}:
        raise ValueError(f"labels must be 0/1, got {sorted(labels)}")
    if len(labels) < 2:
        raise SingleClassTraining("training labels contain a single class")
    return X, y.astype(int)


def check_is_fitted(est, attr: str) -> None:
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet")


def as_proba(p1: np.ndarray) -> np.ndarray:
    p1 = np.clip(np.asarray(p1, dtype=float), 0.0, 1.0)
    return np.column_stack([1.0 - p1, p1])


def clone(est):
    """Unfitted copy with identical parameters (works for foreign estimators too)."""
    params = est.get_params(deep=False)
    return type(est)(**{k: _clone_param(v) for k, v in params.items()})


def _clone_param(v):
    if hasattr(v, "get_params") and not isinstance(v, type):
        return clone(v)
    if isinstance(v, list):
        return [_clone_param(x) for x in v]
    return v
