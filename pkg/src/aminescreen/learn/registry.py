"""The ten classifier kinds, their hyperparameter vocabularies and grids."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .discriminant import GaussianNB, QuadraticDiscriminantAnalysis
from .ensemble import AdaBoostClassifier
from .gaussian_process import GaussianProcessClassifier
from .linear import LogisticRegression
from .neighbors import KNeighborsClassifier
from .neural import MLPClassifier
from .svm import SVC
from .tree import DecisionTreeClassifier, ExtraTreesClassifier

KINDS = {
    "DecisionTree": (DecisionTreeClassifier, ("max_depth", "max_features", "max_leaf_nodes", "min_impurity_decrease")),
    "QDA": (QuadraticDiscriminantAnalysis, ("reg_param",)),
    "GaussianNB": (GaussianNB, ("priors",)),
    "GaussianProcess": (GaussianProcessClassifier, ("kernel",)),
    "AdaBoost": (AdaBoostClassifier, ("n_estimators", "learning_rate")),
    "MLP": (MLPClassifier, ("alpha", "batch_size", "hidden_layer_sizes", "learning_rate")),
    "ExtraTrees": (ExtraTreesClassifier, ("max_depth", "n_estimators", "max_features")),
    "LogisticRegression": (LogisticRegression, ("penalty", "C", "l1_ratio")),
    "KNearestNeighbors": (KNeighborsClassifier, ("n_neighbors", "p", "weights")),
    "SupportVector": (SVC, ("kernel", "C", "gamma", "degree")),
}

# alternative names accepted for the same kinds
ALIASES = {
    "DNN": "MLP",
    "ExtraTreesClassifier": "ExtraTrees",
    "Logistic_Regression": "LogisticRegression",
    "Nearest_neighbours": "KNearestNeighbors",
    "Support_vector": "SupportVector",
}

SHORT = {
    "DecisionTree": "DT", "QDA": "QDA", "GaussianNB": "NB", "GaussianProcess": "GP",
    "AdaBoost": "AB", "MLP": "DNN", "ExtraTrees": "XT", "LogisticRegression": "LR",
    "KNearestNeighbors": "KNN", "SupportVector": "SV",
}

SEEDED = {"DecisionTree", "AdaBoost", "MLP", "ExtraTrees", "SupportVector"}

PROPERTIES = ("absorption_capacity", "observed_initial_rate")


def canonical_kind(kind: str) -> str:
    kind = ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown classifier kind {kind!r}")
    return kind


def _normalise(key, value):
    if key == "priors" and value is not None:
        return tuple(float(v) for v in value)
    if key == "hidden_layer_sizes":
        return (int(value),) if isinstance(value, (int, float)) else tuple(int(v) for v in value)
    return value


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self):
        kind = canonical_kind(self.kind)
        allowed = KINDS[kind][1]
        bad = sorted(set(self.hyperparameters) - set(allowed))
        if bad:
            raise ValueError(f"{kind} does not take {bad}; allowed: {list(allowed)}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "hyperparameters",
                           {k: _normalise(k, v) for k, v in self.hyperparameters.items()})

    def build(self, seed: int = 0):
        cls = KINDS[self.kind][0]
        params = dict(self.hyperparameters)
        if self.kind in SEEDED:
            params["random_state"] = seed
        return cls(**params)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "hyperparameters": {
            k: list(v) if isinstance(v, tuple) else v for k, v in self.hyperparameters.items()}}


def _load(name: str):
    return json.loads(resources.files("aminescreen.data").joinpath(name).read_text())


def load_grids(path=None) -> dict:
    """property -> kind -> parameter -> value list."""
    raw = _load("grids.json") if path is None else json.loads(open(path).read())
    return {prop: {canonical_kind(k): {p: [_normalise(p, v) for v in vals] for p, vals in g.items()}
                   for k, g in kinds.items()}
            for prop, kinds in raw.items() if not prop.startswith("_")}


def tuned_specs() -> dict:
    """property -> kind -> ClassifierSpec with the stored tuned values."""
    raw = _load("tuned.json")
    return {prop: {k: ClassifierSpec(k, v) for k, v in kinds.items()}
            for prop, kinds in raw.items() if not prop.startswith("_")}
