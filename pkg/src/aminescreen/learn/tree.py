"""Gini decision trees and extremely randomised tree ensembles."""

from __future__ import annotations

import math

import numpy as np

from ._tree_core import apply_tree, build_tree
from .base import BaseEstimator, ClassifierMixin, as_proba, check_array, check_is_fitted, check_X_y

MAX_SEED = 2**31 - 1


def resolve_max_features(max_features, n_features: int) -> int:
    if max_features is None:
        return n_features
    if max_features in ("auto", "sqrt"):
        return max(1, int(math.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(math.log2(n_features)))
    if isinstance(max_features, float):
        return max(1, int(max_features * n_features))
    if isinstance(max_features, (int, np.integer)):
        return max(1, min(int(max_features), n_features))
    raise ValueError(f"invalid max_features {max_features!r}")


def _seed(random_state) -> int:
    if random_state is None:
        return 0
    if isinstance(random_state, np.random.RandomState):
        return int(random_state.randint(MAX_SEED))
    return int(random_state) % MAX_SEED


class _Tree:
    __slots__ = ("feature", "threshold", "left", "right", "value", "impurity", "weight")

    def __init__(self, arrays):
        (self.feature, self.threshold, self.left, self.right,
         self.value, self.impurity, self.weight) = arrays

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.left < 0))

    @property
    def max_depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=int)
        for node in range(self.node_count):
            if self.left[node] >= 0:
                depth[self.left[node]] = depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    def predict(self, X) -> np.ndarray:
        return apply_tree(X, self.feature, self.threshold, self.left, self.right, self.value)


def grow(X, y, w, *, max_depth=None, max_features=None, max_leaf_nodes=None,
         min_impurity_decrease=0.0, random_split=False, seed=0) -> _Tree:
    return _Tree(build_tree(
        np.ascontiguousarray(X, dtype=np.float64),
        np.ascontiguousarray(y, dtype=np.int64),
        np.ascontiguousarray(w, dtype=np.float64),
        -1 if max_depth is None else int(max_depth),
        resolve_max_features(max_features, X.shape[1]),
        0 if max_leaf_nodes is None else int(max_leaf_nodes),
        float(min_impurity_decrease),
        bool(random_split),
        int(seed),
    ))


class DecisionTreeClassifier(ClassifierMixin, BaseEstimator):
    """CART classifier with Gini impurity.

    Leaf probabilities are the weighted positive fraction of the leaf.  With
    ``max_leaf_nodes`` set, nodes are expanded best-first by impurity
    decrease; otherwise depth-first.
    """

    def __init__(self, max_depth=None, max_features=None, max_leaf_nodes=None,
                 min_impurity_decrease=0.0, random_state=0):
        self.max_depth = max_depth
        self.max_features = max_features
        self.max_leaf_nodes = max_leaf_nodes
        self.min_impurity_decrease = min_impurity_decrease
        self.random_state = random_state

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(X, y)
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        self.tree_ = grow(
            X, y, w,
            max_depth=self.max_depth,
            max_features=self.max_features,
            max_leaf_nodes=self.max_leaf_nodes,
            min_impurity_decrease=self.min_impurity_decrease,
            seed=_seed(self.random_state),
        )
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "tree_")
        X = check_array(X, self.n_features_in_)
        return as_proba(self.tree_.predict(X))


class ExtraTreesClassifier(ClassifierMixin, BaseEstimator):
    """Averaged ensemble of extremely randomised trees (no bootstrap).

    Each split draws one uniform threshold per candidate feature and keeps
    the candidate with the lowest weighted child Gini.
    """

    def __init__(self, n_estimators=100, max_depth=None, max_features="sqrt", random_state=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.max_features = max_features
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        rs = np.random.RandomState(_seed(self.random_state))
        seeds = rs.randint(MAX_SEED, size=self.n_estimators)
        w = np.ones(len(y))
        self.estimators_ = [
            grow(X, y, w, max_depth=self.max_depth, max_features=self.max_features,
                 random_split=True, seed=int(s))
            for s in seeds
        ]
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "estimators_")
        X = check_array(X, self.n_features_in_)
        p = np.mean([t.predict(X) for t in self.estimators_], axis=0)
        return as_proba(p)
