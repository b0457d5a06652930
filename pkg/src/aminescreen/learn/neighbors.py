import numpy as np

from .base import BaseEstimator, ClassifierMixin, as_proba, check_array, check_is_fitted, check_X_y


def minkowski(A, B, p):
    diff = np.abs(A[:, None, :] - B[None, :, :])
    if p == 1:
        return diff.sum(axis=2)
    if p == 2:
        return np.sqrt((diff**2).sum(axis=2))
    return (diff**p).sum(axis=2) ** (1.0 / p)


class KNeighborsClassifier(ClassifierMixin, BaseEstimator):
    """k-nearest neighbours under the Minkowski metric.

    With ``weights="distance"`` neighbours vote with weight 1/d; any
    training point at distance zero takes the whole vote.  Distance ties are
    broken by training-set order.
    """

    def __init__(self, n_neighbors=5, p=2.0, weights="uniform"):
        self.n_neighbors = n_neighbors
        self.p = p
        self.weights = weights

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if self.weights not in ("uniform", "distance"):
            raise ValueError(f"unknown weights {self.weights!r}")
        if self.p < 1:
            raise ValueError("Minkowski p must be >= 1")
        if not 1 <= self.n_neighbors <= len(y):
            raise ValueError(f"n_neighbors={self.n_neighbors} but only {len(y)} training samples")
        self.X_ = X
        self.y_ = y
        self.n_features_in_ = X.shape[1]
        return self

    def kneighbors(self, X):
        check_is_fitted(self, "X_")
        X = check_array(X, self.n_features_in_)
        d = minkowski(X, self.X_, self.p)
        idx = np.argsort(d, axis=1, kind="stable")[:, : self.n_neighbors]
        return np.take_along_axis(d, idx, axis=1), idx

    def predict_proba(self, X):
        dist, idx = self.kneighbors(X)
        labels = self.y_[idx]
        if self.weights == "uniform":
            w = np.ones_like(dist)
        else:
            with np.errstate(divide="ignore"):
                w = 1.0 / dist
            exact = dist == 0
            rows = exact.any(axis=1)
            w[rows] = exact[rows].astype(float)
        return as_proba((w * labels).sum(axis=1) / w.sum(axis=1))
