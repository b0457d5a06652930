"""Stratified cross-validation and exhaustive grid search."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError
from .base import check_X_y, clone


class FoldsExceedClassCount(UserWarning):
    """Requested folds exceed the minority-class count; folds were reduced."""


class StratifiedKFold:
    """K folds preserving class proportions; each class is dealt round-robin.

    With ``shuffle`` the within-class order is permuted by a generator seeded
    from ``random_state`` before dealing.
    """

    def __init__(self, n_splits=10, shuffle=True, random_state=0):
        if n_splits < 2:
            raise UsageError(f"need at least 2 folds, got {n_splits}")
        self.n_splits = n_splits
        self.shuffle = shuffle
        self.random_state = random_state

    def fold_ids(self, y) -> np.ndarray:
        y = np.asarray(y)
        rs = np.random.RandomState(self.random_state)
        fold = np.empty(len(y), dtype=int)
        offset = 0
        for c in np.unique(y):
            idx = np.flatnonzero(y == c)
            if self.shuffle:
                idx = idx[rs.permutation(len(idx))]
            fold[idx] = (np.arange(len(idx)) + offset) % self.n_splits
            offset += len(idx)
        return fold

    def split(self, X, y):
        fold = self.fold_ids(y)
        for k in range(self.n_splits):
            yield np.flatnonzero(fold != k), np.flatnonzero(fold == k)


def effective_folds(y, folds: int) -> int:
    if folds < 2:
        raise UsageError(f"need at least 2 folds, got {folds}")
    minority = int(np.bincount(np.asarray(y).astype(int), minlength=2).min())
    if minority < 2:
        raise UsageError("cross-validation needs at least 2 samples of each class")
    if folds > minority:
        warnings.warn(f"{folds} folds exceed the minority class count {minority}; using {minority}",
                      FoldsExceedClassCount, stacklevel=3)
        return minority
    return folds


def expand_grid(grid: dict) -> list[dict]:
    """Cartesian product in listed order: the first key varies slowest."""
    keys = list(grid)
    values = [list(grid[k]) for k in keys]
    return [dict(zip(keys, combo)) for combo in itertools.product(*values)]


def cross_val_accuracy(estimator, X, y, cv: StratifiedKFold) -> np.ndarray:
    scores = []
    for tr, te in cv.split(X, y):
        model = clone(estimator).fit(X[tr], y[tr])
        scores.append(model.score(X[te], y[te]))
    return np.array(scores)


@dataclass
class GridSearchResult:
    best_params: dict
    best_score: float
    best_index: int
    candidates: list = field(default_factory=list)  # (params, mean, std)


def grid_search_cv(estimator, grid: dict, X, y, folds: int = 10, seed: int = 0) -> GridSearchResult:
    """Pick the grid point with the highest mean validation accuracy.

    Every candidate sees the same stratified folds.  Ties go to the point
    listed first.  A candidate whose fit raises ``ValueError`` scores -inf.
    """
    X, y = check_X_y(X, y)
    if isinstance(grid, dict):
        points = expand_grid(grid)
    else:
        points = [p for g in grid for p in expand_grid(g)]
    if not points:
        raise UsageError("empty hyperparameter grid")
    cv = StratifiedKFold(effective_folds(y, folds), shuffle=True, random_state=seed)
    best, best_score = 0, -np.inf
    candidates = []
    for i, params in enumerate(points):
        est = clone(estimator).set_params(**params)
        try:
            scores = cross_val_accuracy(est, X, y, cv)
            mean, std = float(scores.mean()), float(scores.std())
        except (ValueError, np.linalg.LinAlgError):
            mean, std = -np.inf, float("nan")
        candidates.append((params, mean, std))
        if mean > best_score:
            best, best_score = i, mean
    return GridSearchResult(points[best], best_score, best, candidates)
