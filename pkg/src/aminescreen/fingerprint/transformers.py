"""Estimator-style wrappers: molecules -> count matrix -> PCA features."""

import numpy as np

from ..chem.molecule import Molecule
from ..chem.smiles import parse_smiles
from ..learn.base import BaseEstimator, TransformerMixin, check_array, check_is_fitted
from .fragments import fingerprint, vectorize
from .pca import fit_pca, project


def _as_molecule(m):
    return m if isinstance(m, Molecule) else parse_smiles(m)


class FragmentVectorizer(TransformerMixin, BaseEstimator):
    """Molecules (or SMILES) to fragment counts over a vocabulary frozen at fit."""

    def __init__(self, radius=2):
        self.radius = radius

    def fit(self, mols, y=None):
        fps = [fingerprint(_as_molecule(m), self.radius) for m in mols]
        _, self.vocabulary_ = vectorize(fps)
        return self

    def transform(self, mols):
        check_is_fitted(self, "vocabulary_")
        fps = [fingerprint(_as_molecule(m), self.radius) for m in mols]
        return vectorize(fps, self.vocabulary_)[0]


class VariancePCA(TransformerMixin, BaseEstimator):
    """PCA keeping the fewest components that explain ``variance_target``."""

    def __init__(self, variance_target=0.95):
        self.variance_target = variance_target

    def fit(self, X, y=None, vocabulary=(), radius=2):
        X = check_array(X)
        self.model_ = fit_pca(X, self.variance_target, vocabulary, radius)
        self.n_components_ = self.model_.n_components
        self.explained_variance_ratio_ = self.model_.explained_variance_ratio
        self.components_ = self.model_.components
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        return project(self.model_, check_array(X, self.n_features_in_))

    def inverse_transform(self, Z):
        check_is_fitted(self, "model_")
        return np.atleast_2d(Z) @ self.model_.components + self.model_.mean
