"""Gaussian generative classifiers: QDA and naive Bayes."""

import numpy as np
from scipy.special import logsumexp

from .base import BaseEstimator, ClassifierMixin, check_array, check_is_fitted, check_X_y


def _posterior(jll):
    return np.exp(jll - logsumexp(jll, axis=1, keepdims=True))


class QuadraticDiscriminantAnalysis(ClassifierMixin, BaseEstimator):
    """Per-class Gaussian with full covariance shrunk towards the identity.

    The regularised covariance eigenvalues are ``(1 - reg_param) * s**2 +
    reg_param`` where ``s`` are the singular values of the scaled, centred
    class data.
    """

    def __init__(self, reg_param=0.0, priors=None):
        self.reg_param = reg_param
        self.priors = priors

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        counts = np.bincount(y, minlength=2)
        self.priors_ = counts / counts.sum() if self.priors is None else np.asarray(self.priors, float)
        self.means_, self.rotations_, self.scalings_ = [], [], []
        for k in (0, 1):
            Xk = X[y == k]
            mu = Xk.mean(axis=0)
            denom = max(len(Xk) - 1, 1)
            _, s, vt = np.linalg.svd((Xk - mu) / np.sqrt(denom), full_matrices=False)
            s2 = (1.0 - self.reg_param) * s**2 + self.reg_param
            self.means_.append(mu)
            self.rotations_.append(vt.T)
            self.scalings_.append(np.maximum(s2, 1e-300))
        self.n_features_in_ = X.shape[1]
        return self

    def _joint_log_likelihood(self, X):
        cols = []
        for k in (0, 1):
            R, S = self.rotations_[k], self.scalings_[k]
            Z = (X - self.means_[k]) @ R / np.sqrt(S)
            cols.append(-0.5 * (np.sum(np.log(S)) + np.sum(Z**2, axis=1)) + np.log(self.priors_[k]))
        return np.column_stack(cols)

    def predict_proba(self, X):
        check_is_fitted(self, "means_")
        X = check_array(X, self.n_features_in_)
        return _posterior(self._joint_log_likelihood(X))


class GaussianNB(ClassifierMixin, BaseEstimator):
    """Naive Bayes with per-class diagonal Gaussians.

    ``priors`` is (P(class 0), P(class 1)); None uses training frequencies.
    Variances are floored by ``var_smoothing`` times the largest feature
    variance.
    """

    def __init__(self, priors=None, var_smoothing=1e-9):
        self.priors = priors
        self.var_smoothing = var_smoothing

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        eps = self.var_smoothing * np.var(X, axis=0).max()
        self.theta_ = np.array([X[y == k].mean(axis=0) for k in (0, 1)])
        self.var_ = np.array([X[y == k].var(axis=0) for k in (0, 1)]) + eps
        if self.priors is None:
            counts = np.bincount(y, minlength=2)
            self.class_prior_ = counts / counts.sum()
        else:
            priors = np.asarray(self.priors, dtype=float)
            if priors.shape != (2,) or not np.isclose(priors.sum(), 1.0, atol=1e-6) or np.any(priors < 0):
                raise ValueError("priors must be two non-negative numbers summing to 1")
            self.class_prior_ = priors
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "theta_")
        X = check_array(X, self.n_features_in_)
        jll = np.column_stack([
            np.log(self.class_prior_[k])
            - 0.5 * np.sum(np.log(2.0 * np.pi * self.var_[k]))
            - 0.5 * np.sum((X - self.theta_[k]) ** 2 / self.var_[k], axis=1)
            for k in (0, 1)
        ])
        return _posterior(jll)
