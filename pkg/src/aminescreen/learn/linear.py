import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, log_expit

from .base import BaseEstimator, ClassifierMixin, as_proba, check_array, check_is_fitted, check_X_y

PENALTIES = ("l1", "l2", "elasticnet", "none")


class LogisticRegression(ClassifierMixin, BaseEstimator):
    """Penalised logistic regression.

    Minimises ``C * sum(logloss) + (1 - r)/2 * ||w||^2 + r * ||w||_1`` with
    ``r = 1`` for l1, ``0`` for l2, ``l1_ratio`` for elasticnet and no
    penalty for "none".  The intercept is never penalised.  The L1 term is
    handled by splitting ``w = w+ - w-`` with non-negative bounds, which
    keeps the problem smooth for L-BFGS-B.
    """

    def __init__(self, penalty="l2", C=1.0, l1_ratio=None, max_iter=2000, tol=1e-8):
        self.penalty = penalty
        self.C = C
        self.l1_ratio = l1_ratio
        self.max_iter = max_iter
        self.tol = tol

    def _mix(self):
        if self.penalty == "l1":
            return 1.0, 1.0
        if self.penalty == "l2":
            return 0.0, 1.0
        if self.penalty == "elasticnet":
            if self.l1_ratio is None or not 0.0 <= self.l1_ratio <= 1.0:
                raise ValueError("elasticnet needs l1_ratio in [0, 1]")
            return float(self.l1_ratio), 1.0
        if self.penalty in ("none", None):
            return 0.0, 0.0
        raise ValueError(f"unknown penalty {self.penalty!r}")

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        r, strength = self._mix()
        n, d = X.shape
        s = 2.0 * y - 1.0
        C = float(self.C)
        l2 = (1.0 - r) * strength
        l1 = r * strength

        def unpack(z):
            if l1 > 0:
                return z[:d] - z[d:2 * d], z[-1]
            return z[:d], z[-1]

        def objective(z):
            w, b = unpack(z)
            m = s * (X @ w + b)
            loss = -C * np.sum(log_expit(m))
            g_m = -C * s * expit(-m)
            gw = X.T @ g_m + l2 * w
            gb = np.sum(g_m)
            loss += 0.5 * l2 * w @ w
            if l1 > 0:
                loss += l1 * np.sum(z[: 2 * d])
                return loss, np.concatenate([gw + l1, -gw + l1, [gb]])
            return loss, np.concatenate([gw, [gb]])

        if l1 > 0:
            z0 = np.zeros(2 * d + 1)
            bounds = [(0.0, None)] * (2 * d) + [(None, None)]
        else:
            z0 = np.zeros(d + 1)
            bounds = None
        res = minimize(objective, z0, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": self.max_iter, "ftol": self.tol * 1e-3, "gtol": self.tol})
        w, b = unpack(res.x)
        self.coef_ = w
        self.intercept_ = float(b)
        self.n_iter_ = res.nit
        self.n_features_in_ = d
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, self.n_features_in_)
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        return as_proba(expit(self.decision_function(X)))
