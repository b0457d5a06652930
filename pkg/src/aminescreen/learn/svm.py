import numpy as np

from ._smo import smo
from .base import BaseEstimator, ClassifierMixin, as_proba, check_array, check_is_fitted, check_X_y
from .tree import _seed

KERNELS = ("linear", "poly", "rbf", "sigmoid")


def kernel_matrix(A, B, kernel, gamma, degree=3, coef0=0.0):
    if kernel == "linear":
        return A @ B.T
    if kernel == "poly":
        return (gamma * (A @ B.T) + coef0) ** degree
    if kernel == "rbf":
        sq = (A**2).sum(1)[:, None] + (B**2).sum(1)[None, :] - 2.0 * A @ B.T
        return np.exp(-gamma * np.maximum(sq, 0.0))
    if kernel == "sigmoid":
        return np.tanh(gamma * (A @ B.T) + coef0)
    raise ValueError(f"unknown kernel {kernel!r}")


def platt_fit(f, y, max_iter=100, min_step=1e-10, sigma=1e-12):
    """Fit P(y=1|f) = 1/(1+exp(A f + B)) by regularised Newton iteration.

    Targets are the prior-smoothed values (N+ + 1)/(N+ + 2) and
    1/(N- + 2); the line search follows Lin, Lin and Weng's robust variant.
    """
    f = np.asarray(f, dtype=float)
    y = np.asarray(y)
    n_pos = int(np.sum(y == 1))
    n_neg = len(y) - n_pos
    t = np.where(y == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
    A = 0.0
    B = np.log((n_neg + 1.0) / (n_pos + 1.0))

    def objective(A, B):
        z = f * A + B
        return np.sum(np.where(z >= 0, t * z + np.log1p(np.exp(-z)), (t - 1.0) * z + np.log1p(np.exp(z))))

    fval = objective(A, B)
    for _ in range(max_iter):
        z = f * A + B
        p = np.where(z >= 0, np.exp(-z) / (1.0 + np.exp(-z)), 1.0 / (1.0 + np.exp(z)))
        q = 1.0 - p
        d2 = p * q
        h11 = sigma + np.sum(f * f * d2)
        h22 = sigma + np.sum(d2)
        h21 = np.sum(f * d2)
        d1 = t - p
        g1 = np.sum(f * d1)
        g2 = np.sum(d1)
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= min_step:
            nA = A + step * dA
            nB = B + step * dB
            nf = objective(nA, nB)
            if nf < fval + 1e-4 * step * gd:
                A, B, fval = nA, nB, nf
                break
            step /= 2.0
        else:
            break
    return A, B


def _stratified_folds(y, k, rs):
    fold = np.empty(len(y), dtype=int)
    for c in (0, 1):
        idx = np.flatnonzero(y == c)
        idx = idx[rs.permutation(len(idx))]
        fold[idx] = np.arange(len(idx)) % k
    return fold


class SVC(ClassifierMixin, BaseEstimator):
    """C-support vector classifier with Platt-calibrated probabilities.

    The sigmoid is fitted on decision values from an internal 3-fold split
    of the training data; the final machine is refitted on all of it.
    ``gamma="scale"`` is ``1 / (n_features * X.var())`` and ``"auto"`` is
    ``1 / n_features``.
    """

    def __init__(self, C=1.0, kernel="rbf", degree=3, gamma="scale", coef0=0.0,
                 tol=1e-3, calibration_folds=3, random_state=0):
        self.C = C
        self.kernel = kernel
        self.degree = degree
        self.gamma = gamma
        self.coef0 = coef0
        self.tol = tol
        self.calibration_folds = calibration_folds
        self.random_state = random_state

    def _gamma(self, X):
        if self.gamma == "scale":
            var = X.var()
            return 1.0 / (X.shape[1] * var) if var > 0 else 1.0
        if self.gamma == "auto":
            return 1.0 / X.shape[1]
        return float(self.gamma)

    def _solve(self, X, y):
        s = np.where(y == 1, 1.0, -1.0)
        K = kernel_matrix(X, X, self.kernel, self.gamma_, self.degree, self.coef0)
        alpha, rho, n_iter = smo(np.ascontiguousarray(K), s, float(self.C), float(self.tol),
                                 max(10**6, 100 * len(y)))
        sv = alpha > 0
        return X[sv], (alpha * s)[sv], rho, n_iter

    def _decision(self, X, sv, coef, rho):
        if len(coef) == 0:
            return np.full(len(X), -rho)
        return kernel_matrix(X, sv, self.kernel, self.gamma_, self.degree, self.coef0) @ coef - rho

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.C <= 0:
            raise ValueError("C must be positive")
        self.gamma_ = self._gamma(X)
        rs = np.random.RandomState(_seed(self.random_state))
        k = min(self.calibration_folds, int(np.bincount(y).min()))
        dec = np.zeros(len(y))
        if k >= 2:
            fold = _stratified_folds(y, k, rs)
            for f in range(k):
                tr, te = fold != f, fold == f
                sv, coef, rho, _ = self._solve(X[tr], y[tr])
                dec[te] = self._decision(X[te], sv, coef, rho)
        self.support_vectors_, self.dual_coef_, self.rho_, self.n_iter_ = self._solve(X, y)
        if k < 2:
            dec = self._decision(X, self.support_vectors_, self.dual_coef_, self.rho_)
        self.probA_, self.probB_ = platt_fit(dec, y)
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "support_vectors_")
        X = check_array(X, self.n_features_in_)
        return self._decision(X, self.support_vectors_, self.dual_coef_, self.rho_)

    def predict_proba(self, X):
        z = self.decision_function(X) * self.probA_ + self.probB_
        return as_proba(np.exp(-np.logaddexp(0.0, z)))
