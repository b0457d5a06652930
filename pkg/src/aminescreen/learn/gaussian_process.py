"""Binary Gaussian process classification with the Laplace approximation."""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.special import expit, log_expit

from .base import BaseEstimator, ClassifierMixin, as_proba, check_array, check_is_fitted, check_X_y
from .kernels import ConstantKernel, Kernel, RBF, parse_kernel

_GH_X, _GH_W = np.polynomial.hermite_e.hermegauss(64)
_GH_W = _GH_W / _GH_W.sum()


def log_likelihood(f, y):
    """Sum of log sigmoid((2y-1) f) and its first three derivatives in f."""
    s = 2.0 * y - 1.0
    pi = expit(f)
    ll = np.sum(log_expit(s * f))
    d1 = y - pi
    d2 = -pi * (1.0 - pi)
    d3 = -pi * (1.0 - pi) * (1.0 - 2.0 * pi)
    return ll, d1, d2, d3


def log_posterior(f, K, y):
    """Unnormalised log posterior Psi(f) = log p(y|f) - 1/2 f'K^-1 f and its gradient."""
    alpha = np.linalg.solve(K, f)
    ll, d1, _, _ = log_likelihood(f, y)
    return ll - 0.5 * f @ alpha, d1 - alpha


def find_mode(K, y, f0=None, max_iter=200, tol=1e-10):
    """Newton iteration for the posterior mode (stable B = I + W^1/2 K W^1/2 form)."""
    n = len(y)
    f = np.zeros(n) if f0 is None else f0.copy()
    a = np.zeros(n)
    psi_old = -np.inf
    prev_step = np.inf
    for _ in range(max_iter):
        pi = expit(f)
        W = pi * (1.0 - pi)
        sW = np.sqrt(W)
        B = np.eye(n) + sW[:, None] * K * sW[None, :]
        L = cholesky(B, lower=True)
        b = W * f + (y - pi)
        c = cho_solve((L, True), sW * (K @ b))
        a_new = b - sW * c
        f_new = K @ a_new
        psi = -0.5 * a_new @ f_new + np.sum(log_expit((2.0 * y - 1.0) * f_new))
        if psi < psi_old - tol:
            # damped step when the full Newton step overshoots (a rounding
            # level decrease near the mode is not an overshoot)
            step = 0.5
            while step > 1e-6:
                a_try = a + step * (a_new - a)
                f_try = K @ a_try
                psi_try = -0.5 * a_try @ f_try + np.sum(log_expit((2.0 * y - 1.0) * f_try))
                if psi_try >= psi_old:
                    a_new, f_new, psi = a_try, f_try, psi_try
                    break
                step *= 0.5
            else:
                break
        step_size = np.max(np.abs(f_new - f))
        a, f = a_new, f_new
        # log|B| is not stationary at the mode, so any residual error in f
        # leaks into the evidence; iterate to rounding level (or until the
        # step stops shrinking), which costs one or two extra Newton steps
        small = step_size < 1e-12 * (1.0 + np.max(np.abs(f)))
        if psi - psi_old < tol and (small or step_size >= prev_step):
            break
        psi_old = psi
        prev_step = step_size
    return f, a


def laplace_evidence(K, dK, y, f0=None):
    """Approximate log marginal likelihood and its gradient w.r.t. log hyperparameters."""
    f, a = find_mode(K, y, f0)
    ll, d1, d2, d3 = log_likelihood(f, y)
    W = -d2
    sW = np.sqrt(W)
    n = len(y)
    B = np.eye(n) + sW[:, None] * K * sW[None, :]
    L = cholesky(B, lower=True)
    z = -0.5 * a @ f + ll - np.sum(np.log(np.diag(L)))
    if dK is None:
        return z, None, f
    R = sW[:, None] * cho_solve((L, True), np.diag(sW))
    C = solve_triangular(L, sW[:, None] * K, lower=True)
    # d(-1/2 log|B|)/df = +1/2 diag((K^-1 + W)^-1) * third derivative
    s2 = 0.5 * (np.diag(K) - np.einsum("ij,ij->j", C, C)) * d3
    grad = np.empty(dK.shape[2])
    for j in range(dK.shape[2]):
        Cj = dK[:, :, j]
        s1 = 0.5 * a @ Cj @ a - 0.5 * np.einsum("ij,ji->", R, Cj)
        b = Cj @ d1
        s3 = b - K @ (R @ b)
        grad[j] = s1 + s2 @ s3
    return z, grad, f


def _resolve_kernel(kernel) -> Kernel:
    if kernel is None:
        return ConstantKernel(1.0, "fixed") * RBF(1.0, "fixed")
    if isinstance(kernel, str):
        return parse_kernel(kernel)
    return kernel.copy()


class GaussianProcessClassifier(ClassifierMixin, BaseEstimator):
    """GP classifier with logistic link, Laplace posterior and ML-II hyperparameters.

    Kernel hyperparameters are optimised in log space with L-BFGS-B on the
    Laplace evidence (analytic gradient), starting from the given values.
    Predictive probabilities average the sigmoid over the Gaussian latent
    predictive distribution by Gauss-Hermite quadrature.  Far from the data
    the latent mean reverts to the zero prior mean, so the probability tends
    to 0.5.
    """

    def __init__(self, kernel=None, optimizer="fmin_l_bfgs_b", max_iter_predict=200):
        self.kernel = kernel
        self.optimizer = optimizer
        self.max_iter_predict = max_iter_predict

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        kernel = _resolve_kernel(self.kernel)
        yf = y.astype(float)
        warm = {"f": None}

        def objective(theta):
            k = kernel.clone_with_theta(theta)
            K, dK = k(X, eval_gradient=True)
            try:
                z, g, f = laplace_evidence(K, dK, yf, warm["f"])
            except np.linalg.LinAlgError:
                return np.inf, np.zeros_like(theta)
            warm["f"] = f
            return -z, -g

        theta0 = kernel.theta
        if self.optimizer is not None and len(theta0):
            res = minimize(objective, theta0, jac=True, method="L-BFGS-B", bounds=kernel.bounds)
            theta = res.x if np.isfinite(res.fun) else theta0
            kernel = kernel.clone_with_theta(theta)
        self.kernel_ = kernel
        K = kernel(X)
        self.log_marginal_likelihood_value_, _, f = laplace_evidence(K, None, yf)
        pi = expit(f)
        W = pi * (1.0 - pi)
        sW = np.sqrt(W)
        B = np.eye(len(y)) + sW[:, None] * K * sW[None, :]
        self.L_ = cholesky(B, lower=True)
        self.sqrt_W_ = sW
        self.f_ = f
        self.y_train_ = yf
        self.X_train_ = X
        self.n_features_in_ = X.shape[1]
        return self

    def log_marginal_likelihood(self, theta=None, eval_gradient=False):
        check_is_fitted(self, "kernel_")
        k = self.kernel_ if theta is None else self.kernel_.clone_with_theta(theta)
        if eval_gradient:
            K, dK = k(self.X_train_, eval_gradient=True)
            z, g, _ = laplace_evidence(K, dK, self.y_train_)
            return z, g
        return laplace_evidence(k(self.X_train_), None, self.y_train_)[0]

    def latent(self, X):
        """Mean and variance of the latent function at X."""
        check_is_fitted(self, "kernel_")
        X = check_array(X, self.n_features_in_)
        Ks = self.kernel_(self.X_train_, X)
        mean = Ks.T @ (self.y_train_ - expit(self.f_))
        v = solve_triangular(self.L_, self.sqrt_W_[:, None] * Ks, lower=True)
        var = np.maximum(self.kernel_.diag(X) - np.einsum("ij,ij->j", v, v), 0.0)
        return mean, var

    def predict_proba(self, X):
        mean, var = self.latent(X)
        z = mean[:, None] + np.sqrt(var)[:, None] * _GH_X[None, :]
        return as_proba(expit(z) @ _GH_W)
