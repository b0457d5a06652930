"""Covariance functions with log-space hyperparameters and analytic gradients.

Kernels compose with ``+`` and ``*``; a bare number multiplying a kernel
becomes a :class:`ConstantKernel`.  :func:`parse_kernel` reads expressions
such as ``"1**2 * Matern(length_scale=0.6, nu=0.5) + WhiteKernel(noise_level=0.1)"``.
"""

from __future__ import annotations

import ast

import numpy as np
from scipy.spatial.distance import cdist


def _bounds(b):
    if b == "fixed":
        return None
    lo, hi = b
    return (float(lo), float(hi))


class Kernel:
    def __add__(self, other):
        return Sum(self, _as_kernel(other))

    def __radd__(self, other):
        return Sum(_as_kernel(other), self)

    def __mul__(self, other):
        return Product(self, _as_kernel(other))

    def __rmul__(self, other):
        return Product(_as_kernel(other), self)

    # subclasses: _params -> list of (attr, bounds_attr)
    _params: tuple = ()

    def _free(self):
        return [(a, b) for a, b in self._params if _bounds(getattr(self, b)) is not None]

    @property
    def theta(self) -> np.ndarray:
        return np.log([getattr(self, a) for a, _ in self._free()])

    @theta.setter
    def theta(self, value):
        for (a, _), v in zip(self._free(), value):
            setattr(self, a, float(np.exp(v)))

    @property
    def bounds(self) -> np.ndarray:
        return np.log([_bounds(getattr(self, b)) for _, b in self._free()]).reshape(-1, 2)

    def clone_with_theta(self, theta):
        k = self.copy()
        k.theta = theta
        return k

    def diag(self, X):
        return np.diag(self(X))

    def __eq__(self, other):
        return type(self) is type(other) and repr(self) == repr(other)

    def __hash__(self):
        return hash(repr(self))


def _as_kernel(x):
    if isinstance(x, Kernel):
        return x
    return ConstantKernel(float(x))


class ConstantKernel(Kernel):
    _params = (("constant_value", "constant_value_bounds"),)

    def __init__(self, constant_value=1.0, constant_value_bounds=(1e-5, 1e5)):
        self.constant_value = float(constant_value)
        self.constant_value_bounds = constant_value_bounds

    def copy(self):
        return ConstantKernel(self.constant_value, self.constant_value_bounds)

    def __call__(self, X, Y=None, eval_gradient=False):
        n = len(X)
        m = n if Y is None else len(Y)
        K = np.full((n, m), self.constant_value)
        if not eval_gradient:
            return K
        if self._free():
            return K, K[:, :, None].copy()
        return K, np.empty((n, m, 0))

    def diag(self, X):
        return np.full(len(X), self.constant_value)

    def __repr__(self):
        return f"{np.sqrt(self.constant_value):.3g}**2"


class WhiteKernel(Kernel):
    _params = (("noise_level", "noise_level_bounds"),)

    def __init__(self, noise_level=1.0, noise_level_bounds=(1e-5, 1e5)):
        self.noise_level = float(noise_level)
        self.noise_level_bounds = noise_level_bounds

    def copy(self):
        return WhiteKernel(self.noise_level, self.noise_level_bounds)

    def __call__(self, X, Y=None, eval_gradient=False):
        n = len(X)
        if Y is not None:
            K = np.zeros((n, len(Y)))
            return (K, np.zeros((n, len(Y), len(self._free())))) if eval_gradient else K
        K = self.noise_level * np.eye(n)
        if not eval_gradient:
            return K
        if self._free():
            return K, K[:, :, None].copy()
        return K, np.empty((n, n, 0))

    def diag(self, X):
        return np.full(len(X), self.noise_level)

    def __repr__(self):
        return f"WhiteKernel(noise_level={self.noise_level:.3g})"


class _Stationary(Kernel):
    _params = (("length_scale", "length_scale_bounds"),)

    def _dist(self, X, Y):
        Y = X if Y is None else Y
        return cdist(X / self.length_scale, Y / self.length_scale)

    def _profile(self, r):
        """Return (k(r), dk/dlog(length_scale))."""
        raise NotImplementedError

    def __call__(self, X, Y=None, eval_gradient=False):
        r = self._dist(np.asarray(X, float), None if Y is None else np.asarray(Y, float))
        K, dK = self._profile(r)
        if not eval_gradient:
            return K
        if self._free():
            return K, dK[:, :, None]
        return K, np.empty(K.shape + (0,))

    def diag(self, X):
        return np.ones(len(X))


class RBF(_Stationary):
    def __init__(self, length_scale=1.0, length_scale_bounds=(1e-5, 1e5)):
        self.length_scale = float(length_scale)
        self.length_scale_bounds = length_scale_bounds

    def copy(self):
        return RBF(self.length_scale, self.length_scale_bounds)

    def _profile(self, r):
        K = np.exp(-0.5 * r**2)
        return K, K * r**2

    def __repr__(self):
        return f"RBF(length_scale={self.length_scale:.3g})"


class Matern(_Stationary):
    def __init__(self, length_scale=1.0, length_scale_bounds=(1e-5, 1e5), nu=1.5):
        if nu not in (0.5, 1.5, 2.5):
            raise ValueError("Matern nu must be 0.5, 1.5 or 2.5")
        self.length_scale = float(length_scale)
        self.length_scale_bounds = length_scale_bounds
        self.nu = nu

    def copy(self):
        return Matern(self.length_scale, self.length_scale_bounds, self.nu)

    def _profile(self, r):
        if self.nu == 0.5:
            K = np.exp(-r)
            return K, K * r
        if self.nu == 1.5:
            s = np.sqrt(3.0) * r
            e = np.exp(-s)
            return (1.0 + s) * e, s * s * e
        s = np.sqrt(5.0) * r
        e = np.exp(-s)
        return (1.0 + s + s * s / 3.0) * e, s * s * (1.0 + s) * e / 3.0

    def __repr__(self):
        return f"Matern(length_scale={self.length_scale:.3g}, nu={self.nu})"


class _Binary(Kernel):
    def __init__(self, k1, k2):
        self.k1 = k1
        self.k2 = k2

    def copy(self):
        return type(self)(self.k1.copy(), self.k2.copy())

    @property
    def theta(self):
        return np.concatenate([self.k1.theta, self.k2.theta])

    @theta.setter
    def theta(self, value):
        n1 = len(self.k1.theta)
        self.k1.theta = value[:n1]
        self.k2.theta = value[n1:]

    @property
    def bounds(self):
        return np.vstack([self.k1.bounds, self.k2.bounds])


class Sum(_Binary):
    def __call__(self, X, Y=None, eval_gradient=False):
        if not eval_gradient:
            return self.k1(X, Y) + self.k2(X, Y)
        K1, G1 = self.k1(X, Y, True)
        K2, G2 = self.k2(X, Y, True)
        return K1 + K2, np.concatenate([G1, G2], axis=2)

    def diag(self, X):
        return self.k1.diag(X) + self.k2.diag(X)

    def __repr__(self):
        return f"{self.k1!r} + {self.k2!r}"


class Product(_Binary):
    def __call__(self, X, Y=None, eval_gradient=False):
        if not eval_gradient:
            return self.k1(X, Y) * self.k2(X, Y)
        K1, G1 = self.k1(X, Y, True)
        K2, G2 = self.k2(X, Y, True)
        return K1 * K2, np.concatenate([G1 * K2[:, :, None], K1[:, :, None] * G2], axis=2)

    def diag(self, X):
        return self.k1.diag(X) * self.k2.diag(X)

    def __repr__(self):
        return f"{self.k1!r} * {self.k2!r}"


_CONSTRUCTORS = {
    "Matern": Matern,
    "RBF": RBF,
    "WhiteKernel": WhiteKernel,
    "ConstantKernel": ConstantKernel,
    "C": ConstantKernel,
}


def _literal(node):
    return ast.literal_eval(node)


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_eval(node.operand)
    if isinstance(node, ast.BinOp):
        a, b = _eval(node.left), _eval(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Pow) and not isinstance(a, Kernel) and not isinstance(b, Kernel):
            return a**b
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _CONSTRUCTORS:
        args = [_literal(a) for a in node.args]
        kwargs = {kw.arg: _literal(kw.value) for kw in node.keywords}
        return _CONSTRUCTORS[node.func.id](*args, **kwargs)
    raise ValueError(f"unsupported kernel expression: {ast.unparse(node)}")


def parse_kernel(text: str) -> Kernel:
    """Build a kernel from an arithmetic expression of kernel constructors."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse kernel {text!r}: {exc}") from None
    k = _eval(tree)
    return _as_kernel(k)
