"""Modified Beer-Lambert absorbance model A = a (1 - exp(-b C^c))."""

import numpy as np

from ..errors import AbsorbanceExceedsA


def beer_lambert_forward(C, a, b, c):
    C = np.asarray(C, dtype=float)
    return a * -np.expm1(-b * np.power(np.maximum(C, 0.0), c))


def beer_lambert_invert(A, a, b, c):
    """C = (ln(1 - A/a) / -b) ** (1/c); requires 0 <= A < a."""
    A = np.asarray(A, dtype=float)
    if np.any(A >= a):
        raise AbsorbanceExceedsA(f"absorbance {float(np.max(A)):.6g} reaches the calibration limit a={a}")
    A = np.maximum(A, 0.0)
    return np.power(-np.log1p(-A / a) / b, 1.0 / c)
