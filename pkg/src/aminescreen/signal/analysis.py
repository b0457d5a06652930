"""From raw NDIR readings to absorption capacity and observed initial rate."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import least_squares

from ..errors import NeverExceeds, NonConvergence, ZeroReference
from .beer_lambert import beer_lambert_forward, beer_lambert_invert
from .trace import Calibration, SignalTrace

R_GAS = 8.314462618  # J / (mol K)
ATM = 101325.0  # Pa
ROLLOFF_THRESHOLD = 0.005
WINDOW = 10
MAX_NFEV = 500
FIT_KINDS = ("exponential", "logistic", "linear")
# a simpler form is preferred when its RSS is within this fraction of the
# total sum of squares of the best one
PARSIMONY = 2e-3  # share of variance a curved form must add to beat a simpler one
DEPLETED_LEVEL = 0.98


class SignalWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SignalFit:
    kind: str
    params: tuple
    rss: float
    start: int
    depleted: bool = False
    fallback: bool = False

    t_start: float = -np.inf

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        F = np.clip(_MODELS[self.kind](t, *self.params), 0.0, 1.0)
        if self.depleted:
            F = np.where(t < self.t_start, 1.0, F)
        return F


@dataclass(frozen=True)
class AbsorptionResult:
    alpha: float
    initial_rate: float
    fit_kind: str
    total_mol_co2: float
    rolloff_index: int
    k_c: float = float("nan")
    flags: tuple = ()


def _exponential(t, f_inf, f_0, k, t0):
    return f_inf + (f_0 - f_inf) * np.exp(-k * (t - t0))


def _logistic(t, f_inf, f_0, k, tm):
    return f_inf + (f_0 - f_inf) * 0.5 * (1.0 - np.tanh(0.5 * k * (t - tm)))


def _linear(t, m, c0):
    return m * t + c0


_MODELS = {"exponential": _exponential, "logistic": _logistic, "linear": _linear}


def normalize(trace: SignalTrace, cal: Calibration) -> np.ndarray:
    """(signal / reference) / zero_T, clamped to (0, 1.5] with a warning."""
    if np.any(trace.ch_reference == 0):
        raise ZeroReference(f"reference channel is zero at sample {int(np.argmax(trace.ch_reference == 0))}")
    T = trace.ch_signal / trace.ch_reference / cal.zero_T
    lo, hi = 1e-12, 1.5
    if np.any(T < lo) or np.any(T > hi):
        warnings.warn(f"{int(np.sum((T < lo) | (T > hi)))} normalised samples outside (0, 1.5] clamped",
                      SignalWarning, stacklevel=2)
        T = np.clip(T, lo, hi)
    return T


def detect_rolloff(T_norm, window: int = WINDOW, threshold: float = ROLLOFF_THRESHOLD) -> int:
    """Start index of the first window whose std/mean exceeds ``threshold``."""
    T = np.asarray(T_norm, dtype=float)
    if len(T) < window:
        raise ValueError(f"series shorter than the {window}-sample window")
    w = np.lib.stride_tricks.sliding_window_view(T, window)
    ratio = w.std(axis=1) / np.abs(w.mean(axis=1))
    hits = np.flatnonzero(ratio > threshold)
    if len(hits) == 0:
        raise NeverExceeds("relative spread never exceeds the roll-off threshold")
    return int(hits[0])


def _fit(kind, t, y):
    tt = t - t[0]
    span = max(tt[-1], 1e-12)
    if kind == "linear":
        A = np.column_stack([t, np.ones_like(t)])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        return tuple(coef), float(np.sum((A @ coef - y) ** 2)), True
    f0, finf = y[0], y[-1]
    mid = 0.5 * (f0 + finf)
    cross = np.flatnonzero((y - mid) * np.sign(f0 - finf) <= 0)
    t_half = tt[cross[0]] if len(cross) else 0.5 * span
    k0 = np.log(2.0) / max(t_half, span / len(t))
    if kind == "exponential":
        p0 = [finf, f0, k0, t[0]]
        fun = lambda p: _exponential(t, p[0], p[1], p[2], t[0]) - y  # noqa: E731
        x0 = p0[:3]
    else:
        x0 = [finf, f0 + 0.1 * (f0 - finf), 2.0 * k0, t[0] + t_half]
        fun = lambda p: _logistic(t, *p) - y  # noqa: E731
    res = least_squares(fun, x0, method="lm", max_nfev=MAX_NFEV, x_scale="jac")
    p = tuple(res.x) + ((t[0],) if kind == "exponential" else ())
    return p, float(2.0 * res.cost), bool(res.success)


def fit_signal(T_norm, t, kind: str = "auto", start: int | None = None, reference=None) -> SignalFit:
    """Least-squares fit of a normalised signal from the roll-off onward.

    Forms: exponential ``F_inf + (F_0 - F_inf) exp(-k (t - t0))``, logistic
    ``F_inf + (F_0 - F_inf) / (1 + exp(k (t - t_m)))`` and linear
    ``m t + c0``; all clamped to [0, 1].  The roll-off is detected on
    ``reference`` (default: the series itself) unless ``start`` is given.
    When the span before the roll-off sits at full transmission (every CO2
    molecule absorbed) it is fixed to F = 1; otherwise the fit covers the
    whole series.  A series that never rolls off is one depleted span when
    it sits at full absorption and is fitted whole otherwise.  ``auto``
    keeps the smallest residual, preferring the simpler form on near ties.  A fit that hits the iteration cap falls back to
    linear with ``fallback`` set.
    """
    T = np.asarray(T_norm, dtype=float)
    t = np.asarray(t, dtype=float)
    if kind != "auto" and kind not in FIT_KINDS:
        raise ValueError(f"unknown fit kind {kind!r}")
    if start is None:
        try:
            start = detect_rolloff(T if reference is None else reference)
        except NeverExceeds:
            if float(np.mean(T)) >= DEPLETED_LEVEL:
                # flat at full absorption: the whole trace is the depleted span
                return SignalFit("linear", (0.0, 1.0), float(np.sum((T - 1.0) ** 2)),
                                 len(T), True, t_start=np.inf)
            # flat but partial uptake (slow amine): fit the whole series
            start = 0
    depleted = start > 0 and float(np.mean(T[:start])) >= DEPLETED_LEVEL
    if not depleted:
        start = 0
    ts, ys = t[start:], T[start:]
    if len(ts) < 3:
        return SignalFit("linear", (0.0, 1.0), 0.0, len(T), True, t_start=np.inf)
    kinds = FIT_KINDS if kind == "auto" else (kind,)
    sst = float(np.sum((ys - ys.mean()) ** 2))
    fits = {}
    fallback = False
    for k in kinds:
        params, rss, ok = _fit(k, ts, ys)
        if not ok:
            fallback = True
            if kind != "auto":
                warnings.warn(f"{k} fit did not converge; using linear", SignalWarning, stacklevel=2)
                params, rss, _ = _fit("linear", ts, ys)
                return SignalFit("linear", params, rss, start, depleted, True, ts[0])
            continue
        clipped = np.clip(_MODELS[k](ts, *params), 0.0, 1.0)
        fits[k] = (params, float(np.sum((clipped - ys) ** 2)))
    # in auto mode a failed form is only a fallback when no curved form converged
    fallback = fallback and not ({"exponential", "logistic"} & set(fits))
    best_rss = min(r for _, r in fits.values())
    # simplest form within the tolerance wins: linear, then exponential, then logistic
    for k in ("linear", "exponential", "logistic"):
        if k in fits and fits[k][1] <= best_rss + PARSIMONY * sst:
            return SignalFit(k, fits[k][0], fits[k][1], start, depleted, fallback, ts[0])
    raise NonConvergence("no fit converged")  # pragma: no cover


def _fit_cumulative(t, V, t0=0.0, V0=0.0):
    """Least squares V(t) = V0 + (V_tot - V0) (1 - exp(-k (t - t0))) for t >= t0.

    Returns (V_tot, k).  With the defaults this is the plain first-order
    cumulative ``V_tot (1 - exp(-k t))``.
    """
    sel = t >= t0
    t, V = t[sel] - t0, V[sel] - V0
    V_end = float(V[-1])
    if V_end <= 0 or len(t) < 3:
        return max(V0 + V_end, 0.0), 0.0
    half = np.flatnonzero(V >= 0.5 * V_end)
    k0 = np.log(2.0) / max(t[half[0]] if len(half) else t[-1] / 2, t[1] - t[0])
    res = least_squares(lambda p: p[0] * -np.expm1(-p[1] * t) - V, [V_end, k0],
                        bounds=([0.0, 0.0], [np.inf, np.inf]), x_scale="jac", max_nfev=5000)
    return V0 + float(res.x[0]), float(res.x[1])


def compute_absorption(trace: SignalTrace, cal: Calibration, n_amine: float, *,
                       kind: str = "auto", rate_method: str = "fit",
                       fit_space: str = "linearized") -> AbsorptionResult:
    """Absorbed CO2 per mole of amine and its initial uptake rate.

    Time is shifted by the apparatus delay.  With ``fit_space="transmission"``
    the fitted normalised transmission F gives absorbance ``A = 1 - F``, the
    outlet fraction ``C`` follows from the Beer-Lambert inversion and the
    captured fraction is ``f_o - C``.  With the default ``"linearized"`` the
    samples are first converted to outlet fractions and F is fitted to
    ``1 - C / f_o`` (equal to the transmission for a linear calibration), so
    that first-order uptake stays exponential under a curved calibration;
    the captured fraction is then ``f_o * F``.

    The captured flow is integrated (trapezoid, from the moment gas reaches
    the sample) and the cumulative curve fitted to ``V_tot (1 - exp(-k_c t))``.
    Moles follow from the ideal gas law at (P_atm, T_gas_K);
    ``initial_rate = alpha * k_c`` (``rate_method="fit"``) or the cumulative
    slope over the first window divided by the amine amount (``"slope"``).
    """
    if n_amine <= 0:
        raise ValueError("n_amine must be positive")
    if fit_space not in ("linearized", "transmission"):
        raise ValueError(f"unknown fit_space {fit_space!r}")
    if rate_method not in ("fit", "slope"):
        raise ValueError(f"unknown rate_method {rate_method!r}")
    flags = []
    t = trace.t - 60.0 * cal.delay_min
    keep = t >= 0
    if keep.sum() < WINDOW:
        raise ValueError("fewer than 10 samples after the apparatus delay")
    sub = SignalTrace(t[keep], trace.ch_signal[keep], trace.ch_reference[keep])
    T = normalize(sub, cal)
    a_max = cal.a * (1 - 1e-12)

    def outlet_fraction(transmission):
        A = 1.0 - transmission
        if cal.sat_T is not None:
            A = A * (1.0 - cal.model_sat_T) / (1.0 - cal.sat_T)
        return beer_lambert_invert(np.clip(A, 0.0, a_max), cal.a, cal.b, cal.c)

    series = T if fit_space == "transmission" else 1.0 - outlet_fraction(T) / cal.f_o
    fit = fit_signal(series, sub.t, kind, reference=T)
    if fit.fallback:
        flags.append("fit_fallback")
    times = sub.t if sub.t[0] <= 0 else np.concatenate([[0.0], sub.t])
    F = fit(times)
    if fit_space == "transmission":
        C_ab = cal.f_o - outlet_fraction(F)
    else:
        C_ab = cal.f_o * F
    if np.any(C_ab < -1e-9):
        warnings.warn("outlet CO2 above supply fraction; negative uptake clamped to 0",
                      SignalWarning, stacklevel=2)
        flags.append("negative_uptake_clamped")
    C_ab = np.maximum(C_ab, 0.0)
    flow = cal.q_sccm / 60.0 * C_ab  # cm3/s
    V = cumulative_trapezoid(flow, times, initial=0.0)
    if np.isfinite(fit.t_start) and (fit.depleted or F[0] >= DEPLETED_LEVEL):
        # supply-limited start: first-order uptake only holds after the
        # depleted span, so the cumulative is fitted from there on.  The
        # roll-off window opens up to WINDOW samples early (or at once on
        # noisy traces); anchor where the fitted curve leaves its plateau
        i0 = int(np.searchsorted(times, fit.t_start)) if fit.depleted else 0
        hi, lo = float(np.max(F[i0:])), float(F[-1])
        below = np.flatnonzero(F[i0:] < hi - 1e-2 * (hi - lo))
        if len(below):
            i0 = max(i0, i0 + int(below[0]) - 1)
        t0 = times[i0]
        V_tot, k_c = _fit_cumulative(times, V, t0, V[i0])
    else:
        t0 = 0.0
        V_tot, k_c = _fit_cumulative(times, V)
    if k_c * (times[-1] - t0) < 3.0:
        # less than 95% of the asymptote observed: V_tot is an extrapolation
        flags.append("unsaturated_cumulative")
    to_mol = gas_mol_per_cm3(cal)
    total_mol = V_tot * to_mol
    alpha = total_mol / n_amine
    if rate_method == "fit":
        rate = alpha * k_c
    else:
        m = min(WINDOW, len(times) - 1)
        rate = float(V[m] - V[0]) / (times[m] - times[0]) * to_mol / n_amine
    return AbsorptionResult(alpha, rate, fit.kind, total_mol, fit.start, k_c, tuple(flags))


def gas_mol_per_cm3(cal: Calibration) -> float:
    return cal.P_atm * ATM * 1e-6 / (R_GAS * cal.T_gas_K)


def transmission(C, cal: Calibration):
    return 1.0 - beer_lambert_forward(C, cal.a, cal.b, cal.c)
