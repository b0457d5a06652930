"""Forward model: first-order uptake to synthetic NDIR channels."""

from __future__ import annotations

import warnings

import numpy as np

from .analysis import SignalWarning, gas_mol_per_cm3, transmission
from .trace import Calibration, SignalTrace


def uptake_flow(t, alpha, k_c, n_amine, cal: Calibration, background_mol=0.0, background_k=None):
    """Captured CO2 flow (cm3/s) at times t after gas reaches the sample.

    The amine takes up ``k_c (Q - q)`` with ``Q = alpha * n_amine``, limited
    by the CO2 supply: while the demand exceeds the supply every molecule is
    captured, afterwards uptake decays exponentially.  Without the limit the
    cumulative is ``Q (1 - exp(-k_c t))``.  An optional background term
    (physical dissolution in water) adds its own first-order uptake.
    """
    per_mol = 1.0 / gas_mol_per_cm3(cal)
    t = np.maximum(np.asarray(t, dtype=float), 0.0)
    supply = cal.q_sccm / 60.0 * cal.f_o  # cm3/s
    Q = alpha * n_amine * per_mol
    # time at which the kinetic demand falls to the supply
    t_sw = max(Q - supply / k_c, 0.0) / supply if Q > 0 else 0.0
    flow = np.where(t < t_sw, supply, k_c * min(Q, supply / k_c) * np.exp(-k_c * (t - t_sw)))
    if background_mol > 0:
        kb = k_c if background_k is None else background_k
        flow = flow + background_mol * per_mol * kb * np.exp(-kb * t)
    return flow


def simulate_trace(alpha, k_c, n_amine, cal: Calibration, duration, noise=0.0, *,
                   dt=1.0, reference_level=1000.0, background_mol=0.0, background_k=None,
                   seed=0) -> SignalTrace:
    """Synthetic trace for first-order uptake of ``alpha * n_amine`` mol CO2.

    Before the apparatus delay the detector sees the nitrogen-filled line
    (no CO2).  Supply-limited uptake (see ``uptake_flow``) gives a depleted
    span; alpha still round-trips but the initial rate then reflects the
    supply, not k_c.  Background uptake pushing the total above the supply
    is capped with a warning.  Noise is multiplicative Gaussian on both
    channels.
    """
    if min(k_c, duration, dt) <= 0 or alpha < 0 or n_amine <= 0 or noise < 0:
        raise ValueError("k_c, duration, dt and n_amine must be positive; alpha and noise non-negative")
    t = np.arange(0.0, duration + 0.5 * dt, dt)
    delay = 60.0 * cal.delay_min
    supply = cal.q_sccm / 60.0 * cal.f_o
    flow = uptake_flow(t - delay, alpha, k_c, n_amine, cal, background_mol, background_k)
    if np.any(flow > supply * (1 + 1e-9)):
        warnings.warn("uptake exceeds CO2 supply; capped at full absorption", SignalWarning, stacklevel=2)
    flow = np.minimum(flow, supply)
    C = cal.f_o - flow / (cal.q_sccm / 60.0)
    C[t < delay] = 0.0
    T = transmission(C, cal)
    if cal.sat_T is not None:
        # the instrument reads sat_T at the supply fraction
        T = 1.0 - (1.0 - T) * (1.0 - cal.sat_T) / (1.0 - cal.model_sat_T)
    rs = np.random.RandomState(seed)
    ref = reference_level * (1.0 + noise * rs.standard_normal(len(t)))
    sig = T * cal.zero_T * reference_level * (1.0 + noise * rs.standard_normal(len(t)))
    return SignalTrace(t, sig, ref)
