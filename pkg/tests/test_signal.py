import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aminescreen.errors import AbsorbanceExceedsA, NeverExceeds, ZeroReference
from aminescreen.signal import (
    Calibration, SignalTrace, beer_lambert_forward, beer_lambert_invert, compute_absorption,
    detect_rolloff, fit_signal, normalize, simulate_trace,
)
from aminescreen.signal.analysis import SignalWarning, gas_mol_per_cm3
from aminescreen.signal.trace import TraceError

CAL = Calibration()
SUPPLY_MOL = CAL.q_sccm / 60.0 * CAL.f_o * gas_mol_per_cm3(CAL)  # mol CO2 / s fed
MEA_MOL = 0.200 * 1.0 * 0.30 / 61.08  # 200 uL of 30% w/w MEA


def sized(alpha, k, share=0.6):
    """Amine amount whose initial demand is ``share`` of the CO2 supply."""
    return share * SUPPLY_MOL / (alpha * k)


def trace_of(sig, ref=None, t=None):
    sig = np.asarray(sig, dtype=float)
    ref = np.ones_like(sig) if ref is None else np.asarray(ref, dtype=float)
    t = np.arange(len(sig), dtype=float) if t is None else t
    return SignalTrace(t, sig, ref)


# -- normalize ---------------------------------------------------------------

def test_normalize_equal_channels_is_one():
    tr = trace_of(np.full(20, 730.0), np.full(20, 730.0))
    np.testing.assert_array_equal(normalize(tr, CAL), 1.0)


def test_normalize_halved_signal():
    tr = trace_of(np.full(20, 500.0), np.full(20, 1000.0))
    np.testing.assert_allclose(normalize(tr, CAL), 0.5)


def test_normalize_divides_by_zero_T():
    tr = trace_of(np.full(20, 400.0), np.full(20, 1000.0))
    np.testing.assert_allclose(normalize(tr, Calibration(zero_T=0.8)), 0.5)


def test_normalize_zero_reference():
    ref = np.full(20, 1000.0)
    ref[7] = 0.0
    with pytest.raises(ZeroReference):
        normalize(trace_of(np.full(20, 500.0), ref), CAL)


def test_normalize_clamps_with_warning():
    sig = np.full(20, 1000.0)
    sig[3] = 2000.0
    with pytest.warns(SignalWarning):
        T = normalize(trace_of(sig, np.full(20, 1000.0)), CAL)
    assert T.max() == 1.5


# -- roll-off ----------------------------------------------------------------

def rolloff_oracle(T, window=10, threshold=0.005):
    for i in range(len(T) - window + 1):
        w = T[i:i + window]
        if np.std(w) / abs(np.mean(w)) > threshold:
            return i
    return None


def test_rolloff_constant_never_exceeds():
    with pytest.raises(NeverExceeds):
        detect_rolloff(np.full(100, 0.8))


def test_rolloff_step_at_50():
    T = np.where(np.arange(100) < 50, 1.0, 0.5)
    i = detect_rolloff(T)
    assert 41 <= i <= 50
    assert i == rolloff_oracle(T)


def test_rolloff_noise_at_start():
    T = 1.0 + 0.01 * np.random.RandomState(0).standard_normal(200)
    assert detect_rolloff(T) == 0


@settings(max_examples=50)
@given(st.integers(10, 90), st.floats(0.005, 0.5), st.integers(0, 2**31 - 1))
def test_rolloff_matches_direct_computation(step, drop, seed):
    rs = np.random.RandomState(seed)
    T = np.where(np.arange(100) < step, 1.0, 1.0 - drop) * (1 + 1e-4 * rs.standard_normal(100))
    expected = rolloff_oracle(T)
    if expected is None:
        with pytest.raises(NeverExceeds):
            detect_rolloff(T)
    else:
        assert detect_rolloff(T) == expected


def test_rolloff_short_series():
    with pytest.raises(ValueError):
        detect_rolloff(np.ones(5))


# -- fit_signal --------------------------------------------------------------

def test_exponential_parameters_recovered():
    t = np.arange(0.0, 300.0)
    y = 0.2 + (0.9 - 0.2) * np.exp(-0.03 * t)
    fit = fit_signal(y, t, kind="exponential", start=0)
    np.testing.assert_allclose(fit.params[:3], (0.2, 0.9, 0.03), rtol=1e-6)
    assert fit.rss < 1e-20


def test_linear_ramp_selects_linear():
    t = np.arange(0.0, 200.0)
    y = 0.9 - 0.002 * t
    fit = fit_signal(y, t, start=0)
    assert fit.kind == "linear"
    np.testing.assert_allclose(fit.params, (-0.002, 0.9), rtol=1e-9)


@pytest.mark.parametrize("kind", ["auto", "exponential", "logistic", "linear"])
def test_all_ones_fits_one(kind):
    t = np.arange(0.0, 50.0)
    fit = fit_signal(np.ones(50), t, kind=kind)
    np.testing.assert_allclose(fit(t), 1.0)
    assert fit.rss == 0.0


def test_fit_is_clamped():
    t = np.arange(0.0, 100.0)
    fit = fit_signal(1.2 - 0.02 * t, t, kind="linear", start=0)
    F = fit(np.arange(-50.0, 200.0))
    assert F.min() >= 0.0 and F.max() <= 1.0


def test_depleted_span_is_full_absorption():
    t = np.arange(0.0, 300.0)
    y = np.where(t < 80, 1.0, 0.1 + 0.9 * np.exp(-0.05 * (t - 80)))
    fit = fit_signal(y, t)
    assert fit.depleted
    np.testing.assert_array_equal(fit(t[t < fit.t_start]), 1.0)


def test_unknown_kind():
    with pytest.raises(ValueError):
        fit_signal(np.ones(20), np.arange(20.0), kind="cubic")


# -- Beer-Lambert ------------------------------------------------------------

def test_beer_lambert_zero():
    assert beer_lambert_invert(0.0, 0.9, 12.0, 1.1) == 0.0


def test_beer_lambert_round_trip_at_tenth():
    A = beer_lambert_forward(0.1, 0.9, 12.0, 1.1)
    assert abs(beer_lambert_invert(A, 0.9, 12.0, 1.1) - 0.1) < 1e-9


@settings(max_examples=200)
@given(st.floats(1e-6, 1 - 1e-6), st.floats(0.1, 1.0), st.floats(0.5, 30), st.floats(0.5, 2.0))
def test_beer_lambert_inverse_pair(u, a, b, c):
    A = u * a
    C = beer_lambert_invert(A, a, b, c)
    assert abs(beer_lambert_forward(C, a, b, c) - A) <= 1e-9
    assert abs(beer_lambert_invert(beer_lambert_forward(C, a, b, c), a, b, c) - C) <= 1e-9 * max(1.0, C)


def test_beer_lambert_limit():
    with pytest.raises(AbsorbanceExceedsA):
        beer_lambert_invert(0.9, 0.9, 12.0, 1.1)
    with pytest.raises(AbsorbanceExceedsA):
        beer_lambert_invert(np.array([0.1, 0.95]), 0.9, 12.0, 1.1)


# -- simulate / compute ------------------------------------------------------

GRID = [(a, k) for a in np.linspace(0.05, 1.2, 5) for k in np.geomspace(0.002, 0.2, 5)]


@pytest.mark.parametrize("alpha,k", GRID)
def test_round_trip_grid(alpha, k):
    n = sized(alpha, k)
    r = compute_absorption(simulate_trace(alpha, k, n, CAL, duration=10 / k + 20), CAL, n)
    assert abs(r.alpha / alpha - 1) < 0.02
    assert abs(r.initial_rate / (alpha * k) - 1) < 0.05


def test_mea_reference_rate():
    alpha, rate = 0.55, 0.0868
    k = rate / alpha
    n = sized(alpha, k)
    r = compute_absorption(simulate_trace(alpha, k, n, CAL, duration=10 / k + 30), CAL, n)
    assert abs(r.alpha / alpha - 1) < 0.02
    assert abs(r.initial_rate / rate - 1) < 0.05


def test_mea_sample_scale_capacity():
    # at 200 uL the amine outruns the CO2 supply: the trace starts depleted
    alpha, k = 0.55, 0.0868 / 0.55
    duration = alpha * MEA_MOL / SUPPLY_MOL + 200
    r = compute_absorption(simulate_trace(alpha, k, MEA_MOL, CAL, duration=duration), CAL, MEA_MOL)
    assert r.rolloff_index > 100
    assert abs(r.alpha / alpha - 1) < 0.02


def test_water_blank():
    n = MEA_MOL
    tr = simulate_trace(0.0, 0.01, n, CAL, duration=1500, background_mol=20e-6, background_k=0.01)
    r = compute_absorption(tr, CAL, n)
    assert r.total_mol_co2 <= 25e-6
    assert abs(r.total_mol_co2 - 20e-6) < 1e-6
    assert r.alpha < 0.05


def test_slow_amine_selects_linear():
    alpha, k = 0.5, 1e-4
    n = sized(alpha, k, 0.3)
    r = compute_absorption(simulate_trace(alpha, k, n, CAL, duration=1200), CAL, n)
    assert r.fit_kind == "linear"
    assert "unsaturated_cumulative" in r.flags
    assert abs(r.initial_rate / (alpha * k) - 1) < 0.05


def test_error_grows_with_noise():
    alpha, k = 0.6, 0.02
    n = sized(alpha, k)
    errs = []
    for noise in (0.0, 0.001, 0.003, 0.01, 0.03):
        e = [abs(compute_absorption(simulate_trace(alpha, k, n, CAL, 520, noise, seed=s), CAL, n).alpha / alpha - 1)
             for s in range(8)]
        errs.append(np.mean(e))
    assert np.all(np.diff(errs) > 0)


def test_resampling_invariance():
    alpha, k = 0.6, 0.02
    n = sized(alpha, k)
    totals = [compute_absorption(simulate_trace(alpha, k, n, CAL, 520, dt=dt), CAL, n).total_mol_co2
              for dt in (0.5, 1.0, 2.0)]
    assert np.ptp(totals) / np.mean(totals) < 0.005


def test_doubling_amine_doubles_total():
    alpha, k = 0.4, 0.01
    n = sized(alpha, k, 0.4)
    r1 = compute_absorption(simulate_trace(alpha, k, n, CAL, 1100), CAL, n)
    r2 = compute_absorption(simulate_trace(alpha, k, 2 * n, CAL, 1100), CAL, 2 * n)
    assert abs(r2.total_mol_co2 / r1.total_mol_co2 - 2) < 0.005
    assert abs(r2.alpha / r1.alpha - 1) < 0.005
    assert abs(r2.initial_rate / r1.initial_rate - 1) < 0.005


def test_zero_alpha_pinned_at_saturation():
    tr = simulate_trace(0.0, 0.01, 1e-3, CAL, duration=300)
    T = normalize(tr, CAL)
    after = tr.t >= 60 * CAL.delay_min
    np.testing.assert_allclose(T[after], CAL.model_sat_T, rtol=1e-12)
    np.testing.assert_array_equal(T[~after], 1.0)


def test_measured_sat_T_rescaling_round_trips():
    cal = Calibration(sat_T=0.25)
    alpha, k = 0.6, 0.02
    n = sized(alpha, k)
    r = compute_absorption(simulate_trace(alpha, k, n, cal, 520), cal, n)
    assert abs(r.alpha / alpha - 1) < 0.02


def test_slope_rate_method():
    alpha, k = 0.6, 0.002
    n = sized(alpha, k)
    r = compute_absorption(simulate_trace(alpha, k, n, CAL, 10 / k), CAL, n, rate_method="slope")
    assert abs(r.initial_rate / (alpha * k) - 1) < 0.05


def test_compute_rejects_bad_arguments():
    tr = simulate_trace(0.5, 0.01, 1e-3, CAL, 300)
    with pytest.raises(ValueError):
        compute_absorption(tr, CAL, 0.0)
    with pytest.raises(ValueError):
        compute_absorption(tr, CAL, 1e-3, fit_space="log")
    with pytest.raises(ValueError):
        compute_absorption(tr, CAL, 1e-3, rate_method="guess")


def test_simulate_rejects_bad_arguments():
    with pytest.raises(ValueError):
        simulate_trace(0.5, 0.0, 1e-3, CAL, 100)
    with pytest.raises(ValueError):
        simulate_trace(-0.1, 0.01, 1e-3, CAL, 100)


def test_simulate_is_seeded():
    a = simulate_trace(0.5, 0.01, 1e-3, CAL, 100, noise=0.01, seed=3)
    b = simulate_trace(0.5, 0.01, 1e-3, CAL, 100, noise=0.01, seed=3)
    np.testing.assert_array_equal(a.ch_signal, b.ch_signal)


# -- files -------------------------------------------------------------------

def test_trace_file_round_trip(tmp_path):
    tr = simulate_trace(0.5, 0.01, 1e-3, CAL, 100, noise=0.01)
    tr.save(tmp_path / "t.csv")
    back = SignalTrace.load(tmp_path / "t.csv")
    np.testing.assert_array_equal(back.ch_signal, tr.ch_signal)
    np.testing.assert_array_equal(back.t, tr.t)


def test_trace_file_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,a,b\n1,2,3\n")
    with pytest.raises(TraceError):
        SignalTrace.load(p)
    p.write_text("time_s,ch_4_3um,ch_3_9um\n" + "".join(f"{i},x,1\n" for i in range(12)))
    with pytest.raises(TraceError):
        SignalTrace.load(p)


def test_trace_validation():
    with pytest.raises(TraceError):
        SignalTrace(np.arange(5.0), np.ones(5), np.ones(5))
    with pytest.raises(TraceError):
        SignalTrace(np.r_[0.0, 0.0, np.arange(2.0, 12.0)], np.ones(12), np.ones(12))


def test_calibration_file_round_trip(tmp_path):
    cal = Calibration(a=0.8, b=10.0, sat_T=0.3, delay_min=0.2)
    cal.save(tmp_path / "cal.txt")
    assert Calibration.load(tmp_path / "cal.txt") == cal


def test_calibration_file_errors(tmp_path):
    p = tmp_path / "cal.txt"
    p.write_text("a=0.9\nbogus=1\n")
    with pytest.raises(ValueError):
        Calibration.load(p)
    with pytest.raises(ValueError):
        Calibration(f_o=1.5)


def test_no_warnings_on_clean_round_trip():
    n = sized(0.5, 0.02)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        compute_absorption(simulate_trace(0.5, 0.02, n, CAL, 520), CAL, n)
