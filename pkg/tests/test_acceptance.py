"""The ten acceptance criteria, each at its stated tolerance.

Every test records a PASS/FAIL line (shown in the terminal summary) before
asserting, so a red criterion is reported with its measured value.
Criteria 3 and 10 train the full default pipeline twice (several minutes
on one CPU).
"""

import csv
import random
import time
from pathlib import Path

import numpy as np
import pytest

from aminescreen.chem import parse_smiles
from aminescreen.chem.canon import canonical_key, to_smiles
from aminescreen.cli import main as cli
from aminescreen.cli.ingest import ingest
from aminescreen.fingerprint import FragmentVectorizer, VariancePCA
from aminescreen.generate import apply_rules, extract_rules
from aminescreen.labels import label_rate
from aminescreen.learn import Confusion, metrics_from_confusion
from aminescreen.learn.gaussian_process import laplace_evidence
from aminescreen.learn.kernels import parse_kernel
from aminescreen.signal import (Calibration, beer_lambert_forward, beer_lambert_invert, compute_absorption,
                                simulate_trace)
from aminescreen.signal.analysis import gas_mol_per_cm3
from conftest import record_criterion
from test_generate import family

REFERENCE = Path(__file__).parent / "data" / "reference_metrics.csv"
CAL = Calibration()
SUPPLY_MOL = CAL.q_sccm / 60.0 * CAL.f_o * gas_mol_per_cm3(CAL)


def reference_rows():
    with open(REFERENCE, newline="") as fh:
        return list(csv.DictReader(fh))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- 1, 2: reference metric rows ----------------------------------------------

def test_criterion_01_metric_tables():
    rows = reference_rows()
    bad = []
    for r in rows:
        c = Confusion(int(r["tp"]), int(r["fp"]), int(r["tn"]), int(r["fn"]))
        sizes_ok = c.tp + c.fn == int(r["n_pos"]) and c.tn + c.fp == int(r["n_neg"])
        m = metrics_from_confusion(c)
        got = [m.accuracy, m.sensitivity, m.specificity, m.roc_auc_balanced, m.mcc]
        want = [float(r[k]) for k in ("accuracy", "sensitivity", "specificity", "roc_auc", "mcc")]
        if not sizes_ok or any(round(g, 2) != w for g, w in zip(got, want)):
            bad.append(f"{r['table']}/{r['property']}/{r['model']}")
    set_sizes = {(r["n_pos"], r["n_neg"]) for r in rows if r["table"].startswith("validation")}
    ok = not bad and len(rows) == 50 and set_sizes == {("6", "5")}
    record_criterion(1, ok, f"{len(rows) - len(bad)}/{len(rows)} table rows reproduced to 2 dp {bad[:3]}")
    assert ok


def test_criterion_02_balanced_auc_identity():
    rows = reference_rows()
    worst = max(abs((float(r["sensitivity"]) + float(r["specificity"])) / 2 - float(r["roc_auc"]))
                for r in rows)
    ok = worst <= 0.005 + 1e-9
    record_criterion(2, ok, f"max |AUC - (sens+spec)/2| = {worst:.4f} over {len(rows)} rows")
    assert ok


# -- 3, 10: full default pipeline ---------------------------------------------

@pytest.fixture(scope="module")
def default_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipeline")
    timings = {}
    for name in ("a", "b"):
        out = root / name
        t0 = time.perf_counter()
        assert cli.main(["--seed", "0", "--out-dir", str(out), "train"]) == 0
        timings[name] = time.perf_counter() - t0
        assert cli.main(["--out-dir", str(out), "predict", "--bundle", str(out / "bundle.pkl")]) == 0
    return root, timings


def test_criterion_03_pipeline_reproduction(default_runs):
    root, timings = default_runs
    rows = read_csv(root / "a" / "metrics.csv")
    kinds = [r for r in rows if r["model"] != "Ensemble"]
    best = {}
    for prop in ("absorption_capacity", "observed_initial_rate"):
        ranked = sorted((r for r in kinds if r["property"] == prop),
                        key=lambda r: (-float(r["accuracy"]), -float(r["mcc"])))
        best[prop] = ranked
    acc = {p: float(v[0]["accuracy"]) for p, v in best.items()}
    top3 = best["observed_initial_rate"][:3]
    # one sample off a perfect specificity is (n_neg - 1) / n_neg
    spec_ok = [int(r["fp"]) <= 1 for r in top3]
    ok = min(acc.values()) >= 0.6 and any(spec_ok) and timings["a"] <= 600
    record_criterion(3, ok, "best validation accuracy AC {:.2f} OIR {:.2f}; OIR top-3 specificity {}; "
                     "train {:.0f} s".format(acc["absorption_capacity"], acc["observed_initial_rate"],
                                             [f"{r['model']}={float(r['specificity']):.2f}" for r in top3],
                                             timings["a"]))
    assert ok


def test_criterion_10_determinism(default_runs):
    root, _ = default_runs
    names = ["metrics.csv", "predictions.csv", "quadrants.csv"]
    same = [(root / "a" / n).read_bytes() == (root / "b" / n).read_bytes() for n in names]
    ok = all(same)
    record_criterion(10, ok, "byte-identical " + ", ".join(f"{n}={s}" for n, s in zip(names, same)))
    assert ok


# -- 4: PCA -------------------------------------------------------------------

def test_criterion_04_pca():
    res = ingest(None)
    train = [r.molecule for r in res.eligible if r.split == "train"]
    vec = FragmentVectorizer(2).fit(train)
    X = vec.transform(train)
    pca = VariancePCA(0.95).fit(X)
    V = pca.components_
    ortho = float(np.max(np.abs(V @ V.T - np.eye(len(V)))))
    ratios = pca.explained_variance_ratio_
    cum = np.cumsum(ratios)
    cum_ok = bool(np.all(np.diff(ratios) <= 1e-8) and cum[-1] >= 0.95 - 1e-8
                  and (len(cum) == 1 or cum[-2] < 0.95))
    count_ok = abs(pca.n_components_ - 21) <= 5
    ok = count_ok and ortho < 1e-8 and cum_ok
    record_criterion(4, ok, f"{pca.n_components_} components for 95% variance (target 21 +/- 5) on "
                     f"{X.shape[0]}x{X.shape[1]} train matrix; orthonormality error {ortho:.1e}; "
                     f"cumulative-ratio invariants {'hold' if cum_ok else 'broken'}")
    assert ok


# -- 5, 6: signal ---------------------------------------------------------------

def test_criterion_05_signal_round_trip():
    worst_a = worst_r = 0.0
    for alpha in np.linspace(0.05, 1.2, 5):
        for k in np.geomspace(0.002, 0.2, 5):
            n = 0.6 * SUPPLY_MOL / (alpha * k)
            r = compute_absorption(simulate_trace(alpha, k, n, CAL, duration=10 / k + 20), CAL, n)
            worst_a = max(worst_a, abs(r.alpha / alpha - 1))
            worst_r = max(worst_r, abs(r.initial_rate / (alpha * k) - 1))
    alpha, rate = 0.55, 0.0868
    k = rate / alpha
    n = 0.6 * SUPPLY_MOL / rate
    mea = compute_absorption(simulate_trace(alpha, k, n, CAL, duration=10 / k + 30), CAL, n)
    mea_a, mea_r = abs(mea.alpha / alpha - 1), abs(mea.initial_rate / rate - 1)
    C = np.linspace(1e-6, 1.0, 2001)
    A = beer_lambert_forward(C, CAL.a, CAL.b, CAL.c)
    inside = A < CAL.a
    bl = float(np.max(np.abs(beer_lambert_invert(A[inside], CAL.a, CAL.b, CAL.c) - C[inside])))
    ok = worst_a < 0.02 and worst_r < 0.05 and mea_a < 0.02 and mea_r < 0.05 and bl <= 1e-9
    record_criterion(5, ok, f"5x5 grid worst alpha {worst_a:.2%} rate {worst_r:.2%}; MEA alpha {mea_a:.2%} "
                     f"rate {mea_r:.2%}; Beer-Lambert round trip {bl:.1e}")
    assert ok


def test_criterion_06_water_blank():
    n = 0.200 * 0.30 / 61.08  # nominal amine amount of a 200 uL sample
    tr = simulate_trace(0.0, 0.01, n, CAL, duration=1500, noise=0.001, background_mol=20e-6, background_k=0.01)
    r = compute_absorption(tr, CAL, n)
    ok = r.total_mol_co2 <= 25e-6 and r.alpha < 0.05
    record_criterion(6, ok, f"water blank total {r.total_mol_co2 * 1e6:.1f} umol, alpha {r.alpha:.4f}")
    assert ok


# -- 7: thresholds --------------------------------------------------------------

def test_criterion_07_rate_threshold():
    hi, lo = label_rate(0.0868), label_rate(0.0867)
    ok = hi == 1 and lo == 0
    record_criterion(7, ok, f"label_rate(0.0868)={hi}, label_rate(0.0867)={lo}")
    assert ok


# -- 8: MMP closure -------------------------------------------------------------

def test_criterion_08_mmp_closure():
    reproduced = total = bad_parse = n_cands = 0
    for seed in range(100):
        mols = family(random.Random(seed))
        rules = extract_rules(mols)
        for a in mols:
            cands = apply_rules(a, rules)
            got = {c.key for c in cands}
            for b in mols:
                if b is not a:
                    total += 1
                    reproduced += canonical_key(b) in got
            for c in cands:
                n_cands += 1
                try:
                    again = parse_smiles(to_smiles(c.molecule))
                    again.validate()
                    bad_parse += canonical_key(again) != c.key
                except Exception:  # noqa: BLE001
                    bad_parse += 1
    ok = reproduced == total and bad_parse == 0
    record_criterion(8, ok, f"100 families: {reproduced}/{total} partners reproduced; "
                     f"{n_cands - bad_parse}/{n_cands} candidates re-parse")
    assert ok


# -- 9: GP gradient -------------------------------------------------------------

def test_criterion_09_gp_gradient():
    rs = np.random.RandomState(4)
    X = rs.standard_normal((10, 2))
    y = (X[:, 0] + 0.5 * X[:, 1] + 0.3 * rs.standard_normal(10) > 0).astype(float)
    worst = 0.0
    for spec in ["1.0 * RBF(0.8) + WhiteKernel(noise_level=0.3)", "2.0 * Matern(length_scale=1.2, nu=1.5)",
                 "1.0 * Matern(length_scale=0.6, nu=0.5) + WhiteKernel(noise_level=0.1)",
                 "1.0 * Matern(length_scale=1.0, nu=2.5)"]:
        k = parse_kernel(spec)
        theta = k.theta + 0.2
        K, dK = k.clone_with_theta(theta)(X, eval_gradient=True)
        _, g, _ = laplace_evidence(K, dK, y)
        eps = 1e-5
        fd = np.empty(len(theta))
        for j in range(len(theta)):
            e = np.zeros(len(theta))
            e[j] = eps
            zp = laplace_evidence(k.clone_with_theta(theta + e)(X), None, y)[0]
            zm = laplace_evidence(k.clone_with_theta(theta - e)(X), None, y)[0]
            fd[j] = (zp - zm) / (2 * eps)
        worst = max(worst, float(np.max(np.abs(fd - g) / np.maximum(np.abs(fd), 1e-8))))
    ok = worst < 1e-4
    record_criterion(9, ok, f"max relative error analytic vs central difference {worst:.1e} (4 kernels)")
    assert ok
