import csv
import json
import shutil
import subprocess
from importlib import resources

import numpy as np
import pytest

from aminescreen.cli import main as cli
from aminescreen.cli.config import PipelineConfig
from aminescreen.cli.ingest import ingest
from aminescreen.cli.pipeline import assign_splits, quadrant, rank_rows
from aminescreen.errors import UsageError

SHIPPED = str(resources.files("aminescreen") / "data" / "amines.csv")
SMALL = {
    "kinds": ["DecisionTree", "GaussianNB", "KNearestNeighbors"],
    "folds": 3,
    "ensembles": {"absorption_capacity": ["DecisionTree", "GaussianNB"],
                  "observed_initial_rate": ["DecisionTree", "KNearestNeighbors"]},
}


def run(*argv):
    return cli.main([str(a) for a in argv])


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    d = tmp_path_factory.mktemp("train")
    cfg = d / "small.json"
    cfg.write_text(json.dumps(SMALL))
    assert run("--config", cfg, "--out-dir", d, "train") == 0
    return d


# -- exit codes -------------------------------------------------------------

def test_help_exits_zero(capsys):
    assert run("--help") == 0
    assert "analyze-signal" in capsys.readouterr().out


def test_unknown_subcommand_is_input_error():
    assert run("frobnicate") == 1


def test_missing_required_flag_is_input_error(tmp_path):
    assert run("--out-dir", tmp_path, "predict") == 1


def test_missing_file_is_input_error(tmp_path):
    assert run("--out-dir", tmp_path, "ingest", "--dataset", tmp_path / "nope.csv") == 1


def test_internal_error_exit_code(tmp_path, monkeypatch):
    def boom(args, cfg):
        raise RuntimeError("bug")
    monkeypatch.setattr(cli, "cmd_ingest", boom)
    assert run("--out-dir", tmp_path, "ingest") == 2


def test_console_script(tmp_path):
    exe = shutil.which("aminescreen")
    if exe is None:
        pytest.skip("package not installed")
    proc = subprocess.run([exe, "--out-dir", str(tmp_path), "ingest", "--dataset", str(tmp_path / "x.csv")],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert proc.stderr.startswith("error:")


# -- ingest -----------------------------------------------------------------

def test_ingest_shipped(tmp_path, capsys):
    assert run("--out-dir", tmp_path, "ingest") == 0
    rows = read(tmp_path / "records.csv")
    assert len(rows) == 130
    assert sum(r["eligible"] == "true" for r in rows) == 128
    assert "130 rows, 128 model-eligible" in capsys.readouterr().out


def test_ingest_empty_file(tmp_path, caplog):
    p = tmp_path / "empty.csv"
    p.write_text("")
    res = ingest(p)
    assert res.records == []
    assert "empty" in caplog.text


def test_ingest_duplicate_rejected(tmp_path):
    p = tmp_path / "dup.csv"
    p.write_text("smiles,absorption_capacity,observed_initial_rate\nNCCO,0.5,0.1\nOCCN,0.4,0.05\nNCCCN,1.0,0.2\n")
    res = ingest(p)
    assert len(res.records) == 2
    assert len(res.diagnostics) == 1
    assert res.diagnostics[0][0] == 3 and "duplicate" in res.diagnostics[0][1]


def test_ingest_collects_bad_rows(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("smiles,absorption_capacity\nNCCO,0.5\nC(C,0.1\n,0.2\nNCC,-1\n")
    res = ingest(p)
    assert [r.smiles for r in res.records][0] == "NCCO"
    assert len(res.diagnostics) >= 2


def test_column_map(tmp_path):
    p = tmp_path / "mapped.csv"
    p.write_text("SMILES,AC\nNCCO,0.5\n")
    res = ingest(p, {"SMILES": "smiles", "AC": "absorption_capacity"})
    assert res.records[0].absorption_capacity == 0.5


def test_assign_splits_shape():
    res = ingest(SHIPPED)
    for r in res.records:
        r.split = "none"
    cfg = PipelineConfig()
    assign_splits(res.records, cfg)
    eligible = [r for r in res.records if r.eligible]
    counts = {s: sum(r.split == s for r in eligible) for s in ("train", "validate", "test")}
    assert counts == {"train": 97, "validate": 11, "test": 20}
    test_labels = [r.label("observed_initial_rate", cfg.rate_threshold, cfg.capacity_ratio_threshold)
                   for r in eligible if r.split == "test"]
    assert sorted(test_labels) == [0] * 8 + [1] * 12
    again = ingest(SHIPPED)
    for r in again.records:
        r.split = "none"
    assign_splits(again.records, cfg)
    assert [r.split for r in again.records] == [r.split for r in res.records]


# -- config -----------------------------------------------------------------

def test_config_round_trip(tmp_path):
    cfg = PipelineConfig(seed=7, radius=1, kinds=["DecisionTree", "QDA"], rate_threshold=0.05)
    cfg.save(tmp_path / "c.json")
    assert PipelineConfig.load(tmp_path / "c.json") == cfg


def test_config_folds_one_rejected(tmp_path):
    with pytest.raises(UsageError):
        PipelineConfig(folds=1)
    p = tmp_path / "c.json"
    p.write_text('{"folds": 1}')
    assert run("--config", p, "--out-dir", tmp_path, "train") == 1


def test_config_unknown_key(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"colour": "blue"}')
    assert run("--config", p, "--out-dir", tmp_path, "ingest") == 1


def test_config_kind_aliases():
    assert PipelineConfig(kinds=["DecisionTree"]).kinds == ["DecisionTree"]
    with pytest.raises(UsageError):
        PipelineConfig(kinds=["NaiveBayes?"])


# -- quadrants and ranking -------------------------------------------------

@pytest.mark.parametrize("pc,pr,q", [(0.9, 0.9, "B"), (0.4, 0.6, "A"), (0.5, 0.5, "B"),
                                     (0.7, 0.2, "D"), (0.1, 0.49, "C")])
def test_quadrant(pc, pr, q):
    assert quadrant(pc, pr) == q


def test_ranking_by_joint_probability():
    rows = [{"key": k, "joint": pc * pr} for k, pc, pr in
            [("a", 0.4, 0.6), ("b", 0.9, 0.9), ("c", 0.1, 0.1), ("d", 0.6, 0.6)]]
    ranked = rank_rows(rows)
    assert [r["key"] for r in ranked] == ["b", "d", "a", "c"]
    assert [r["rank"] for r in ranked] == [1, 2, 3, 4]


# -- train / validate / predict / rank / report -----------------------------

def test_train_outputs(trained):
    rows = read(trained / "metrics.csv")
    # 3 kinds + 1 ensemble per property
    assert len(rows) == 8
    assert {r["split"] for r in rows} == {"validate"}
    assert all(r["n"] == "11" for r in rows)
    assert json.loads((trained / "config.json").read_text())["folds"] == 3


def test_validate_on_test_split(trained, tmp_path):
    assert run("--out-dir", tmp_path, "validate", "--bundle", trained / "bundle.pkl") == 0
    rows = read(tmp_path / "metrics_test.csv")
    rate = [r for r in rows if r["property"] == "observed_initial_rate"]
    assert all(int(r["tp"]) + int(r["fn"]) == 12 and int(r["tn"]) + int(r["fp"]) == 8 for r in rate)


def test_predict_rank_report(trained, tmp_path):
    out = tmp_path
    assert run("--out-dir", out, "predict", "--bundle", trained / "bundle.pkl", "--split", "test") == 0
    preds = read(out / "predictions.csv")
    assert len(preds) == 20
    quads = read(out / "quadrants.csv")
    assert sum(int(q["count"]) for q in quads) == len(preds)
    joint = [float(p["joint"]) for p in preds]
    assert joint == sorted(joint, reverse=True)
    for p in preds:
        assert p["quadrant"] == quadrant(float(p["p_absorption_capacity"]), float(p["p_observed_initial_rate"]))
    assert run("--out-dir", out, "rank", "--predictions", out / "predictions.csv", "--top", 5) == 0
    assert len(read(out / "ranked.csv")) == 5
    assert run("--out-dir", out, "report", "--bundle", trained / "bundle.pkl",
               "--predictions", out / "predictions.csv") == 0
    text = (out / "report.md").read_text()
    assert "## absorption_capacity" in text and "## quadrants" in text
    assert len(read(out / "scatter.csv")) == 20


def test_predict_named_model(trained, tmp_path):
    assert run("--out-dir", tmp_path, "predict", "--bundle", trained / "bundle.pkl",
               "--capacity-model", "Ensemble", "--split", "validate") == 0
    preds = read(tmp_path / "predictions.csv")
    assert {p["absorption_capacity_model"] for p in preds} == {"Ensemble"}
    assert run("--out-dir", tmp_path, "predict", "--bundle", trained / "bundle.pkl",
               "--rate-model", "QDA") == 1


def test_predict_is_deterministic(trained, tmp_path):
    for name in ("a", "b"):
        assert run("--out-dir", tmp_path / name, "predict", "--bundle", trained / "bundle.pkl") == 0
    assert (tmp_path / "a" / "predictions.csv").read_bytes() == (tmp_path / "b" / "predictions.csv").read_bytes()


def test_fingerprint(tmp_path):
    assert run("--out-dir", tmp_path, "fingerprint") == 0
    rows = read(tmp_path / "features.csv")
    assert len(rows) == 128
    pcs = [c for c in rows[0] if c.startswith("pc")]
    X = np.array([[float(r[c]) for c in pcs] for r in rows if r["split"] == "train"])
    np.testing.assert_allclose(X.mean(0), 0.0, atol=1e-8)
    assert (tmp_path / "pca.json").exists()


# -- signal -----------------------------------------------------------------

def test_simulate_then_analyze(tmp_path):
    assert run("--out-dir", tmp_path, "simulate-signal", "--alpha", 0.5, "--k-c", 0.02,
               "--n-amine", 8.2e-5, "--duration", 520, "--name", "s1.csv") == 0
    assert run("--out-dir", tmp_path, "analyze-signal", "--trace", tmp_path / "s1.csv",
               "--n-amine", 8.2e-5) == 0
    (row,) = read(tmp_path / "absorption.csv")
    assert row["sample_id"] == "s1"
    assert abs(float(row["alpha"]) / 0.5 - 1) < 0.02
    assert abs(float(row["initial_rate"]) / 0.01 - 1) < 0.05


def test_analyze_manifest(tmp_path):
    for i, alpha in enumerate((0.3, 0.6)):
        assert run("--out-dir", tmp_path, "simulate-signal", "--alpha", alpha, "--k-c", 0.02,
                   "--n-amine", 8.2e-5, "--duration", 520, "--name", f"t{i}.csv") == 0
    (tmp_path / "m.csv").write_text("sample_id,trace,n_amine\nA,t0.csv,8.2e-5\nB,t1.csv,8.2e-5\n")
    assert run("--out-dir", tmp_path / "out", "analyze-signal", "--manifest", tmp_path / "m.csv") == 0
    rows = read(tmp_path / "out" / "absorption.csv")
    assert [r["sample_id"] for r in rows] == ["A", "B"]
    assert abs(float(rows[1]["alpha"]) / float(rows[0]["alpha"]) - 2) < 0.02


def test_analyze_needs_input(tmp_path):
    assert run("--out-dir", tmp_path, "analyze-signal") == 1
    assert run("--out-dir", tmp_path, "analyze-signal", "--trace", tmp_path / "x.csv") == 1


def test_calibration_file_flag(tmp_path):
    (tmp_path / "cal.txt").write_text("a=0.8\nb=10\nc=1.0\nf_o=0.1\n")
    assert run("--out-dir", tmp_path, "simulate-signal", "--alpha", 0.5, "--k-c", 0.02, "--n-amine", 4e-5,
               "--duration", 520, "--calibration", tmp_path / "cal.txt") == 0
    assert run("--out-dir", tmp_path, "analyze-signal", "--trace", tmp_path / "trace.csv",
               "--n-amine", 4e-5, "--calibration", tmp_path / "cal.txt") == 0
    (row,) = read(tmp_path / "absorption.csv")
    assert abs(float(row["alpha"]) / 0.5 - 1) < 0.02


# -- generate ---------------------------------------------------------------

def test_generate(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("smiles\nCCO\nCCN\nCCCO\nOCCCO\n")
    assert run("--out-dir", tmp_path, "generate", "--dataset", data) == 0
    cands = read(tmp_path / "candidates.csv")
    smiles = {c["key"] for c in cands}
    from aminescreen.chem import parse_smiles
    from aminescreen.chem.canon import canonical_key
    assert canonical_key(parse_smiles("CCCN")) in smiles
    assert canonical_key(parse_smiles("CCO")) not in smiles
    assert all(c["not_duplicate"] == "pass" and c["toxicity"] == "unknown" for c in cands)
    assert (tmp_path / "rules.csv").exists()
    # strict mode drops candidates without property rows
    assert run("--out-dir", tmp_path / "s", "generate", "--dataset", data, "--strict",
               "--rules", tmp_path / "rules.csv") == 0
    assert read(tmp_path / "s" / "candidates.csv") == []
