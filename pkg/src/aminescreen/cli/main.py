"""Command-line entry point.

Exit codes: 0 success, 1 input error (bad file, bad value, bad usage),
2 internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import warnings
from collections import Counter
from pathlib import Path

from .. import __version__
from ..chem.canon import to_smiles
from ..errors import AmineScreenError, UsageError
from ..generate import (FilterThresholds, apply_rules, extract_rules, filter_candidates,
                        load_property_table, load_rules, save_rules)
from ..learn.registry import PROPERTIES
from ..signal import Calibration, SignalTrace, compute_absorption, simulate_trace
from .config import PipelineConfig
from .ingest import ingest
from .pipeline import (METRIC_COLUMNS, PREDICTION_COLUMNS, ModelBundle, assign_splits, evaluate_bundle,
                       fmt, rank_rows, read_predictions, run_prediction, run_training, write_rows)

log = logging.getLogger("aminescreen")

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _global_flags(p, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=default, help="pipeline config JSON")
    p.add_argument("--seed", type=int, default=default, help="overrides the config seed")
    p.add_argument("--out-dir", default=argparse.SUPPRESS if suppress else ".", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS if suppress else False)


def _load_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _records(args, cfg, splits: bool = True):
    result = ingest(args.dataset, cfg.column_map)
    for row, msg in result.diagnostics:
        log.warning("row %d: %s", row, msg)
    if splits and result.records and all(r.split == "none" for r in result.records):
        log.info("no split column; assigning seeded train/validate/test splits")
        assign_splits(result.records, cfg)
    return result


def _out(args, name) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


# -- subcommands --------------------------------------------------------------


def cmd_ingest(args, cfg):
    res = _records(args, cfg)
    path = _out(args, "records.csv")
    cols = ["key", "smiles", "split", "eligible", "skip_reason", "absorption_capacity",
            "observed_initial_rate", "label_absorption_capacity", "label_observed_initial_rate"]
    rows = []
    for r in res.records:
        row = {c: getattr(r, c, "") for c in cols[:7]}
        for prop in PROPERTIES:
            lab = r.label(prop, cfg.rate_threshold, cfg.capacity_ratio_threshold)
            row[f"label_{prop}"] = "" if lab is None else lab
        row = {k: ("" if v is None else v) for k, v in row.items()}
        rows.append(row)
    write_rows(path, rows, cols)
    with open(_out(args, "diagnostics.txt"), "w") as fh:
        for row, msg in res.diagnostics:
            fh.write(f"row {row}: {msg}\n")
    print(f"{len(res.records)} rows, {len(res.eligible)} model-eligible, {len(res.diagnostics)} diagnostics -> {path}")


def cmd_fingerprint(args, cfg):
    from ..fingerprint import FragmentVectorizer, VariancePCA

    res = _records(args, cfg)
    fit_rows = [r for r in res.eligible if cfg.pca_fit_on == "all" or r.split == "train"] or res.eligible
    if not fit_rows:
        raise UsageError("no model-eligible rows to fingerprint")
    vec = FragmentVectorizer(cfg.radius).fit([r.molecule for r in fit_rows])
    pca = VariancePCA(cfg.variance_target).fit(vec.transform([r.molecule for r in fit_rows]),
                                               vocabulary=vec.vocabulary_, radius=cfg.radius)
    Z = pca.transform(vec.transform([r.molecule for r in res.eligible]))
    path = _out(args, "features.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["key", "split"] + [f"pc{i + 1}" for i in range(Z.shape[1])])
        for r, z in zip(res.eligible, Z):
            w.writerow([r.key, r.split] + [fmt(v) for v in z])
    pca.model_.save(_out(args, "pca.json"))
    print(f"{pca.n_components_} components explain {pca.explained_variance_ratio_.sum():.4f} -> {path}")


def cmd_train(args, cfg):
    res = _records(args, cfg)
    bundle = run_training(res.records, cfg)
    bundle.save(_out(args, "bundle.pkl"))
    write_rows(_out(args, "metrics.csv"), bundle.metrics, METRIC_COLUMNS)
    cfg.save(_out(args, "config.json"))
    print(f"{len(bundle.metrics)} metric rows; best {bundle.best} -> {_out(args, 'bundle.pkl')}")


def cmd_validate(args, cfg):
    bundle = ModelBundle.load(args.bundle)
    res = _records(args, bundle.config)
    rows = evaluate_bundle(bundle, res.records, args.split)
    if not rows:
        raise UsageError(f"no labelled model-eligible rows in split {args.split!r}")
    path = _out(args, f"metrics_{args.split}.csv")
    write_rows(path, rows, METRIC_COLUMNS)
    print(f"{len(rows)} metric rows -> {path}")


def cmd_predict(args, cfg):
    bundle = ModelBundle.load(args.bundle)
    res = _records(args, bundle.config)
    recs = [r for r in res.records if args.split in (None, "all") or r.split == args.split]
    models = {}
    if args.capacity_model:
        models["absorption_capacity"] = args.capacity_model
    if args.rate_model:
        models["observed_initial_rate"] = args.rate_model
    rows = run_prediction(bundle, recs, models)
    path = _out(args, "predictions.csv")
    write_rows(path, rows, PREDICTION_COLUMNS)
    counts = Counter(r["quadrant"] for r in rows)
    write_rows(_out(args, "quadrants.csv"), [{"quadrant": q, "count": counts.get(q, 0)} for q in "ABCD"],
               ["quadrant", "count"])
    print(f"{len(rows)} predictions ({dict(sorted(counts.items()))}) -> {path}")


def cmd_rank(args, cfg):
    rows = read_predictions(args.predictions)
    ranked = rank_rows(rows)
    if args.top:
        ranked = ranked[: args.top]
    path = _out(args, "ranked.csv")
    cols = [c for c in PREDICTION_COLUMNS if not rows or c in rows[0] or c in ("rank", "joint", "quadrant")]
    write_rows(path, ranked, cols)
    print(f"{len(ranked)} ranked -> {path}")


def _calibration(args, cfg) -> Calibration:
    path = args.calibration or cfg.calibration_path
    return Calibration.load(path) if path else Calibration()


def cmd_analyze_signal(args, cfg):
    cal = _calibration(args, cfg)
    jobs = []
    if args.manifest:
        base = Path(args.manifest).parent
        with open(args.manifest, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = {"sample_id", "trace", "n_amine"} - set(reader.fieldnames or [])
            if missing:
                raise UsageError(f"{args.manifest}: missing columns {sorted(missing)}")
            for row in reader:
                trace = Path(row["trace"])
                jobs.append((row["sample_id"], trace if trace.is_absolute() else base / trace,
                             float(row["n_amine"])))
    for path in args.trace or []:
        if args.n_amine is None:
            raise UsageError("--n-amine is required with --trace")
        jobs.append((Path(path).stem, Path(path), args.n_amine))
    if not jobs:
        raise UsageError("give --trace files or a --manifest")
    rows = []
    for sample, path, n in jobs:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            r = compute_absorption(SignalTrace.load(path), cal, n, rate_method=cfg.rate_method,
                                   fit_space=cfg.fit_space)
        for w in caught:
            log.warning("%s: %s", sample, w.message)
        rows.append({"sample_id": sample, "alpha": r.alpha, "initial_rate": r.initial_rate,
                     "fit_kind": r.fit_kind, "total_mol_co2": r.total_mol_co2,
                     "flags": ";".join(r.flags)})
    path = _out(args, "absorption.csv")
    write_rows(path, rows, ["sample_id", "alpha", "initial_rate", "fit_kind", "total_mol_co2", "flags"])
    print(f"{len(rows)} traces -> {path}")


def cmd_simulate_signal(args, cfg):
    cal = _calibration(args, cfg)
    seed = cfg.seed if args.noise_seed is None else args.noise_seed
    tr = simulate_trace(args.alpha, args.k_c, args.n_amine, cal, args.duration, args.noise,
                        dt=args.dt, background_mol=args.background_mol, seed=seed)
    path = _out(args, args.name)
    tr.save(path)
    print(f"{len(tr.t)} samples -> {path}")


def cmd_generate(args, cfg):
    res = _records(args, cfg, splits=False)
    # every parsed structure can donate a matched pair, amine or not
    mols = [r.molecule for r in res.records]
    if args.rules:
        rules = load_rules(args.rules)
    else:
        rules = extract_rules(mols, cfg.env_radius)
        save_rules(rules, _out(args, "rules.csv"))
    if args.min_support > 1:
        rules = [r for r in rules if r.support >= args.min_support]
    cands = []
    for m in mols:
        cands.extend(apply_rules(m, rules, cfg.env_radius))
    table = load_property_table(args.properties) if args.properties else None
    thresholds = FilterThresholds(cfg.water_solubility_min, cfg.pKb_max, cfg.LD50_min)
    kept = filter_candidates(cands, {r.key for r in res.records}, table, thresholds,
                             strict=cfg.strict_filters or args.strict)
    if args.limit:
        kept = kept[: args.limit]
    flag_names = ["valid_structure", "not_duplicate", "solubility", "basicity", "toxicity"]
    rows = []
    for c in kept:
        rule = rules[c.rule_id]
        row = {"smiles": to_smiles(c.molecule), "key": c.key, "parent_key": c.parent_key,
               "rule_id": c.rule_id, "lhs": rule.lhs, "rhs": rule.rhs,
               "environment_key": rule.environment_key, "support": rule.support}
        row.update(c.filter_flags)
        rows.append(row)
    path = _out(args, "candidates.csv")
    write_rows(path, rows, ["smiles", "key", "parent_key", "rule_id", "lhs", "rhs", "environment_key",
                            "support"] + flag_names)
    print(f"{len(rules)} rules, {len(cands)} raw candidates, {len(kept)} kept -> {path}")


def cmd_report(args, cfg):
    bundle = ModelBundle.load(args.bundle)
    write_rows(_out(args, "metrics.csv"), bundle.metrics, METRIC_COLUMNS)
    lines = [f"# aminescreen report (v{bundle.version})", "",
             f"PCA components: {bundle.pca.n_components_} "
             f"(variance {bundle.pca.explained_variance_ratio_.sum():.4f}, radius {bundle.config.radius})", ""]
    for prop in PROPERTIES:
        lines += [f"## {prop}", "", f"best: {bundle.best.get(prop)}", "",
                  "| model | acc | sens | spec | AUC | MCC | cv acc |", "|---|---|---|---|---|---|---|"]
        for r in bundle.metrics:
            if r["property"] == prop:
                lines.append("| {} | {:.2f} | {:.2f} | {:.2f} | {:.2f} | {:.2f} | {} |".format(
                    r["model"], r["accuracy"], r["sensitivity"], r["specificity"], r["roc_auc_balanced"],
                    r["mcc"], fmt(r["cv_accuracy"])))
        lines.append("")
    if args.predictions:
        rows = read_predictions(args.predictions)
        counts = Counter(r["quadrant"] for r in rows)
        lines += ["## quadrants", ""] + [f"- {q}: {counts.get(q, 0)}" for q in "ABCD"] + [""]
        write_rows(_out(args, "scatter.csv"), rows,
                   ["key", "p_absorption_capacity", "p_observed_initial_rate", "quadrant"])
    path = _out(args, "report.md")
    path.write_text("\n".join(lines))
    print(f"report -> {path}")


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aminescreen", description="Amine screening for CO2 capture.")
    parser.add_argument("--version", action="version", version=f"aminescreen {__version__}")
    _global_flags(parser, suppress=False)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, "validate a dataset CSV")
    p.add_argument("--dataset", help="dataset CSV (default: shipped surrogate set)")
    p = add("fingerprint", cmd_fingerprint, "fragment counts and PCA features")
    p.add_argument("--dataset")
    p = add("train", cmd_train, "grid-search and fit all classifiers")
    p.add_argument("--dataset")
    p = add("validate", cmd_validate, "score a trained bundle on a split")
    p.add_argument("--bundle", required=True)
    p.add_argument("--dataset")
    p.add_argument("--split", default="test", choices=["train", "validate", "test", "none", "all"])
    p = add("predict", cmd_predict, "P(active) and quadrants for molecules")
    p.add_argument("--bundle", required=True)
    p.add_argument("--dataset")
    p.add_argument("--split", default=None, choices=["train", "validate", "test", "none", "all"])
    p.add_argument("--capacity-model")
    p.add_argument("--rate-model")
    p = add("rank", cmd_rank, "order predictions by joint probability")
    p.add_argument("--predictions", required=True)
    p.add_argument("--top", type=int, default=0)
    p = add("analyze-signal", cmd_analyze_signal, "alpha and initial rate from NDIR traces")
    p.add_argument("--trace", nargs="*")
    p.add_argument("--manifest", help="CSV with sample_id,trace,n_amine")
    p.add_argument("--n-amine", type=float)
    p.add_argument("--calibration")
    p = add("simulate-signal", cmd_simulate_signal, "synthetic trace from first-order uptake")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k-c", type=float, required=True)
    p.add_argument("--n-amine", type=float, required=True)
    p.add_argument("--duration", type=float, required=True)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--background-mol", type=float, default=0.0)
    p.add_argument("--noise-seed", type=int)
    p.add_argument("--calibration")
    p.add_argument("--name", default="trace.csv")
    p = add("generate", cmd_generate, "matched-pair candidates")
    p.add_argument("--dataset")
    p.add_argument("--rules", help="reuse a rules CSV instead of mining")
    p.add_argument("--properties", help="external property CSV")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--min-support", type=int, default=1)
    p.add_argument("--limit", type=int, default=0)
    p = add("report", cmd_report, "summary of a trained bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--predictions")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        cfg = _load_config(args)
        args.func(args, cfg)
        return EXIT_OK
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (AmineScreenError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
