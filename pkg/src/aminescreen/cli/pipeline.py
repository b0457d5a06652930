"""Train, validate, predict and rank: the discovery-cycle pipeline over datasets."""

from __future__ import annotations

import csv
import json
import logging
import pickle
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..errors import AmineScreenError, UsageError
from ..fingerprint import FragmentVectorizer, VariancePCA
from ..learn import SoftVotingClassifier, evaluate, grid_search_cv
from ..learn.registry import KINDS, PROPERTIES, SHORT, ClassifierSpec, load_grids
from .config import PipelineConfig
from .ingest import DatasetRecord

log = logging.getLogger(__name__)

BUNDLE_FORMAT = 1
METRIC_COLUMNS = ["property", "model", "split", "n", "accuracy", "sensitivity", "specificity",
                  "roc_auc_balanced", "roc_auc_rank", "mcc", "mcc_undefined", "tp", "fp", "tn", "fn",
                  "cv_accuracy", "hyperparameters"]
PREDICTION_COLUMNS = ["rank", "key", "smiles", "p_absorption_capacity", "p_observed_initial_rate",
                      "joint", "quadrant", "absorption_capacity_model", "observed_initial_rate_model"]


def fmt(x) -> str:
    """Stable text for CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return "nan" if np.isnan(x) else f"{float(x):.10g}"
    return str(x)


@dataclass
class ModelBundle:
    config: PipelineConfig
    vectorizer: FragmentVectorizer
    pca: VariancePCA
    specs: dict  # property -> kind -> ClassifierSpec
    models: dict  # property -> name -> fitted estimator (kinds plus "Ensemble")
    cv_scores: dict  # property -> kind -> mean CV accuracy
    metrics: list = field(default_factory=list)  # metric row dicts
    best: dict = field(default_factory=dict)  # property -> model name
    version: str = __version__
    format: int = BUNDLE_FORMAT

    def features(self, records) -> np.ndarray:
        return self.pca.transform(self.vectorizer.transform([r.molecule for r in records]))

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            pickle.dump(self, fh, protocol=4)

    @classmethod
    def load(cls, path) -> "ModelBundle":
        with open(path, "rb") as fh:
            try:
                obj = pickle.load(fh)
            except (pickle.UnpicklingError, EOFError, AttributeError) as exc:
                raise UsageError(f"{path}: not a model bundle ({exc})") from None
        if not isinstance(obj, cls):
            raise UsageError(f"{path}: not a model bundle")
        if obj.format > BUNDLE_FORMAT:
            raise UsageError(f"{path}: bundle format {obj.format} is newer than supported {BUNDLE_FORMAT}")
        return obj


def labelled(records, prop: str, cfg: PipelineConfig):
    """(records, labels) for the rows of ``records`` carrying a label for ``prop``."""
    keep, y = [], []
    for r in records:
        lab = r.label(prop, cfg.rate_threshold, cfg.capacity_ratio_threshold)
        if lab is not None:
            keep.append(r)
            y.append(lab)
    return keep, np.array(y, dtype=int)


def seeded_split(records, seed: int, fraction: float = 0.1):
    """Stratified (on the capacity label) hold-out used when no validate split is given."""
    rs = np.random.RandomState(seed)
    val = []
    groups: dict = {}
    for i, r in enumerate(records):
        groups.setdefault(r.absorption_capacity is not None, []).append(i)
    for idx in groups.values():
        idx = np.array(idx)[rs.permutation(len(idx))]
        val.extend(idx[: max(1, int(round(fraction * len(idx))))].tolist())
    val = set(val)
    return [r for i, r in enumerate(records) if i not in val], [r for i, r in enumerate(records) if i in val]


def assign_splits(records, cfg: PipelineConfig, n_test=(12, 8), n_validate: int = 11) -> None:
    """Seeded train/validate/test assignment for datasets without a split column.

    The test set takes ``n_test`` (positive, negative) observed-initial-rate
    rows; validation takes ``n_validate`` of the rest, stratified on the same
    label; everything else is train.  Works in place.
    """
    rs = np.random.RandomState(cfg.seed)
    eligible = [r for r in records if r.eligible]
    lab = {id(r): r.label("observed_initial_rate", cfg.rate_threshold, cfg.capacity_ratio_threshold)
           for r in eligible}
    for r in records:
        r.split = "train"
    by_class = {c: [r for r in eligible if lab[id(r)] == c] for c in (1, 0, None)}
    for c in by_class:
        by_class[c] = [by_class[c][i] for i in rs.permutation(len(by_class[c]))]
    for c, n in zip((1, 0), n_test):
        if len(by_class[c]) < n:
            log.warning("only %d rows of class %d for the test set", len(by_class[c]), c)
        for r in by_class[c][:n]:
            r.split = "test"
        by_class[c] = by_class[c][n:]
    rest = sum(len(v) for v in by_class.values())
    for v in by_class.values():
        for r in v[: int(round(n_validate * len(v) / rest)) if rest else 0]:
            r.split = "validate"


def _search(job):
    prop, kind, grid, X, y, folds, seed = job
    t0 = time.perf_counter()
    est = ClassifierSpec(kind).build(seed)
    result = grid_search_cv(est, grid, X, y, folds=folds, seed=seed)
    spec = ClassifierSpec(kind, result.best_params)
    model = spec.build(seed).fit(X, y)
    return prop, kind, spec, model, result.best_score, time.perf_counter() - t0


def metric_row(prop, name, split, y, model, X, cv=float("nan"), params=None) -> dict:
    proba = model.predict_proba(X)[:, 1]
    rep = evaluate(y, y_proba=proba)
    row = {"property": prop, "model": name, "split": split, "n": len(y)}
    row.update(rep.as_row())
    row["cv_accuracy"] = cv
    row["hyperparameters"] = json.dumps(params or {}, sort_keys=True)
    return row


def run_training(records: list[DatasetRecord], cfg: PipelineConfig) -> ModelBundle:
    """Grid-search every kind per property on train, refit, score on validate.

    Adds a soft-voting ensemble per property.  The best model per property
    is the highest validation accuracy, then MCC, then the listed kind order.
    """
    eligible = [r for r in records if r.eligible]
    train = [r for r in eligible if r.split == "train"]
    val = [r for r in eligible if r.split == "validate"]
    if not train:
        raise UsageError("no model-eligible training rows")
    if not val:
        log.info("no validate split; holding out a seeded 10%% of train")
        train, val = seeded_split(train, cfg.seed)
    vec = FragmentVectorizer(cfg.radius)
    pca_rows = train if cfg.pca_fit_on == "train" else eligible
    vec.fit([r.molecule for r in pca_rows])
    pca = VariancePCA(cfg.variance_target).fit(vec.transform([r.molecule for r in pca_rows]),
                                               vocabulary=vec.vocabulary_, radius=cfg.radius)
    log.info("PCA keeps %d components", pca.n_components_)
    grids = load_grids(cfg.grid_path)
    bundle = ModelBundle(cfg, vec, pca, {}, {}, {})
    jobs = []
    data = {}
    for prop in PROPERTIES:
        tr, ytr = labelled(train, prop, cfg)
        va, yva = labelled(val, prop, cfg)
        if len(np.unique(ytr)) < 2:
            raise UsageError(f"{prop}: training labels contain a single class")
        Xtr, Xva = bundle.features(tr), bundle.features(va)
        data[prop] = (Xtr, ytr, Xva, yva)
        for kind in cfg.kinds:
            jobs.append((prop, kind, grids[prop][kind], Xtr, ytr, cfg.folds, cfg.seed))
    workers = cfg.workers()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_search, jobs))
    else:
        results = [_search(j) for j in jobs]
    for prop, kind, spec, model, score, secs in results:
        log.info("%s %s cv=%.3f (%.1fs)", prop, kind, score, secs)
        bundle.specs.setdefault(prop, {})[kind] = spec
        bundle.models.setdefault(prop, {})[kind] = model
        bundle.cv_scores.setdefault(prop, {})[kind] = score
    for prop in PROPERTIES:
        Xtr, ytr, Xva, yva = data[prop]
        rows = []
        for kind in cfg.kinds:
            rows.append(metric_row(prop, kind, "validate", yva, bundle.models[prop][kind], Xva,
                                   bundle.cv_scores[prop][kind], bundle.specs[prop][kind].hyperparameters))
        members = [k for k in cfg.ensembles.get(prop, []) if k in bundle.models[prop]]
        if members:
            ens = SoftVotingClassifier.from_fitted([(k, bundle.models[prop][k]) for k in members])
            bundle.models[prop]["Ensemble"] = ens
            rows.append(metric_row(prop, "Ensemble", "validate", yva, ens, Xva,
                                   params={"members": members}))
        order = {k: i for i, k in enumerate(cfg.kinds)}
        best = max((r for r in rows if r["model"] in order),
                   key=lambda r: (r["accuracy"], r["mcc"], -order[r["model"]]))
        bundle.best[prop] = best["model"]
        bundle.metrics.extend(rows)
    return bundle


def evaluate_bundle(bundle: ModelBundle, records, split: str = "test") -> list[dict]:
    """Metric rows of every stored model on the rows of ``split``."""
    rows = [r for r in records if r.eligible and (split == "all" or r.split == split)]
    out = []
    for prop in PROPERTIES:
        recs, y = labelled(rows, prop, bundle.config)
        if not len(y):
            continue
        X = bundle.features(recs)
        for name, model in bundle.models[prop].items():
            out.append(metric_row(prop, name, split, y, model, X))
    return out


def quadrant(p_cap: float, p_rate: float) -> str:
    """B both positive, D capacity only, A rate only, C neither (0.5 counts as positive)."""
    cap, rate = p_cap >= 0.5, p_rate >= 0.5
    if cap and rate:
        return "B"
    if cap:
        return "D"
    if rate:
        return "A"
    return "C"


def rank_rows(rows: list[dict]) -> list[dict]:
    """Order by the product of the two positive-class probabilities, descending."""
    ranked = sorted(rows, key=lambda r: (-r["joint"], r["key"]))
    for i, r in enumerate(ranked, start=1):
        r["rank"] = i
    return ranked


def run_prediction(bundle: ModelBundle, records, models: dict | None = None) -> list[dict]:
    """Per molecule P(active) for both properties, quadrant and rank."""
    models = dict(bundle.best, **(models or {}))
    usable = [r for r in records if r.eligible]
    skipped = len(records) - len(usable)
    if skipped:
        log.warning("%d rows are not model-eligible and were skipped", skipped)
    if not usable:
        return []
    X = bundle.features(usable)
    probs = {}
    for prop in PROPERTIES:
        name = models[prop]
        if name not in bundle.models[prop]:
            raise UsageError(f"no {prop} model named {name!r}; have {sorted(bundle.models[prop])}")
        probs[prop] = bundle.models[prop][name].predict_proba(X)[:, 1]
    rows = []
    for i, r in enumerate(usable):
        pc, pr = float(probs["absorption_capacity"][i]), float(probs["observed_initial_rate"][i])
        rows.append({"rank": 0, "key": r.key, "smiles": r.smiles, "p_absorption_capacity": pc,
                     "p_observed_initial_rate": pr, "joint": pc * pr, "quadrant": quadrant(pc, pr),
                     "absorption_capacity_model": models["absorption_capacity"],
                     "observed_initial_rate_model": models["observed_initial_rate"]})
    return rank_rows(rows)


def write_rows(path, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(r.get(c, "")) for c in columns])


def read_predictions(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return []
    missing = {"key", "p_absorption_capacity", "p_observed_initial_rate"} - set(rows[0])
    if missing:
        raise AmineScreenError(f"{path}: missing columns {sorted(missing)}")
    for r in rows:
        r["p_absorption_capacity"] = float(r["p_absorption_capacity"])
        r["p_observed_initial_rate"] = float(r["p_observed_initial_rate"])
        r["joint"] = r["p_absorption_capacity"] * r["p_observed_initial_rate"]
        r["quadrant"] = quadrant(r["p_absorption_capacity"], r["p_observed_initial_rate"])
    return rows


def short_name(kind: str) -> str:
    return SHORT.get(kind, kind)


__all__ = ["KINDS", "METRIC_COLUMNS", "ModelBundle", "PREDICTION_COLUMNS", "assign_splits", "evaluate_bundle",
           "quadrant", "rank_rows", "run_prediction", "run_training", "write_rows"]
