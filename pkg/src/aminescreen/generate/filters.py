"""Mechanical candidate filters: structure, duplicates and external property thresholds."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..chem.canon import canonical_key, to_smiles
from ..chem.smiles import parse_smiles
from ..errors import AmineScreenError
from .mmp import Candidate

log = logging.getLogger(__name__)

PASS, FAIL, UNKNOWN = "pass", "fail", "unknown"

# property column -> (flag name, direction); values come from an external predictor
PROPERTY_FILTERS = {
    "water_solubility": ("solubility", "min"),  # log10 mol/L
    "pKb": ("basicity", "max"),
    "LD50": ("toxicity", "min"),  # mg/kg, oral rat
}


@dataclass(frozen=True)
class FilterThresholds:
    water_solubility: float = -2.0
    pKb: float = 7.0
    LD50: float = 300.0


def _check(value, limit, direction) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return UNKNOWN
    ok = value >= limit if direction == "min" else value <= limit
    return PASS if ok else FAIL


def filter_candidates(cands: Iterable[Candidate], dedupe_against: Iterable[str] = (),
                      property_table: Mapping[str, Mapping[str, float]] | None = None,
                      thresholds: FilterThresholds = FilterThresholds(),
                      strict: bool = False) -> list[Candidate]:
    """Flag every candidate and keep those passing.

    Flags: ``valid_structure`` (re-parse of the written SMILES with valence
    check), ``not_duplicate`` (against earlier candidates and
    ``dedupe_against``) and one per property threshold.  Structure,
    duplicate and threshold failures are dropped; a missing property value
    is ``unknown`` and kept unless ``strict``.
    """
    known = set(dedupe_against)
    table = property_table or {}
    kept = []
    for c in cands:
        flags = {}
        try:
            parse_smiles(to_smiles(c.molecule)).validate()
            flags["valid_structure"] = PASS
        except AmineScreenError:
            flags["valid_structure"] = FAIL
        flags["not_duplicate"] = FAIL if c.key in known else PASS
        known.add(c.key)
        props = table.get(c.key)
        c.properties = dict(props) if props is not None else None
        for column, (name, direction) in PROPERTY_FILTERS.items():
            value = None if props is None else props.get(column)
            flags[name] = _check(value, getattr(thresholds, column), direction)
        c.filter_flags = flags
        states = set(flags.values())
        if FAIL in states or (strict and UNKNOWN in states):
            continue
        kept.append(c)
    log.info("filters kept %d candidates", len(kept))
    return kept


def load_property_table(path, key_column: str | None = None) -> dict[str, dict[str, float]]:
    """Read an external property CSV keyed by canonical key, SMILES or InChIKey.

    Rows keyed by SMILES are re-keyed canonically; an InChIKey column is used
    verbatim (match it against candidates yourself when that is the key).
    """
    out: dict[str, dict[str, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        key_column = key_column or next(
            (c for c in ("canonical_key", "smiles", "SMILES", "inchikey", "InChIKey") if c in cols), None)
        if key_column is None:
            raise ValueError(f"{path}: no key column among {cols}")
        for row in reader:
            key = row[key_column].strip()
            if key_column.lower() == "smiles":
                key = canonical_key(parse_smiles(key))
            values = {}
            for column in PROPERTY_FILTERS:
                raw = (row.get(column) or "").strip()
                values[column] = float(raw) if raw else None
            out[key] = values
    return out
