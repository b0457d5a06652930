"""Dataset CSV ingestion with per-row diagnostics."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from importlib import resources

from ..chem.amines import classify_amines
from ..chem.canon import canonical_key
from ..chem.molecule import Molecule
from ..chem.smiles import parse_smiles
from ..errors import AmineScreenError, NoAmine
from ..labels import expected_capacity, label_capacity, label_rate

log = logging.getLogger(__name__)

COLUMNS = ("smiles", "inchikey", "iupac_name", "absorption_capacity", "observed_initial_rate", "split")
SPLITS = ("train", "validate", "test", "none")
# common header spellings for the dataset columns
DEFAULT_ALIASES = {
    "SMILES": "smiles", "Smiles": "smiles", "InChIKey": "inchikey", "InChIkey": "inchikey",
    "IUPAC": "iupac_name", "IUPAC name": "iupac_name", "iupac": "iupac_name",
    "capacity": "absorption_capacity", "Capacity": "absorption_capacity",
    "initial_rate": "observed_initial_rate", "rate": "observed_initial_rate",
    "set": "split", "Set": "split",
}
SPLIT_ALIASES = {"training": "train", "valid": "validate", "validation": "validate", "": "none"}


@dataclass
class DatasetRecord:
    smiles: str
    key: str
    molecule: Molecule | None
    inchikey: str = ""
    iupac_name: str = ""
    absorption_capacity: float | None = None
    observed_initial_rate: float | None = None
    split: str = "none"
    source: str = ""
    eligible: bool = True
    skip_reason: str = ""
    row: int = 0

    def label(self, prop: str, rate_threshold: float, capacity_ratio: float):
        """Class label of ``prop`` or None when unmeasured or unlabelable."""
        value = getattr(self, prop)
        if value is None or self.molecule is None:
            return None
        if prop == "observed_initial_rate":
            return label_rate(value, rate_threshold)
        try:
            return label_capacity(value, classify_amines(self.molecule), capacity_ratio)
        except NoAmine:
            return None


@dataclass
class IngestResult:
    records: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)  # (row, message)

    @property
    def eligible(self) -> list:
        return [r for r in self.records if r.eligible]


def _number(raw: str, name: str, row: int, diags: list):
    raw = (raw or "").strip()
    if not raw:
        return None
    try:
        value = float(raw)
    except ValueError:
        diags.append((row, f"{name} {raw!r} is not a number"))
        return None
    if math.isnan(value):
        return None
    if value < 0:
        diags.append((row, f"negative {name} {value} clamped to 0"))
        return 0.0
    return value


def shipped_dataset_path():
    return resources.files("aminescreen.data").joinpath("amines.csv")


def ingest(path=None, column_map: dict | None = None) -> IngestResult:
    """Read a dataset CSV; problems are collected per row, never fail-fast.

    Rows with unparseable SMILES or a repeated canonical key are rejected.
    Polymer repeat units (``*`` attachment points) are kept but marked not
    model-eligible, as are molecules without a capturing nitrogen.
    """
    path = shipped_dataset_path() if path is None else path
    mapping = dict(DEFAULT_ALIASES)
    mapping.update(column_map or {})
    out = IngestResult()
    seen: dict[str, int] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            log.warning("%s is empty", path)
            return out
        header = [mapping.get(c, c) for c in reader.fieldnames]
        if "smiles" not in header:
            raise AmineScreenError(f"{path}: no smiles column in {reader.fieldnames}")
        for n, raw in enumerate(reader, start=2):
            row = {mapping.get(k, k): (v or "") for k, v in raw.items() if k is not None}
            smi = row["smiles"].strip()
            if not smi:
                out.diagnostics.append((n, "empty SMILES"))
                continue
            try:
                mol = parse_smiles(smi, allow_attachment=True)
            except AmineScreenError as exc:
                out.diagnostics.append((n, f"bad SMILES {smi!r}: {exc}"))
                continue
            key = canonical_key(mol)
            if key in seen:
                out.diagnostics.append((n, f"duplicate of row {seen[key]} ({key}); rejected"))
                continue
            seen[key] = n
            split = row.get("split", "").strip().lower()
            split = SPLIT_ALIASES.get(split, split)
            if split not in SPLITS:
                out.diagnostics.append((n, f"unknown split {split!r}; treated as none"))
                split = "none"
            rec = DatasetRecord(
                smiles=smi, key=key, molecule=mol,
                inchikey=row.get("inchikey", "").strip(), iupac_name=row.get("iupac_name", "").strip(),
                absorption_capacity=_number(row.get("absorption_capacity"), "absorption_capacity", n, out.diagnostics),
                observed_initial_rate=_number(row.get("observed_initial_rate"), "observed_initial_rate", n,
                                              out.diagnostics),
                split=split, source=row.get("source", "").strip(), row=n,
            )
            if any(a.is_attachment for a in mol.atoms):
                rec.eligible, rec.skip_reason = False, "polymeric"
            else:
                try:
                    expected_capacity(classify_amines(mol))
                except NoAmine:
                    rec.eligible, rec.skip_reason = False, "no capturing nitrogen"
            out.records.append(rec)
    if not out.records:
        log.warning("%s has no usable rows", path)
    return out
