"""Build the shipped surrogate amine dataset.

The original measurements are not redistributed here.  This script writes
130 real amine structures (two of them polymers, which the fingerprint
cannot featurise) with absorption capacity and observed initial rate drawn
from a transparent structure-property rule plus seeded log-normal noise.
Splits follow the reference shapes: 99 train rows (97 usable), 11
validation (6 positive / 5 negative for both properties) and 20 test
(12 positive / 8 negative observed initial rate).

    python3 scripts/build_surrogate_dataset.py [out.csv]
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

from aminescreen.chem import canonical_key, classify_amines, parse_smiles
from aminescreen.chem.amines import nitrogen_types
from aminescreen.labels import expected_capacity, label_capacity, label_rate

SEED = 20240611
OUT = Path(__file__).resolve().parents[1] / "src" / "aminescreen" / "data" / "amines.csv"

SMILES = """
NCCO NCCCO NCCCCO NCCCCCO CC(N)CO CC(O)CN CC(C)(N)CO CCC(N)CO NC(CO)CO CC(N)(CO)CO
NC(CO)(CO)CO NCCOCCO NCCN NCCCN NCCCCN NCCCCCCN CC(N)CN NCCNCCN NCCNCCNCCN NCCCNCCCN
CCN CCCN CCCCN CCCCCCN CC(C)N CC(C)(C)N NC1CCCCC1 NCC1CCCCC1 NCc1ccccc1 NCCc1ccccc1 Nc1ccccc1
Cc1ccc(N)cc1 Nc1ccc(O)cc1 Nc1ccccc1N Nc1ccncc1 NC1(O)CCCCC1 NC1CCCCC1O NCC(O)CO NCCS
NCC(=O)O CC(N)C(=O)O NCCS(=O)(=O)O NCCOC NCCCOC NCCN1CCOCC1 NCCCN1CCOCC1 NCc1ccco1
NCc1cccnc1 NC1CC1 NCC(C)C NCCC(C)C OCCNCCO CNCCO CCNCCO CC(C)NCCO CC(C)(C)NCCO
CCCCNCCO CC(O)CNCC(C)O C1CNCCN1 CC1CNCCN1 C1CCNCC1 C1CCNC1 C1COCCN1 CC1CCCCN1
CC1CCCC(C)N1 OCC1CCCCN1 OCCC1CCCCN1 CNC CCNCC CCCNCCC CC(C)NC(C)C CNCCNC C1CNC1
OC1CCNCC1 OCCNCc1ccccc1 CNc1ccccc1 c1ccc(Nc2ccccc2)cc1 C1CCC(CC1)NC1CCCCC1 CNCCCNC
CNC(C)(C)CO CNCC(O)C(O)C(O)C(O)CO C1CNCCNC1 OCCN1CCNCC1 NCCN1CCNCC1 CC(C)(C)NCC(O)CO
CN(CCO)CCO CN(C)CCO CCN(CC)CCO OCCN(CCO)CCO CN(C)CCCO CN(C)CC(C)O CN(C)C CCN(CC)CC
CN1CCCCC1 CN1CCOCC1 CN1CCN(C)CC1 CN1CCNCC1 C1CN2CCN1CC2 CN(C)CCN(C)C CN(C)CCCN(C)C
OCCN1CCCCC1 OCCN1CCOCC1 OCCCN1CCOCC1 CN(C)c1ccccc1 Nc1ccccn1 CN(C)c1ccncc1
NCCc1c[nH]cn1 CN(C)CCN CCN(CC)CCN CN(CCN)CCN CN(C)CC(O)CN(C)C CC(C)N(C)CCO
CCCCN(CCCC)CCCC CN(C)C1CCCCC1 CN(C)Cc1ccccc1 CC(C)N(CCO)CCO CCN(CCO)CCO
C1CCN2CCCCC2C1 CN1CCCC1 OCCN1CCCC1 C1CCC2=NCCCN2CC1 C1CC2=NCCCN2C1 C1CN=C2NCCCN2C1
CN(C)C(=N)N(C)C NC(=N)N CC(N)=N NCCNCCO NCCCN(C)CCCN
""".split()

POLYMERS = ["*CCN*", "*CC(CN)*"]


def _features(mol):
    types = nitrogen_types(mol)
    amine_n = [i for i, t in types.items() if t in ("primary", "secondary")]
    aromatic_attached = any(
        any(mol.atoms[j].aromatic for j, _ in mol.neighbors[i]) for i in types)
    hindered = any(
        sum(1 for k, _ in mol.neighbors[j] if mol.atoms[k].element != "H") >= 3
        and mol.atoms[j].element == "C" and not mol.atoms[j].aromatic
        for i in amine_n for j, _ in mol.neighbors[i])
    n_oh = sum(1 for a in mol.atoms if a.element == "O" and a.hcount == 1)
    n_c = sum(1 for a in mol.atoms if a.element == "C")
    n_n = len(types)
    return aromatic_attached, hindered, n_oh, n_c, n_n


def true_properties(mol, rs):
    """Hidden structure-property rule: (capacity mol/mol, rate mol/mol/s)."""
    prof = classify_amines(mol)
    aromatic, hindered, n_oh, n_c, n_n = _features(mol)
    expected = expected_capacity(prof)
    eff = 0.84
    rate = 0.0
    if prof.n_primary + prof.n_secondary:
        rate = 0.12 if prof.n_primary >= prof.n_secondary else 0.15
    else:
        rate = 0.03
    if hindered:
        # steric hindrance pushes carbamate amines toward the carbonate route
        eff *= 1.6
        rate *= 0.45
    if aromatic:
        eff *= 0.35
        rate *= 0.15
    if prof.n_tertiary_like:
        eff *= 1.1
        rate *= 2.5
    hydrophobic = n_c - 2 * (n_oh + n_n)
    if hydrophobic > 4:
        eff *= 0.55
        rate *= 0.5
    if n_oh:
        eff *= 1.0 + 0.06 * min(n_oh, 3)
    capacity = expected * eff * np.exp(0.18 * rs.standard_normal())
    rate = rate * np.exp(0.35 * rs.standard_normal())
    return round(float(capacity), 4), round(float(rate), 4)


def _pick(rs, pool, labels, counts, n):
    """Draw n indices from pool whose (label) counts match ``counts``."""
    for _ in range(100000):
        idx = list(rs.choice(pool, size=n, replace=False))
        got = {}
        for i in idx:
            for name, lab in labels[i].items():
                got[(name, lab)] = got.get((name, lab), 0) + 1
        if all(got.get(k, 0) == v for k, v in counts.items()):
            return sorted(idx)
    raise RuntimeError("could not satisfy split shape")


def build(out=OUT):
    rs = np.random.RandomState(SEED)
    rows = []
    seen = set()
    for smi in SMILES:
        mol = parse_smiles(smi)
        key = canonical_key(mol)
        if key in seen:
            raise ValueError(f"duplicate structure {smi}")
        seen.add(key)
        cap, rate = true_properties(mol, rs)
        rows.append({"smiles": smi, "absorption_capacity": cap, "observed_initial_rate": rate,
                     "_labels": {"ac": label_capacity(cap, classify_amines(mol)), "oir": label_rate(rate)}})
    labels = [r["_labels"] for r in rows]
    pool = np.arange(len(rows))
    test = _pick(rs, pool, labels, {("oir", 1): 12, ("oir", 0): 8, ("ac", 1): 10}, 20)
    rest = np.setdiff1d(pool, test)
    val = _pick(rs, rest, labels, {("oir", 1): 6, ("ac", 1): 6}, 11)
    for i, r in enumerate(rows):
        r["split"] = "test" if i in test else "validate" if i in val else "train"
    for smi in POLYMERS:
        rows.append({"smiles": smi, "absorption_capacity": round(float(0.4 * np.exp(0.2 * rs.standard_normal())), 4),
                     "observed_initial_rate": round(float(0.03 * np.exp(0.3 * rs.standard_normal())), 4),
                     "split": "train"})
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["smiles", "inchikey", "iupac_name", "absorption_capacity",
                    "observed_initial_rate", "split", "source"])
        for r in rows:
            w.writerow([r["smiles"], "", "", r["absorption_capacity"], r["observed_initial_rate"],
                        r["split"], "surrogate"])
    return rows


if __name__ == "__main__":
    rows = build(Path(sys.argv[1]) if len(sys.argv) > 1 else OUT)
    lab = [r["_labels"] for r in rows if "_labels" in r]
    print(len(rows), "rows;", "ac positive", sum(l["ac"] for l in lab), "oir positive", sum(l["oir"] for l in lab))
