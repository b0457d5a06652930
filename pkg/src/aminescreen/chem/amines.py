"""Nitrogen moiety classification."""

from __future__ import annotations

from dataclasses import dataclass

from .molecule import BondOrder, Molecule


@dataclass(frozen=True)
class AmineProfile:
    """Counts of each nitrogen type in a molecule.

    ``n_amidine_N`` is a sub-flag: those nitrogens are already included in
    ``n_other_N``.  ``n_tertiary_like`` counts amidine/guanidine groups (one
    per central carbon), which capture CO2 by the carbonate route.
    """

    n_primary: int = 0
    n_secondary: int = 0
    n_tertiary: int = 0
    n_aromatic_N: int = 0
    n_amide_N: int = 0
    n_other_N: int = 0
    n_amidine_N: int = 0
    n_tertiary_like: int = 0

    @property
    def total_N(self) -> int:
        return (self.n_primary + self.n_secondary + self.n_tertiary
                + self.n_aromatic_N + self.n_amide_N + self.n_other_N)

    @property
    def n_amine_like(self) -> int:
        return self.n_primary + self.n_secondary + self.n_tertiary + self.n_tertiary_like


def _has_double_to(mol: Molecule, idx: int, element: str) -> bool:
    for j, k in mol.neighbors[idx]:
        if mol.bonds[k].order is BondOrder.DOUBLE and mol.atoms[j].element == element:
            return True
    return False


def _amidine_centres(mol: Molecule) -> dict[int, set[int]]:
    """Carbon index -> nitrogens of each C(=N)N unit (amidines and guanidines)."""
    centres: dict[int, set[int]] = {}
    for c, atom in enumerate(mol.atoms):
        if atom.element != "C" or atom.aromatic or _has_double_to(mol, c, "O"):
            continue
        double_n = [j for j, k in mol.neighbors[c]
                    if mol.atoms[j].element == "N" and mol.bonds[k].order is BondOrder.DOUBLE]
        single_n = [j for j, k in mol.neighbors[c]
                    if mol.atoms[j].element == "N" and mol.bonds[k].order is BondOrder.SINGLE]
        if double_n and single_n:
            centres[c] = set(double_n) | set(single_n)
    return centres


def nitrogen_types(mol: Molecule) -> dict[int, str]:
    """Map each nitrogen atom index to its category name."""
    centres = _amidine_centres(mol)
    amidine_n = set().union(*centres.values()) if centres else set()
    out = {}
    for i, atom in enumerate(mol.atoms):
        if atom.element != "N":
            continue
        carbonyl = any(
            mol.atoms[j].element == "C" and _has_double_to(mol, j, "O")
            for j, _ in mol.neighbors[i]
        )
        if carbonyl:
            out[i] = "amide"
        elif atom.aromatic:
            out[i] = "aromatic"
        elif i in amidine_n:
            out[i] = "amidine"
        elif atom.charge != 0 or any(mol.bonds[k].order is not BondOrder.SINGLE
                                     for _, k in mol.neighbors[i]):
            out[i] = "other"
        else:
            heavy = sum(1 for j, _ in mol.neighbors[i] if mol.atoms[j].element != "H")
            out[i] = {1: "primary", 2: "secondary", 3: "tertiary"}.get(heavy, "other")
    return out


def classify_amines(mol: Molecule) -> AmineProfile:
    types = nitrogen_types(mol)
    counts = {t: 0 for t in ("primary", "secondary", "tertiary", "aromatic", "amide", "amidine", "other")}
    for t in types.values():
        counts[t] += 1
    return AmineProfile(
        n_primary=counts["primary"],
        n_secondary=counts["secondary"],
        n_tertiary=counts["tertiary"],
        n_aromatic_N=counts["aromatic"],
        n_amide_N=counts["amide"],
        n_other_N=counts["other"] + counts["amidine"],
        n_amidine_N=counts["amidine"],
        n_tertiary_like=len(_amidine_centres(mol)),
    )
