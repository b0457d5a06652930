"""SMILES parsing, canonical keys and amine classification."""

from .amines import AmineProfile, classify_amines, nitrogen_types
from .canon import canonical_key, canonical_ranks, to_smiles, write_smiles
from .molecule import Atom, Bond, BondOrder, Molecule
from .smiles import parse_smiles, split_components

__all__ = [
    "AmineProfile",
    "Atom",
    "Bond",
    "BondOrder",
    "Molecule",
    "canonical_key",
    "canonical_ranks",
    "classify_amines",
    "nitrogen_types",
    "parse_smiles",
    "split_components",
    "to_smiles",
    "write_smiles",
]
