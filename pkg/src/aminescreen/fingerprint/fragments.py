"""Atom-centred fragment-count fingerprints."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ..chem.canon import atom_invariant, canonical_ranks, write_smiles
from ..chem.molecule import ATTACHMENT, Molecule
from ..errors import EmptyInput

MAX_RADIUS = 4


@dataclass(frozen=True)
class CountFingerprint:
    """Sparse fragment counts; absent fragments are simply not stored."""

    entries: Mapping[str, int] = field(default_factory=dict)
    radius: int = 2

    def __post_init__(self):
        if any(c < 1 for c in self.entries.values()):
            raise ValueError("fingerprint counts must be >= 1")

    def __getitem__(self, key):
        return self.entries.get(key, 0)

    def __len__(self):
        return len(self.entries)

    def total(self) -> int:
        return sum(self.entries.values())


def env_atom_label(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    label = f"{atom.symbol}[h{atom.hcount}"
    if atom.charge:
        label += f"{atom.charge:+d}"
    return label + "]"


def _distances(mol: Molecule, root: int, limit: int) -> dict[int, int]:
    dist = {root: 0}
    queue = deque([root])
    while queue:
        a = queue.popleft()
        if dist[a] == limit:
            continue
        for j, _ in mol.neighbors[a]:
            if j not in dist:
                dist[j] = dist[a] + 1
                queue.append(j)
    return dist


def environment_key(mol: Molecule, root: int, radius: int) -> str:
    """Canonical string of the subgraph induced by atoms within ``radius`` bonds of ``root``.

    The root is always written first, so equal keys mean equal rooted
    environments.  Hydrogen counts are those of the full molecule.
    """
    dist = _distances(mol, root, radius)
    sub, old = mol.subgraph(dist)
    new_root = old.index(root)
    inv = [
        (0 if i == new_root else 1,) + atom_invariant(a, sub.degree(i))
        for i, a in enumerate(sub.atoms)
    ]
    _, key = canonical_ranks(sub, inv, lambda m, r: write_smiles(m, r, env_atom_label))
    return key


def atom_environments(mol: Molecule, idx: int, radius: int) -> list[str]:
    """Distinct environment keys of one atom for r = 0..radius."""
    keys: list[str] = []
    last_size = -1
    for r in range(radius + 1):
        size = len(_distances(mol, idx, r))
        if size == last_size:
            break  # the environment stopped growing
        last_size = size
        keys.append(environment_key(mol, idx, r))
    return keys


def fingerprint(mol: Molecule, radius: int = 2) -> CountFingerprint:
    if not 0 <= radius <= MAX_RADIUS:
        raise ValueError(f"radius must be in [0, {MAX_RADIUS}], got {radius}")
    counts: Counter = Counter()
    for idx, atom in enumerate(mol.atoms):
        if atom.element in ("H", ATTACHMENT):
            continue
        counts.update(atom_environments(mol, idx, radius))
    return CountFingerprint(dict(sorted(counts.items())), radius)


def vectorize(
    fps: Iterable[CountFingerprint], vocabulary: list[str] | None = None
) -> tuple[np.ndarray, list[str]]:
    """Dense count matrix; columns follow ``vocabulary`` (sorted key union by default)."""
    fps = list(fps)
    if not fps:
        raise EmptyInput("need at least one fingerprint")
    if vocabulary is None:
        vocabulary = sorted(set().union(*(fp.entries for fp in fps)))
    col = {k: j for j, k in enumerate(vocabulary)}
    X = np.zeros((len(fps), len(vocabulary)))
    for i, fp in enumerate(fps):
        for key, count in fp.entries.items():
            j = col.get(key)
            if j is not None:
                X[i, j] = count
    return X, list(vocabulary)
