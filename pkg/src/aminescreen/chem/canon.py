"""Canonical atom ordering and SMILES writing.

Ranks come from iterated neighbourhood refinement; remaining ties are
broken by exhaustive individualisation, keeping the lexicographically
smallest serialisation.  Every branch of that search is label-invariant, so
the result does not depend on the input atom order.
"""

from __future__ import annotations

import random
from collections import Counter
from typing import Callable, Sequence

from .molecule import ATTACHMENT, ORGANIC_SUBSET, Atom, BondOrder, Molecule, implicit_hcount

# Leaf budget for the tie-breaking search; only very symmetric cages get near it.
MAX_LEAVES = 5000


def _dense(keys: Sequence) -> list[int]:
    order = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def refine(mol: Molecule, ranks: Sequence[int]) -> list[int]:
    """Iterate neighbourhood refinement until the partition stops splitting."""
    ranks = list(ranks)
    nbrs = mol.neighbors
    bonds = mol.bonds
    n_classes = len(set(ranks))
    while True:
        sigs = [
            (ranks[i], tuple(sorted((int(bonds[k].order), ranks[j]) for j, k in nbrs[i])))
            for i in range(len(ranks))
        ]
        new = _dense(sigs)
        n_new = len(set(new))
        if n_new == n_classes:
            return new
        ranks, n_classes = new, n_new


def atom_invariant(atom: Atom, degree: int) -> tuple:
    return (atom.element, atom.aromatic, atom.charge, atom.hcount, degree)


def canonical_ranks(
    mol: Molecule,
    invariants: Sequence | None = None,
    serialize: Callable[[Molecule, list[int]], str] | None = None,
) -> tuple[list[int], str]:
    """Return (total order of atoms, canonical string) for ``mol``."""
    if invariants is None:
        invariants = [atom_invariant(a, mol.degree(i)) for i, a in enumerate(mol.atoms)]
    serialize = serialize or write_smiles
    n = len(mol.atoms)
    best: list = [None, None]
    leaves = [0]

    def search(ranks):
        ranks = refine(mol, ranks)
        counts = Counter(ranks)
        if len(counts) == n:
            leaves[0] += 1
            s = serialize(mol, ranks)
            if best[0] is None or s < best[0]:
                best[0], best[1] = s, ranks
            return
        cell = min(r for r, c in counts.items() if c > 1)
        members = [i for i in range(n) if ranks[i] == cell]
        for pick in members:
            split = [2 * r + (1 if r == cell and i != pick else 0) for i, r in enumerate(ranks)]
            search(_dense(split))
            if leaves[0] >= MAX_LEAVES:
                return

    if n:
        search(_dense(invariants))
    else:
        best = ["", []]
    return best[1], best[0]


# -- writing ----------------------------------------------------------------


def _bond_symbol(mol: Molecule, k: int) -> str:
    bond = mol.bonds[k]
    a, b = mol.atoms[bond.begin], mol.atoms[bond.end]
    if bond.order is BondOrder.SINGLE:
        return "-" if a.aromatic and b.aromatic else ""
    if bond.order is BondOrder.DOUBLE:
        return "="
    if bond.order is BondOrder.TRIPLE:
        return "#"
    return "" if a.aromatic and b.aromatic else ":"


def smiles_atom_token(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    if atom.element == ATTACHMENT:
        return "*"
    if atom.element in ORGANIC_SUBSET and atom.charge == 0:
        try:
            implicit = implicit_hcount(atom.element, atom.aromatic, mol.bond_valence(idx))
        except ValueError:
            implicit = None
        if implicit == atom.hcount:
            return atom.symbol
    token = "[" + atom.symbol
    if atom.hcount:
        token += "H" + (str(atom.hcount) if atom.hcount > 1 else "")
    if atom.charge:
        sign = "+" if atom.charge > 0 else "-"
        token += sign + (str(abs(atom.charge)) if abs(atom.charge) > 1 else "")
    return token + "]"


def write_smiles(
    mol: Molecule,
    ranks: Sequence[int],
    atom_token: Callable[[Molecule, int], str] = smiles_atom_token,
) -> str:
    """Serialise ``mol`` as SMILES, visiting atoms in ``ranks`` order.

    Stereo markers are never written.
    """
    n = len(mol.atoms)
    nbrs = [sorted(mol.neighbors[i], key=lambda jk: ranks[jk[0]]) for i in range(n)]

    # pass 1: DFS tree, remaining edges become ring closures
    visited = [False] * n
    tree_children: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    ring_bonds: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    roots = []
    for start in sorted(range(n), key=lambda i: ranks[i]):
        if visited[start]:
            continue
        roots.append(start)
        visited[start] = True
        stack = [(start, -1, iter(nbrs[start]))]
        while stack:
            node, via, it = stack[-1]
            for j, k in it:
                if k == via:
                    continue
                if visited[j]:
                    if all(k != kk for _, kk in ring_bonds[node]):
                        ring_bonds[node].append((j, k))
                        ring_bonds[j].append((node, k))
                    continue
                visited[j] = True
                tree_children[node].append((j, k))
                stack.append((j, k, iter(nbrs[j])))
                break
            else:
                stack.pop()

    # pass 2: emit
    out: list[str] = []
    written = [False] * n
    digit_of: dict[int, int] = {}
    free: list[int] = []
    next_digit = [1]

    def take_digit() -> int:
        if free:
            free.sort()
            return free.pop(0)
        d = next_digit[0]
        next_digit[0] += 1
        return d

    def fmt(d: int) -> str:
        return str(d) if d < 10 else f"%{d:02d}"

    def emit(root: int, via_bond: int):
        stack: list = [("atom", root, via_bond)]
        while stack:
            item = stack.pop()
            if item[0] == "text":
                out.append(item[1])
                continue
            _, a, k_in = item
            if k_in >= 0:
                out.append(_bond_symbol(mol, k_in))
            out.append(atom_token(mol, a))
            written[a] = True
            closing = [(j, k) for j, k in ring_bonds[a] if written[j] and k in digit_of]
            opening = [(j, k) for j, k in ring_bonds[a] if not written[j]]
            released = []
            for j, k in sorted(closing, key=lambda jk: ranks[jk[0]]):
                d = digit_of.pop(k)
                out.append(fmt(d))
                released.append(d)
            for j, k in sorted(opening, key=lambda jk: ranks[jk[0]]):
                d = take_digit()
                digit_of[k] = d
                out.append(_bond_symbol(mol, k) + fmt(d))
            free.extend(released)
            children = tree_children[a]
            # push in reverse so the lowest-ranked child is written first
            for pos in range(len(children) - 1, -1, -1):
                j, k = children[pos]
                if pos < len(children) - 1:
                    stack.append(("text", ")"))
                    stack.append(("atom", j, k))
                    stack.append(("text", "("))
                else:
                    stack.append(("atom", j, k))

    for i, root in enumerate(roots):
        if i:
            out.append(".")
        emit(root, -1)
    return "".join(out)


# -- public helpers ----------------------------------------------------------


def canonical_key(mol: Molecule) -> str:
    """Order-invariant string for the constitution of ``mol`` (stereo ignored)."""
    return canonical_ranks(mol)[1]


def to_smiles(mol: Molecule, rng: random.Random | int | None = None) -> str:
    """Write a SMILES rendering of ``mol``.

    With ``rng`` the atom visiting order is shuffled, giving a different but
    equivalent string; without it the input atom order is used.
    """
    ranks = list(range(len(mol.atoms)))
    if rng is not None:
        if not isinstance(rng, random.Random):
            rng = random.Random(rng)
        rng.shuffle(ranks)
    return write_smiles(mol, ranks)
