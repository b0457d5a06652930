"""Immutable molecular graph types."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property

from ..errors import ValenceViolation

ORGANIC_SUBSET = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})
AROMATIC_ORGANIC = frozenset({"b", "c", "n", "o", "p", "s"})

# Allowed neutral valences, lowest first.
DEFAULT_VALENCE = {
    "B": (3,),
    "C": (4,),
    "N": (3,),  # neutral hypervalent N (old-style nitro) is rejected
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
    "H": (1,),
    "Si": (4,),
    "Se": (2, 4, 6),
    "As": (3, 5),
}

# Recognised inside brackets. Anything outside this list is UnknownElement.
ELEMENTS = frozenset(
    """H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni
    Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe
    Cs Ba La Ce Pt Au Hg Tl Pb Bi""".split()
)

ATTACHMENT = "*"


class BondOrder(enum.IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4

    @property
    def valence(self) -> int:
        # aromatic bonds count 1; the pi contribution is added per atom
        return 1 if self is BondOrder.AROMATIC else int(self)


@dataclass(frozen=True)
class Atom:
    element: str
    charge: int = 0
    hcount: int = 0
    aromatic: bool = False
    bracket: bool = False
    chirality: str = ""

    @property
    def is_attachment(self) -> bool:
        return self.element == ATTACHMENT

    @property
    def symbol(self) -> str:
        return self.element.lower() if self.aromatic else self.element


@dataclass(frozen=True)
class Bond:
    begin: int
    end: int
    order: BondOrder = BondOrder.SINGLE
    stereo: str = ""

    def other(self, idx: int) -> int:
        return self.end if idx == self.begin else self.begin


def allowed_valences(element: str, charge: int) -> tuple[int, ...] | None:
    """Valences an atom may have given its formal charge (None: unchecked)."""
    base = DEFAULT_VALENCE.get(element)
    if base is None:
        return None
    if charge == 0:
        return base
    if element in ("C", "Si"):
        return (3,) if abs(charge) == 1 else None
    if element == "B":
        return (4,) if charge == -1 else None
    if element in ("N", "P", "As", "O", "S", "Se"):
        shifted = tuple(v + charge for v in base if v + charge >= 0)
        return shifted or None
    if element in ("F", "Cl", "Br", "I") and charge == -1:
        return (0,)
    return None


def implicit_hcount(element: str, aromatic: bool, bond_valence: int) -> int:
    """Implicit hydrogens for an organic-subset atom written without brackets.

    ``bond_valence`` counts aromatic bonds as 1.  Raises ValueError when the
    bonds already exceed the largest allowed valence.
    """
    if element == ATTACHMENT:
        return 0
    valences = DEFAULT_VALENCE[element]
    if bond_valence > valences[-1]:
        raise ValueError(f"too many bonds for {element}")
    if aromatic:
        if element in ("O", "S"):
            return 0
        # one valence unit goes to the ring pi system
        return max(0, valences[0] - bond_valence - 1)
    for v in valences:
        if v >= bond_valence:
            return v - bond_valence
    raise ValueError(f"too many bonds for {element}")


@dataclass(frozen=True)
class Molecule:
    """A single molecular graph.

    Hydrogens are stored as per-atom counts (``Atom.hcount``), never as
    graph nodes.  Atom indices never change once built.
    """

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    source_text: str = field(default="", compare=False)

    def __len__(self):
        return len(self.atoms)

    @cached_property
    def neighbors(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per atom: tuple of (neighbor index, bond index)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
        for k, b in enumerate(self.bonds):
            adj[b.begin].append((b.end, k))
            adj[b.end].append((b.begin, k))
        return tuple(tuple(a) for a in adj)

    def degree(self, idx: int) -> int:
        return len(self.neighbors[idx])

    def bond_between(self, i: int, j: int) -> Bond | None:
        for nbr, k in self.neighbors[i]:
            if nbr == j:
                return self.bonds[k]
        return None

    def bond_valence(self, idx: int) -> int:
        return sum(self.bonds[k].order.valence for _, k in self.neighbors[idx])

    @cached_property
    def ring_bonds(self) -> frozenset[int]:
        """Indices of bonds that lie on at least one cycle (non-bridges)."""
        n = len(self.atoms)
        disc = [-1] * n
        low = [0] * n
        bridges: set[int] = set()
        timer = 0
        for root in range(n):
            if disc[root] != -1:
                continue
            disc[root] = low[root] = timer
            timer += 1
            stack = [(root, -1, iter(self.neighbors[root]))]
            while stack:
                node, via, it = stack[-1]
                advanced = False
                for nbr, k in it:
                    if k == via:
                        continue
                    if disc[nbr] == -1:
                        disc[nbr] = low[nbr] = timer
                        timer += 1
                        stack.append((nbr, k, iter(self.neighbors[nbr])))
                        advanced = True
                        break
                    low[node] = min(low[node], disc[nbr])
                if advanced:
                    continue
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[node])
                    if low[node] > disc[parent]:
                        bridges.add(via)
        return frozenset(range(len(self.bonds))) - bridges

    def in_ring(self, idx: int) -> bool:
        return any(k in self.ring_bonds for _, k in self.neighbors[idx])

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        seen = [False] * len(self.atoms)
        out = []
        for start in range(len(self.atoms)):
            if seen[start]:
                continue
            comp = []
            stack = [start]
            seen[start] = True
            while stack:
                a = stack.pop()
                comp.append(a)
                for nbr, _ in self.neighbors[a]:
                    if not seen[nbr]:
                        seen[nbr] = True
                        stack.append(nbr)
            out.append(tuple(sorted(comp)))
        return tuple(out)

    def heavy_atom_count(self) -> int:
        return sum(1 for a in self.atoms if a.element not in ("H", ATTACHMENT))

    def formula_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for a in self.atoms:
            if a.is_attachment:
                continue
            counts[a.element] = counts.get(a.element, 0) + 1
            if a.hcount:
                counts["H"] = counts.get("H", 0) + a.hcount
        return counts

    def validate(self) -> None:
        """Raise ValenceViolation if any atom's valence is chemically impossible."""
        for i, atom in enumerate(self.atoms):
            check_valence(self, i, atom)

    def subgraph(self, keep) -> tuple[Molecule, list[int]]:
        """Induced subgraph on atom indices ``keep``; returns (mol, old indices)."""
        keep = sorted(set(keep))
        remap = {old: new for new, old in enumerate(keep)}
        bonds = tuple(
            replace(b, begin=remap[b.begin], end=remap[b.end])
            for b in self.bonds
            if b.begin in remap and b.end in remap
        )
        return Molecule(tuple(self.atoms[i] for i in keep), bonds), keep


def check_valence(mol: Molecule, idx: int, atom: Atom, position=None) -> None:
    if atom.is_attachment:
        return
    allowed = allowed_valences(atom.element, atom.charge)
    if allowed is None:
        return
    total = mol.bond_valence(idx) + atom.hcount
    if atom.aromatic:
        # with or without the pi bond depending on the (unknown) Kekule form
        ok = total in allowed or total + 1 in allowed
    else:
        ok = total in allowed
    if not ok:
        raise ValenceViolation(
            f"atom {idx} ({atom.symbol}, charge {atom.charge:+d}) has valence "
            f"{total}; allowed {allowed}",
            position,
        )
