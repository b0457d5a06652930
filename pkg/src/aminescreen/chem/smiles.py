"""SMILES reader.

Supports the organic subset, bracket atoms with charge / explicit H /
chirality, ring-closure digits (including ``%nn``), branches, the bond
symbols ``- = # : / \\`` and aromatic lowercase atoms.  Isotopes, atom
classes and reaction SMILES are not supported.
"""

from __future__ import annotations

from ..errors import (
    MultipleComponents,
    SmilesError,
    UnbalancedBranch,
    UnclosedRingBond,
    UnknownElement,
    ValenceViolation,
)
from .molecule import (
    AROMATIC_ORGANIC,
    ATTACHMENT,
    ELEMENTS,
    ORGANIC_SUBSET,
    Atom,
    Bond,
    BondOrder,
    Molecule,
    check_valence,
    implicit_hcount,
)

_BOND_SYMBOLS = {
    "-": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
    "/": BondOrder.SINGLE,
    "\\": BondOrder.SINGLE,
}
_BRACKET_AROMATIC = {"b", "c", "n", "o", "p", "s", "se", "as"}


class _AtomDraft:
    __slots__ = ("element", "charge", "hcount", "aromatic", "bracket", "chirality", "pos")

    def __init__(self, element, aromatic, pos, bracket=False, charge=0, hcount=None, chirality=""):
        self.element = element
        self.aromatic = aromatic
        self.pos = pos
        self.bracket = bracket
        self.charge = charge
        self.hcount = hcount
        self.chirality = chirality


class _Reader:
    def __init__(self, text: str, allow_attachment: bool):
        self.text = text
        self.i = 0
        self.allow_attachment = allow_attachment
        self.atoms: list[_AtomDraft] = []
        # (a, b, order or None, stereo)
        self.bonds: list[tuple[int, int, BondOrder | None, str]] = []
        self.bonded: set[frozenset] = set()

    def error(self, cls, msg, pos=None):
        return cls(msg, self.i if pos is None else pos, self.text)

    def run(self):
        text = self.text
        prev = None
        pending_bond: tuple[BondOrder, str, int] | None = None
        branches: list[tuple[int, int]] = []  # (atom, position of '(')
        rings: dict[int, tuple[int, BondOrder | None, str, int]] = {}
        while self.i < len(text):
            ch = text[self.i]
            if ch == "(":
                if prev is None or pending_bond is not None:
                    raise self.error(SmilesError, "branch must follow an atom")
                branches.append((prev, self.i))
                self.i += 1
            elif ch == ")":
                if not branches:
                    raise self.error(UnbalancedBranch, "unmatched ')'")
                if pending_bond is not None:
                    raise self.error(SmilesError, "bond symbol before ')'")
                if text[self.i - 1] == "(":
                    raise self.error(SmilesError, "empty branch")
                prev = branches.pop()[0]
                self.i += 1
            elif ch in _BOND_SYMBOLS:
                if prev is None or pending_bond is not None:
                    raise self.error(SmilesError, f"unexpected bond symbol {ch!r}")
                stereo = ch if ch in "/\\" else ""
                pending_bond = (_BOND_SYMBOLS[ch], stereo, self.i)
                self.i += 1
            elif ch == ".":
                if prev is None or pending_bond is not None or branches:
                    raise self.error(SmilesError, "misplaced '.'")
                prev = None
                self.i += 1
            elif ch.isdigit() or ch == "%":
                if prev is None:
                    raise self.error(SmilesError, "ring bond must follow an atom")
                start = self.i
                if ch == "%":
                    digits = text[self.i + 1 : self.i + 3]
                    if len(digits) != 2 or not digits.isdigit():
                        raise self.error(SmilesError, "'%' must be followed by two digits")
                    num = int(digits)
                    self.i += 3
                else:
                    num = int(ch)
                    self.i += 1
                order, stereo = (pending_bond[0], pending_bond[1]) if pending_bond else (None, "")
                pending_bond = None
                if num in rings:
                    other, other_order, other_stereo, _ = rings.pop(num)
                    if order is not None and other_order is not None and order != other_order:
                        raise self.error(SmilesError, f"conflicting ring bond orders for {num}", start)
                    if other == prev:
                        raise self.error(SmilesError, "ring bond to self", start)
                    self.add_bond(other, prev, order if order is not None else other_order,
                                  stereo or other_stereo, start)
                else:
                    rings[num] = (prev, order, stereo, start)
            else:
                idx = self.read_atom()
                if prev is not None:
                    order, stereo = (pending_bond[0], pending_bond[1]) if pending_bond else (None, "")
                    self.add_bond(prev, idx, order, stereo, self.atoms[idx].pos)
                elif pending_bond is not None:
                    raise self.error(SmilesError, "bond without a preceding atom")
                pending_bond = None
                prev = idx
        if pending_bond is not None:
            raise self.error(SmilesError, "dangling bond symbol at end", pending_bond[2])
        if branches:
            raise self.error(UnbalancedBranch, "unclosed '('", len(text))
        if rings:
            num, (_, _, _, pos) = next(iter(rings.items()))
            raise self.error(UnclosedRingBond, f"ring bond {num} never closed", pos)
        return self.build()

    def add_bond(self, a, b, order, stereo, pos):
        key = frozenset((a, b))
        if key in self.bonded:
            raise self.error(SmilesError, "duplicate bond between the same atoms", pos)
        self.bonded.add(key)
        self.bonds.append((a, b, order, stereo))

    def read_atom(self) -> int:
        text, pos = self.text, self.i
        ch = text[pos]
        if ch == "[":
            return self.read_bracket()
        if ch == ATTACHMENT:
            if not self.allow_attachment:
                raise self.error(UnknownElement, "wildcard '*' atoms are not supported")
            self.i += 1
            draft = _AtomDraft(ATTACHMENT, False, pos, bracket=True, hcount=0)
        elif text.startswith(("Cl", "Br"), pos):
            self.i += 2
            draft = _AtomDraft(text[pos : pos + 2], False, pos)
        elif ch in ORGANIC_SUBSET:
            self.i += 1
            draft = _AtomDraft(ch, False, pos)
        elif ch in AROMATIC_ORGANIC:
            self.i += 1
            draft = _AtomDraft(ch.upper(), True, pos)
        else:
            if ch.isalpha():
                raise self.error(UnknownElement, f"unknown or non-organic element {ch!r} outside brackets")
            raise self.error(SmilesError, f"unexpected character {ch!r}")
        self.atoms.append(draft)
        return len(self.atoms) - 1

    def read_bracket(self) -> int:
        text = self.text
        start = self.i
        end = text.find("]", start)
        if end == -1:
            raise self.error(SmilesError, "unterminated bracket atom")
        body = text[start + 1 : end]
        j = 0
        if body[:1].isdigit():
            raise self.error(SmilesError, "isotopes are not supported", start + 1)
        if body.startswith(ATTACHMENT):
            if not self.allow_attachment:
                raise self.error(UnknownElement, "wildcard '*' atoms are not supported", start + 1)
            element, aromatic, j = ATTACHMENT, False, 1
        else:
            element = aromatic = None
            for size in (2, 1):
                cand = body[:size]
                if len(cand) == size and cand in _BRACKET_AROMATIC:
                    element, aromatic, j = cand.capitalize(), True, size
                    break
                if len(cand) == size and cand in ELEMENTS:
                    element, aromatic, j = cand, False, size
                    break
            if element is None:
                raise self.error(UnknownElement, f"unknown element in [{body}]", start + 1)
        chirality = ""
        if body[j : j + 2] == "@@":
            chirality, j = "@@", j + 2
        elif body[j : j + 1] == "@":
            chirality, j = "@", j + 1
        hcount = 0
        if body[j : j + 1] == "H":
            j += 1
            k = j
            while k < len(body) and body[k].isdigit():
                k += 1
            hcount = int(body[j:k]) if k > j else 1
            j = k
        charge = 0
        if body[j : j + 1] in ("+", "-"):
            sign = 1 if body[j] == "+" else -1
            k = j + 1
            while k < len(body) and body[k] == body[j]:
                k += 1
            if k > j + 1:
                charge = sign * (k - j)
            else:
                m = k
                while m < len(body) and body[m].isdigit():
                    m += 1
                charge = sign * (int(body[k:m]) if m > k else 1)
                k = m
            j = k
        if j != len(body):
            raise self.error(SmilesError, f"unsupported bracket atom content [{body}]", start + 1 + j)
        self.i = end + 1
        self.atoms.append(
            _AtomDraft(element, aromatic, start, bracket=True, charge=charge,
                       hcount=hcount, chirality=chirality)
        )
        return len(self.atoms) - 1

    def build(self) -> Molecule:
        bonds = []
        for a, b, order, stereo in self.bonds:
            if order is None:
                both_aromatic = self.atoms[a].aromatic and self.atoms[b].aromatic
                order = BondOrder.AROMATIC if both_aromatic else BondOrder.SINGLE
            bonds.append(Bond(a, b, order, stereo))
        skeleton = Molecule(tuple(Atom(d.element, aromatic=d.aromatic) for d in self.atoms), tuple(bonds))
        # an aromatic-implied bond outside any ring (biphenyl-style) is single
        ring = skeleton.ring_bonds
        bonds = [
            Bond(b.begin, b.end, BondOrder.SINGLE, b.stereo)
            if b.order is BondOrder.AROMATIC and k not in ring else b
            for k, b in enumerate(bonds)
        ]
        skeleton = Molecule(skeleton.atoms, tuple(bonds))
        atoms = []
        for idx, d in enumerate(self.atoms):
            if d.aromatic and not skeleton.in_ring(idx):
                raise self.error(SmilesError, "aromatic atom outside a ring", d.pos)
            if d.bracket:
                hcount = d.hcount
            else:
                try:
                    hcount = implicit_hcount(d.element, d.aromatic, skeleton.bond_valence(idx))
                except ValueError as exc:
                    raise self.error(ValenceViolation, str(exc), d.pos) from None
            atoms.append(Atom(d.element, d.charge, hcount, d.aromatic, d.bracket, d.chirality))
        mol = Molecule(tuple(atoms), tuple(bonds), self.text)
        for idx, atom in enumerate(atoms):
            check_valence(mol, idx, atom, self.atoms[idx].pos)
        return mol


def _read(text: str, allow_attachment: bool) -> Molecule:
    if not isinstance(text, str) or not text:
        raise SmilesError("SMILES must be a non-empty string", 0, text)
    if not text.isascii():
        bad = next(i for i, c in enumerate(text) if not c.isascii())
        raise SmilesError("SMILES must be ASCII", bad, text)
    text = text.strip()
    if not text or any(c.isspace() for c in text):
        raise SmilesError("whitespace inside SMILES", 0, text)
    return _Reader(text, allow_attachment).run()


def parse_smiles(text: str, *, allow_attachment: bool = False) -> Molecule:
    """Parse a single-component SMILES string into a :class:`Molecule`.

    Dot-separated (multi-component) input raises MultipleComponents; use
    :func:`split_components` to get the fragments instead.
    """
    mol = _read(text, allow_attachment)
    if len(mol.components) > 1:
        raise MultipleComponents(
            f"{len(mol.components)} disconnected components", text.find("."), text
        )
    return mol


def split_components(text: str) -> list[Molecule]:
    """Parse a possibly multi-component SMILES and return one molecule per fragment."""
    mol = _read(text, False)
    out = []
    for comp in mol.components:
        sub, _ = mol.subgraph(comp)
        out.append(Molecule(sub.atoms, sub.bonds, text))
    return out
