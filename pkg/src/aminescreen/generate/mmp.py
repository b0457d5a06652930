"""Single-cut matched molecular pairs: rule mining and application."""

from __future__ import annotations

import csv
import itertools
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from ..chem.canon import canonical_key
from ..chem.molecule import ATTACHMENT, Atom, Bond, BondOrder, Molecule
from ..chem.smiles import parse_smiles
from ..errors import AmineScreenError
from ..fingerprint.fragments import environment_key

RULES_FORMAT_VERSION = 1
DEFAULT_ENV_RADIUS = 1
MAX_ENV_RADIUS = 3


@dataclass(frozen=True)
class TransformRule:
    """Replace fragment ``lhs`` by ``rhs`` where the core anchor has ``environment_key``.

    Fragments are canonical SMILES with one ``*`` marking the attachment.
    """

    lhs: str
    rhs: str
    environment_key: str
    support: int = 1
    env_radius: int = DEFAULT_ENV_RADIUS
    cut_count: int = 1  # multi-cut rules would raise this

    def __post_init__(self):
        if self.lhs == self.rhs:
            raise ValueError("rule with identical sides")
        for side in (self.lhs, self.rhs):
            if side.count(ATTACHMENT) != 1:
                raise ValueError(f"fragment {side!r} needs exactly one attachment point")

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.lhs, self.rhs, self.environment_key)


@dataclass(frozen=True)
class Cut:
    core: Molecule
    core_key: str
    fragment_key: str
    anchor: int  # core atom bonded to the attachment
    environment: str


@dataclass
class Candidate:
    molecule: Molecule
    key: str
    parent_key: str
    rule_id: int
    filter_flags: dict = field(default_factory=dict)
    properties: dict | None = None


def _with_attachment(mol: Molecule, keep: Sequence[int], inside: int, outside: int):
    """Subgraph on ``keep`` plus a ``*`` where the bond inside-outside was cut."""
    sub, old = mol.subgraph(keep)
    anchor = old.index(inside)
    star = len(sub.atoms)
    atoms = sub.atoms + (Atom(ATTACHMENT),)
    bonds = sub.bonds + (Bond(anchor, star, BondOrder.SINGLE),)
    return Molecule(atoms, bonds), anchor, star


def _side(mol: Molecule, start: int, blocked: int) -> list[int]:
    seen = {start}
    stack = [start]
    while stack:
        a = stack.pop()
        for j, _ in mol.neighbors[a]:
            if j not in seen and not (a == start and j == blocked):
                seen.add(j)
                stack.append(j)
    return sorted(seen)


def single_cuts(mol: Molecule, env_radius: int = DEFAULT_ENV_RADIUS) -> list[Cut]:
    """Every (core, fragment) split across an acyclic single bond, both orientations."""
    if not 0 <= env_radius <= MAX_ENV_RADIUS:
        raise ValueError(f"env_radius must be in [0, {MAX_ENV_RADIUS}]")
    cuts = []
    ring = mol.ring_bonds
    for k, bond in enumerate(mol.bonds):
        if k in ring or bond.order is not BondOrder.SINGLE:
            continue
        if mol.atoms[bond.begin].is_attachment or mol.atoms[bond.end].is_attachment:
            continue
        a_side = _side(mol, bond.begin, bond.end)
        b_side = _side(mol, bond.end, bond.begin)
        for core_atoms, frag_atoms, c_in, f_in in (
            (a_side, b_side, bond.begin, bond.end),
            (b_side, a_side, bond.end, bond.begin),
        ):
            core, anchor, star = _with_attachment(mol, core_atoms, c_in, f_in)
            frag, _, _ = _with_attachment(mol, frag_atoms, f_in, c_in)
            # rooted at the attachment: radius 1 is the anchor atom type
            cuts.append(Cut(core, canonical_key(core), canonical_key(frag), anchor,
                            environment_key(core, star, env_radius)))
    return cuts


def _unique(molecules: Iterable[Molecule]) -> dict[str, Molecule]:
    out: dict[str, Molecule] = {}
    for m in molecules:
        out.setdefault(canonical_key(m), m)
    return out


def extract_rules(molecules, env_radius: int = DEFAULT_ENV_RADIUS) -> list[TransformRule]:
    """Mine single-cut rules from a set of molecules or from explicit pairs.

    ``molecules`` is either molecules (every two sharing a core form a pair)
    or ``(A, B)`` tuples (only those pairs are compared).  Each rule is
    stored in both directions; support counts distinct source pairs.
    Sorted by descending support, then lexically.
    """
    items = list(molecules)
    if items and isinstance(items[0], tuple):
        pairs = [(canonical_key(a), canonical_key(b)) for a, b in items]
        mols = _unique(m for pair in items for m in pair)
    else:
        mols = _unique(items)
        pairs = None
    cuts = {key: single_cuts(m, env_radius) for key, m in mols.items()}
    # core key -> [(molecule key, fragment key, environment)]
    by_core: dict[str, list[tuple[str, str, str]]] = defaultdict(list)
    for key, cs in cuts.items():
        for c in cs:
            by_core[c.core_key].append((key, c.fragment_key, c.environment))
    wanted = None if pairs is None else {tuple(sorted(p)) for p in pairs}
    sources: dict[tuple[str, str, str], set] = defaultdict(set)
    for entries in by_core.values():
        for (ka, fa, ea), (kb, fb, eb) in itertools.combinations(entries, 2):
            if ka == kb or fa == fb or ea != eb:
                continue
            pair = tuple(sorted((ka, kb)))
            if wanted is not None and pair not in wanted:
                continue
            sources[(fa, fb, ea)].add(pair)
            sources[(fb, fa, ea)].add(pair)
    rules = [TransformRule(lhs, rhs, env, len(src), env_radius)
             for (lhs, rhs, env), src in sources.items()]
    rules.sort(key=lambda r: (-r.support, r.lhs, r.rhs, r.environment_key))
    return rules


def graft(core: Molecule, anchor: int, fragment: Molecule) -> Molecule:
    """Join ``core`` at ``anchor`` to ``fragment`` where its ``*`` sits."""
    star_c = next(i for i, a in enumerate(core.atoms) if a.is_attachment)
    star_f = next(i for i, a in enumerate(fragment.atoms) if a.is_attachment)
    f_anchor = fragment.neighbors[star_f][0][0]
    c_keep = [i for i in range(len(core.atoms)) if i != star_c]
    f_keep = [i for i in range(len(fragment.atoms)) if i != star_f]
    c_sub, c_old = core.subgraph(c_keep)
    f_sub, f_old = fragment.subgraph(f_keep)
    shift = len(c_sub.atoms)
    f_bonds = tuple(replace(b, begin=b.begin + shift, end=b.end + shift) for b in f_sub.bonds)
    link = Bond(c_old.index(anchor), f_old.index(f_anchor) + shift, BondOrder.SINGLE)
    return Molecule(c_sub.atoms + f_sub.atoms, c_sub.bonds + f_bonds + (link,))


def apply_rules(mol: Molecule, rules: Sequence[TransformRule],
                env_radius: int = DEFAULT_ENV_RADIUS) -> list[Candidate]:
    """Candidates from every rule whose lhs and environment match a cut of ``mol``.

    Invalid valences are dropped, duplicates keep the first rule that made
    them and ``mol`` itself is excluded.  Rule ids are positions in ``rules``.
    """
    if any(r.env_radius != env_radius for r in rules):
        raise ValueError("rules were mined at a different environment radius")
    index: dict[tuple[str, str], list[int]] = defaultdict(list)
    for i, r in enumerate(rules):
        index[(r.lhs, r.environment_key)].append(i)
    parent = canonical_key(mol)
    seen = {parent}
    out = []
    rhs_cache: dict[str, Molecule] = {}
    for cut in single_cuts(mol, env_radius):
        for i in index.get((cut.fragment_key, cut.environment), ()):
            rhs = rules[i].rhs
            if rhs not in rhs_cache:
                rhs_cache[rhs] = parse_smiles(rhs, allow_attachment=True)
            new = graft(cut.core, cut.anchor, rhs_cache[rhs])
            try:
                new.validate()
            except AmineScreenError:
                continue
            key = canonical_key(new)
            if key in seen:
                continue
            seen.add(key)
            out.append(Candidate(new, key, parent, i))
    return out


def save_rules(rules: Sequence[TransformRule], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# aminescreen rules v{RULES_FORMAT_VERSION}\n")
        w = csv.writer(fh)
        w.writerow(["lhs", "rhs", "environment_key", "support", "env_radius"])
        for r in rules:
            w.writerow([r.lhs, r.rhs, r.environment_key, r.support, r.env_radius])


def load_rules(path) -> list[TransformRule]:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("# aminescreen rules v"):
            raise ValueError(f"{path}: not a rules file")
        version = int(first.rsplit("v", 1)[1])
        if version > RULES_FORMAT_VERSION:
            raise ValueError(f"{path}: rules format v{version} is newer than supported")
        return [TransformRule(row["lhs"], row["rhs"], row["environment_key"], int(row["support"]),
                              int(row.get("env_radius") or DEFAULT_ENV_RADIUS))
                for row in csv.DictReader(fh)]
