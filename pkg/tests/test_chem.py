import random

import pytest
from hypothesis import given, strategies as st

from aminescreen.chem import canonical_key, classify_amines, parse_smiles, split_components, to_smiles
from aminescreen.chem.molecule import BondOrder
from aminescreen.errors import (MultipleComponents, UnbalancedBranch, UnclosedRingBond, UnknownElement,
                                ValenceViolation)

from conftest import random_smiles


def test_ethanol_hydrogens():
    m = parse_smiles("CCO")
    assert m.heavy_atom_count() == 3
    assert len(m.bonds) == 2
    assert all(b.order is BondOrder.SINGLE for b in m.bonds)
    assert [a.hcount for a in m.atoms] == [3, 2, 1]


def test_mea_nitrogen_hydrogens():
    m = parse_smiles("NCCO")
    assert m.heavy_atom_count() == 4
    assert m.atoms[0].element == "N" and m.atoms[0].hcount == 2


@pytest.mark.parametrize("text, err, pos", [
    ("C(C", UnbalancedBranch, 3),
    ("C1CC", UnclosedRingBond, 1),
    ("CXC", UnknownElement, 1),
    ("C(C)(C)(C)(C)C", ValenceViolation, 0),
    ("CC.O", MultipleComponents, 2),
])
def test_parse_errors_name_position(text, err, pos):
    with pytest.raises(err) as exc:
        parse_smiles(text)
    assert exc.value.position == pos
    assert "position" in str(exc.value)


def test_grammar_subset():
    m = parse_smiles("[NH3+]CC(=O)[O-]")
    assert [a.charge for a in m.atoms if a.charge] == [1, -1]
    m = parse_smiles("c1ccccc1N")
    assert sum(a.aromatic for a in m.atoms) == 6
    m = parse_smiles("C%12CCCC%12")
    assert len(m.ring_bonds) == 5
    m = parse_smiles("N[C@@H](C)C(=O)O")
    assert m.atoms[1].chirality == "@@"
    m = parse_smiles("C/C=C/C")
    assert sum(1 for b in m.bonds if b.stereo) == 2
    assert parse_smiles("C#N").bonds[0].order is BondOrder.TRIPLE
    assert parse_smiles("ClCBr").atoms[0].element == "Cl"


def test_split_components():
    parts = split_components("CC.O")
    assert [p.heavy_atom_count() for p in parts] == [2, 1]


@pytest.mark.parametrize("a, b", [("CCO", "OCC"), ("NCCO", "OCCN"), ("C1CCCCC1N", "NC1CCCCC1"),
                                  ("OCCN(C)CCO", "CN(CCO)CCO"), ("C1CNCCN1", "N1CCNCC1")])
def test_canonical_key_equal(a, b):
    assert canonical_key(parse_smiles(a)) == canonical_key(parse_smiles(b))


@pytest.mark.parametrize("a, b", [("CCO", "COC"), ("NCCO", "NC(C)O"), ("C1CCCCC1", "C1CCCC1C")])
def test_canonical_key_distinct(a, b):
    assert canonical_key(parse_smiles(a)) != canonical_key(parse_smiles(b))


def test_stereo_ignored_in_key():
    assert canonical_key(parse_smiles("N[C@@H](C)O")) == canonical_key(parse_smiles("N[C@H](C)O"))


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_key_invariant_under_rerendering(seed, shuffle):
    smi = random_smiles(random.Random(seed))
    m = parse_smiles(smi)
    other = to_smiles(m, shuffle)
    assert canonical_key(parse_smiles(other)) == canonical_key(m)
    # the key is itself a SMILES that parses back to the same key
    assert canonical_key(parse_smiles(canonical_key(m))) == canonical_key(m)


def test_key_matches_networkx_isomorphism():
    nx = pytest.importorskip("networkx")
    from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match

    def graph(m):
        g = nx.Graph()
        for i, a in enumerate(m.atoms):
            g.add_node(i, label=(a.element, a.charge, a.hcount, a.aromatic))
        for b in m.bonds:
            g.add_edge(b.begin, b.end, order=int(b.order))
        return g

    r = random.Random(7)
    mols = [parse_smiles(random_smiles(r, 6)) for _ in range(60)]
    for i in range(len(mols)):
        for j in range(i + 1, len(mols)):
            same = nx.is_isomorphic(graph(mols[i]), graph(mols[j]), node_match=categorical_node_match("label", None),
                                    edge_match=categorical_edge_match("order", None))
            assert same == (canonical_key(mols[i]) == canonical_key(mols[j]))


def test_key_matches_rdkit_canonical():
    Chem = pytest.importorskip("rdkit.Chem")
    r = random.Random(11)
    smis = [random_smiles(r, 7) for _ in range(150)]
    ours, theirs = {}, {}
    for s in smis:
        ours.setdefault(canonical_key(parse_smiles(s)), set()).add(s)
        theirs.setdefault(Chem.MolToSmiles(Chem.MolFromSmiles(s)), set()).add(s)
    assert sorted(map(sorted, ours.values())) == sorted(map(sorted, theirs.values()))


@pytest.mark.parametrize("smi, expected", [
    ("NCCO", dict(n_primary=1)),
    ("OCCN(C)CCO", dict(n_tertiary=1)),
    ("C1CNCCN1", dict(n_secondary=2)),
    ("CC(N)=O", dict(n_amide_N=1)),
    ("c1ccncc1", dict(n_aromatic_N=1)),
    ("CC#N", dict(n_other_N=1)),
    ("C[N+](C)(C)C", dict(n_other_N=1)),
])
def test_classify(smi, expected):
    prof = classify_amines(parse_smiles(smi))
    for k in ("n_primary", "n_secondary", "n_tertiary", "n_aromatic_N", "n_amide_N", "n_other_N"):
        assert getattr(prof, k) == expected.get(k, 0), k


def test_amidine_is_tertiary_like():
    prof = classify_amines(parse_smiles("C1CC2=NCCCN2C1"))  # DBN
    assert prof.n_other_N == 2 and prof.n_amidine_N == 2
    assert prof.n_tertiary_like == 1
    assert prof.n_primary == prof.n_secondary == prof.n_tertiary == 0


def test_amide_never_counted_as_amine():
    prof = classify_amines(parse_smiles("NC(=O)CCN"))
    assert prof.n_amide_N == 1 and prof.n_primary == 1


@given(st.integers(0, 10**6))
def test_classification_exhaustive(seed):
    m = parse_smiles(random_smiles(random.Random(seed), 10))
    prof = classify_amines(m)
    assert prof.total_N == sum(1 for a in m.atoms if a.element == "N")


def test_shipped_dataset_parses_uniquely():
    from aminescreen.cli.ingest import ingest
    res = ingest()
    assert len(res.records) == 130
    assert len({r.key for r in res.records}) == 130
    assert not res.diagnostics
