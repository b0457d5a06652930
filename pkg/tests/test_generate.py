import random

import pytest

from aminescreen.chem import parse_smiles
from aminescreen.chem.canon import canonical_key, to_smiles
from aminescreen.errors import SmilesError
from aminescreen.generate import (
    FilterThresholds, TransformRule, apply_rules, extract_rules, filter_candidates,
    load_property_table, load_rules, save_rules, single_cuts,
)
from conftest import random_smiles

P = parse_smiles
SUBSTITUENTS = ["O", "N", "Cl", "F", "C", "CC", "OC", "C(=O)O", "NC", "C#N", "S", "Br"]


def family(rng, size=None):
    """A random core carrying 2-4 different substituents at the same atom."""
    while True:
        core = random_smiles(rng, 6)
        subs = rng.sample(SUBSTITUENTS, size or rng.randint(2, 4))
        try:
            mols = [P(core + s) for s in subs]
        except SmilesError:
            continue
        if len({canonical_key(m) for m in mols}) == len(mols):
            return mols


def keys(cands):
    return [c.key for c in cands]


def test_ethanol_ethylamine_rule():
    rules = extract_rules([P("CCO"), P("CCN")])
    hydroxyl = [r for r in rules if r.lhs == "*O" and r.rhs == "*N"]
    assert len(hydroxyl) == 1
    r = hydroxyl[0]
    assert r.support == 1
    # rooted at the cut: the anchor is a CH2 bonded to one more carbon
    assert "C[h2]" in r.environment_key


def test_propanol_to_propylamine():
    rules = extract_rules([P("CCO"), P("CCN")])
    out = apply_rules(P("CCCO"), rules)
    assert keys(out) == [canonical_key(P("CCCN"))]
    assert out[0].parent_key == canonical_key(P("CCCO"))
    assert rules[out[0].rule_id].lhs == "*O"


def test_identical_pair_gives_no_rules():
    assert extract_rules([P("CCO"), P("OCC")]) == []


def test_single_molecule_gives_no_rules():
    assert extract_rules([P("C")]) == []


def test_no_matching_environment():
    rules = extract_rules([P("CCO"), P("CCN")])
    # phenol's hydroxyl sits on an aromatic carbon, not a CH2
    assert apply_rules(P("c1ccccc1O"), rules) == []


def test_rules_are_bidirectional_with_shared_support():
    rules = extract_rules([P("CCO"), P("CCN"), P("CCCO"), P("CCCN")])
    by_key = {r.key: r for r in rules}
    for r in rules:
        assert by_key[(r.rhs, r.lhs, r.environment_key)].support == r.support
    assert rules == sorted(rules, key=lambda r: (-r.support, r.lhs, r.rhs, r.environment_key))


def test_explicit_pairs_restrict_mining():
    mols = [P("CCO"), P("CCN"), P("CCCl")]
    rules = extract_rules([(mols[0], mols[1])])
    assert {(r.lhs, r.rhs) for r in rules if len(r.lhs) == 2} == {("*O", "*N"), ("*N", "*O")}


def test_cuts_skip_ring_and_multiple_bonds():
    m = P("C1CC1C=O")
    for cut in single_cuts(m):
        assert cut.core.heavy_atom_count() + P(cut.fragment_key, allow_attachment=True).heavy_atom_count() \
            == m.heavy_atom_count()
    # one acyclic single bond, two orientations
    assert len(single_cuts(m)) == 2


def test_env_radius_bounds():
    with pytest.raises(ValueError):
        single_cuts(P("CCO"), env_radius=4)
    rules = extract_rules([P("CCO"), P("CCN")], env_radius=2)
    with pytest.raises(ValueError):
        apply_rules(P("CCCO"), rules, env_radius=1)


def test_larger_radius_is_more_specific():
    rules1 = extract_rules([P("CCO"), P("CCN")], env_radius=1)
    rules2 = extract_rules([P("CCO"), P("CCN")], env_radius=2)
    # butanol matches the CH2 anchor at radius 1 but not the ethyl context at radius 2
    assert canonical_key(P("CCCCN")) in keys(apply_rules(P("CCCCO"), rules1))
    assert canonical_key(P("CCCCN")) not in keys(apply_rules(P("CCCCO"), rules2, env_radius=2))


def test_rule_invariants():
    with pytest.raises(ValueError):
        TransformRule("*O", "*O", "x")
    with pytest.raises(ValueError):
        TransformRule("*O", "N", "x")


@pytest.mark.parametrize("seed", range(100))
def test_closure_over_random_families(seed):
    rng = random.Random(seed)
    mols = family(rng)
    rules = extract_rules(mols)
    for a in mols:
        cands = apply_rules(a, rules)
        got = set(keys(cands))
        for b in mols:
            if b is not a:
                assert canonical_key(b) in got
        for c in cands:
            again = P(to_smiles(c.molecule))
            again.validate()
            assert canonical_key(again) == c.key


@pytest.mark.parametrize("seed", range(20))
def test_closure_from_the_pair_alone(seed):
    a, b = family(random.Random(1000 + seed), size=2)
    assert canonical_key(b) in keys(apply_rules(a, extract_rules([(a, b)])))


def test_candidates_are_unique_and_exclude_parent():
    mols = family(random.Random(5), size=4)
    rules = extract_rules(mols + [P("CCO"), P("CCN"), P("CCCl")])
    for m in mols:
        ks = keys(apply_rules(m, rules))
        assert len(ks) == len(set(ks))
        assert canonical_key(m) not in ks


def test_determinism():
    mols = family(random.Random(9), size=4)
    shuffled = list(reversed(mols))
    r1, r2 = extract_rules(mols), extract_rules(shuffled)
    assert r1 == r2
    assert keys(apply_rules(mols[0], r1)) == keys(apply_rules(mols[0], r2))


def test_rules_file_round_trip(tmp_path):
    rules = extract_rules([P("CCO"), P("CCN"), P("CCCO")])
    save_rules(rules, tmp_path / "rules.csv")
    assert load_rules(tmp_path / "rules.csv") == rules


def test_rules_file_version_checks(tmp_path):
    p = tmp_path / "rules.csv"
    p.write_text("lhs,rhs\n")
    with pytest.raises(ValueError):
        load_rules(p)
    p.write_text("# aminescreen rules v99\nlhs,rhs,environment_key,support\n")
    with pytest.raises(ValueError):
        load_rules(p)


# -- filters -----------------------------------------------------------------

def cands_for(parent, *children):
    rules = extract_rules([P(parent)] + [P(c) for c in children])
    return apply_rules(P(parent), rules)


def test_duplicate_candidates_collapse():
    c = cands_for("CCO", "CCN")
    out = filter_candidates(c + c)
    assert keys(out) == keys(c)


def test_existing_dataset_key_removed():
    c = cands_for("CCCO", "CCCN", "CCCCl")
    known = {canonical_key(P("CCCN"))}
    out = filter_candidates(c, dedupe_against=known)
    assert canonical_key(P("CCCN")) not in keys(out)
    assert all(x.filter_flags["not_duplicate"] == "pass" for x in out)


def test_toxicity_threshold():
    c = cands_for("CCO", "CCN")
    key = c[0].key
    table = {key: {"water_solubility": 0.5, "pKb": 4.0, "LD50": 50.0}}
    assert filter_candidates(c, property_table=table) == []
    assert c[0].filter_flags["toxicity"] == "fail"
    assert c[0].filter_flags["basicity"] == "pass"
    table[key]["LD50"] = 900.0
    assert keys(filter_candidates(c, property_table=table, strict=True)) == [key]


def test_unknown_properties_kept_unless_strict():
    c = cands_for("CCO", "CCN")
    assert len(filter_candidates(c)) == 1
    assert c[0].filter_flags["solubility"] == "unknown"
    assert filter_candidates(c, strict=True) == []


def test_custom_thresholds():
    c = cands_for("CCO", "CCN")
    table = {c[0].key: {"water_solubility": 0.5, "pKb": 4.0, "LD50": 900.0}}
    assert filter_candidates(c, property_table=table, thresholds=FilterThresholds(pKb=3.0)) == []
    assert c[0].filter_flags["basicity"] == "fail"


def test_property_table_by_smiles(tmp_path):
    p = tmp_path / "props.csv"
    p.write_text("smiles,water_solubility,pKb,LD50\nNCC,0.5,3.4,\n")
    table = load_property_table(p)
    assert table == {canonical_key(P("CCN")): {"water_solubility": 0.5, "pKb": 3.4, "LD50": None}}
    p.write_text("name,pKb\nx,1\n")
    with pytest.raises(ValueError):
        load_property_table(p)
