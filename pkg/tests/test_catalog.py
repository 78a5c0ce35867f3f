import pytest

from rostchow.catalog import (
    BUNDLED, CatalogError, ENV_VAR, load, load_catalog, parse_catalog, rost_entry, spin_entry,
    validate_catalog, validate_degrees,
)
from rostchow.catalog.model import expression_degree, parse_ideal_generator, parse_terms
from rostchow.omega import augmentation_quotient

MINIMAL = """# demo
[entry Spin_7 p=2]
gen y6 deg=6 h=2 alias=y1
res (2,v1)y6
class c2 deg=4 -> v1*y6
"""


def test_bundled_catalog_size_and_groups(cat):
    assert len(cat) >= 12
    keys = {e.key for e in cat}
    for k in [("Spin_7", 2), ("Spin_11", 2), ("Spin_13", 2), ("Spin_15", 2), ("Spin_17", 2), ("Spin_19", 2),
              ("Spin_21", 2), ("E_7", 2), ("E_7", 3), ("E_8", 2), ("E_8", 3), ("E_8", 5), ("R_2(R)", 2), ("R_4", 2)]:
        assert k in keys


def test_round_trip_is_byte_exact(cat):
    assert cat.dump() == BUNDLED.read_text(encoding="utf-8")
    assert parse_catalog(MINIMAL).dump() == MINIMAL
    spaced = "# a\n\n\n[entry pt p=2]\nchow 0: free=1 tors=- names=1\n\n[entry pt p=3]\n# note\n\n"
    assert parse_catalog(spaced).dump() == spaced
    assert parse_catalog("[entry pt p=5]").dump() == "[entry pt p=5]"


def test_empty_file(tmp_path):
    f = tmp_path / "empty.txt"
    f.write_text("")
    assert load(f) == []


@pytest.mark.parametrize("text,needle", [
    (MINIMAL + "class c2 deg=4 -> v1*y6\n", "duplicate class"),
    ("[entry X p=2]\ngen y deg=6 h=2 colour=red\n", "unknown field"),
    ("[entry X p=2]\nfrobnicate y\n", "unknown line type"),
    ("gen y deg=6 h=2\n", "before the first"),
    ("[entry X p=7]\n", "unsupported prime"),
    ("[entry X p=2]\n[entry X p=2]\n", "duplicate entry"),
    ("[entry X p=2]\nflag shiny\n", "unknown flag"),
    ("[entry X p=2]\nchow 4: free=1 tors=2 names=a\n", "number of names"),
    ("[entry X p=2]\nedge Y labels=- convention=sideways\n", "unknown convention"),
])
def test_parse_errors_carry_line_numbers(text, needle):
    with pytest.raises(CatalogError) as info:
        parse_catalog(text)
    assert needle in str(info.value)
    assert info.value.line is not None and str(info.value).startswith("line ")


def test_expression_parsing():
    assert parse_terms("2*v1*y6 - y10") == [(2, [("v1", 1), ("y6", 1)]), (-1, [("y10", 1)])]
    assert parse_ideal_generator("3v1^2") == (3, (2,))
    assert parse_ideal_generator("v3") == (1, (0, 0, 1))
    assert expression_degree("v1^2*y6*y10", {"y6": 6, "y10": 10}, 2) == 12
    assert expression_degree("v1*y", {"y": 12}, 5) == 4
    with pytest.raises(CatalogError):
        expression_degree("y6 + y10", {"y6": 6, "y10": 10}, 2)
    with pytest.raises(CatalogError):
        parse_ideal_generator("y6")


def test_validate_examples(cat):
    rep = validate_degrees(cat.get("Spin_7", 2))
    c2 = [i for i in rep.items if i.item == "class c2 -> v1*y6"][0]
    assert c2.ok and c2.expected == c2.found == 4
    rep = validate_degrees(cat.get("Spin_11", 2), cat)
    bad = {i.item: (i.expected, i.found) for i in rep.flagged}
    assert bad == {"class c3 -> 2*y2": (6, 10), "class c4 -> v1*y3": (8, 16)}
    corrected = [i for i in rep.items if "(corrected)" in i.item]
    assert len(corrected) == 2 and all(i.ok for i in corrected)


def test_validator_flags_exactly_known_lines(cat):
    rep = validate_catalog(cat)
    assert not rep.unexpected
    flagged = {(i.entry, i.item) for i in rep.flagged}
    known = {(e.label, f"class {c.name} -> {c.image}") for e in cat for c in e.classes if c.known_inconsistent}
    assert flagged == known
    assert validate_catalog(cat).to_json() == rep.to_json()   # deterministic


def test_validator_catches_planted_error():
    c = parse_catalog(MINIMAL.replace("class c2 deg=4", "class c2 deg=6"))
    rep = validate_catalog(c)
    assert [(i.expected, i.found) for i in rep.flagged] == [(6, 4)]
    assert rep.unexpected


def test_bidegrees_follow_chow_degree(cat):
    e = cat.get("R_2(R)", 2)
    assert {b.cls: b.motivic for b in e.bidegrees} == {"1": (0, 0), "c2": (4, 2), "c3": (6, 3)}
    assert all(i.ok for i in validate_degrees(e).items if i.item.startswith("bideg"))


@pytest.mark.parametrize("ell,target,labels", [(8, "Spin_15", ()), (6, "Spin_11", ("y12",)), (3, "Spin_5", ("y6",)),
                                               (5, "Spin_9", ("y10",)), (9, "Spin_17", ("y18",)), (10, "Spin_19", ("y20",))])
def test_spin_entry_edges(cat, ell, target, labels):
    e = spin_entry(ell, cat)
    assert e.edges[0].target == target and e.edges[0].labels == labels


def test_spin_entry_contents(cat):
    e = spin_entry(3, cat)
    assert e.presentation().names == ["y6"] and e.res_complete
    assert augmentation_quotient(e.res_module()).pieces == cat.get("Spin_7", 2).expected_chow().pieces
    assert not spin_entry(12, cat).res_complete
    assert spin_entry(12, cat).presentation().names == ["y6", "y10", "y12", "y14", "y18", "y20", "y22", "y24"]


def test_rost_entries_match_catalog(cat):
    for (n, p), key in [((4, 2), ("R_4", 2)), ((2, 5), ("E_8", 5)), ((2, 2), ("Spin_7", 2))]:
        r, e = rost_entry(n, p), cat.get(*key)
        assert r.presentation().degrees == e.presentation().degrees
        assert augmentation_quotient(r.res_module()).pieces == augmentation_quotient(e.res_module()).pieces


def test_expected_chow_matches_quotient_on_complete_entries(cat):
    for e in cat:
        if not e.res_lines or not e.res_complete or not e.chow_lines:
            continue
        q = augmentation_quotient(e.res_module())
        exp = e.expected_chow()
        if e.inclusion_only:
            assert all(exp.p_rank(d) <= q.p_rank(d) for d in exp.degrees()), e.label
        else:
            assert q.total_p_rank() == exp.total_p_rank(), e.label
            assert q.pieces == exp.pieces, e.label


def test_inclusion_list_sizes(cat):
    assert sum(cat.get("E_8", 3).expected_chow().p_rank(d) for d in range(60)) == 18
    assert len(cat.get("E_8", 3).classes) == 17


def test_named_classes_lie_in_their_modules(cat):
    from rostchow.omega import contains
    for e in cat:
        if not e.res_complete or not e.res_lines:
            continue
        M = e.res_module()
        for c in e.classes:
            assert contains(M, e.parse_omega(c.working_image, ambient=M.ambient)), (e.label, c.name)


def test_env_var_selects_catalog(tmp_path, monkeypatch):
    f = tmp_path / "mini.txt"
    f.write_text(MINIMAL)
    monkeypatch.setenv(ENV_VAR, str(f))
    assert [e.group for e in load_catalog()] == ["Spin_7"]
