import dataclasses
import json
from pathlib import Path

import jsonschema
import pytest

from rostchow.algebra import convolve, exterior, kernel_character, canonical_surjection, poincare, series_from_degrees, trim
from rostchow.catalog import Restriction, parse_catalog, spin_entry
from rostchow.decomposition import (
    FAIL, NOT_APPLICABLE, PASS, DecompositionError, DominanceSource, antecedent_check, dominance_check,
    kernel_ideal_check, kernel_tensor_relation, label_degrees, reflexive_check, spin_dominance_source,
    verify_catalog_edge, verify_chain_edge, verify_motive_restriction,
)
from rostchow.omega import IncompleteDataError

SCHEMA = json.loads((Path(__file__).parents[1] / "src/rostchow/schema/report.schema.json").read_text())


def test_every_catalog_edge_passes(cat):
    seen = 0
    for e in cat.entries:
        for edge in e.edges:
            r = verify_catalog_edge(cat, e, edge)
            assert r.verdict == PASS, (e.label, edge, r.witnesses)
            assert r.convention == edge.convention
            seen += 1
    assert seen >= 15


def test_tensor_edge_spin11_spin7(cat):
    r = verify_chain_edge(cat.get("Spin_11", 2), cat.get("Spin_7", 2), ("y10",))
    assert r.passed and r.mismatch_degree is None
    assert r.witnesses["lhs"] == r.witnesses["rhs"]


def test_wrong_label_reports_first_mismatch(cat):
    r = verify_chain_edge(cat.get("Spin_11", 2), cat.get("Spin_7", 2), ("y10", "y10"))
    assert r.verdict == FAIL
    assert r.mismatch_degree == 10


def test_missing_label_fails(cat):
    r = verify_chain_edge(cat.get("Spin_13", 2), cat.get("Spin_11", 2), ())
    assert r.verdict == FAIL


def test_bare_generator_of_lower_group_is_rejected(cat):
    with pytest.raises(DecompositionError):
        verify_chain_edge(cat.get("Spin_11", 2), cat.get("Spin_7", 2), ("y6",))


def test_power_labels_allowed_for_e8_e7(cat):
    labels = ("y6^2", "y6^4", "y10^2", "y30")
    r = verify_chain_edge(cat.get("E_8", 2), cat.get("E_7", 2), labels)
    assert r.passed
    assert [d for _, d in label_degrees(cat.get("E_8", 2), labels)] == [12, 24, 20, 30]


def test_kernel_edge_e8_e7_at_three(cat):
    upper, lower = cat.get("E_8", 3), cat.get("E_7", 3)
    edge = next(e for e in upper.edges if e.target == "E_7")
    r = verify_chain_edge(upper, lower, edge.labels, "kernel_basis")
    assert r.passed
    # independent count: the kernel character is poincare(upper) - poincare(lower)
    diff = [a - b for a, b in zip(poincare(upper.presentation()), poincare(lower.presentation()) + [0] * 200)]
    assert trim(diff) == r.witnesses["lhs"]
    assert sum(diff) == len(edge.labels)


def test_kernel_edge_with_wrong_labels_fails(cat):
    r = verify_chain_edge(cat.get("E_8", 5), cat.get("pt", 5), ("y", "y^2", "y^3"), "kernel_basis")
    assert r.verdict == FAIL


def test_unknown_convention(cat):
    with pytest.raises(DecompositionError):
        verify_chain_edge(cat.get("Spin_7", 2), cat.get("Spin_5", 2), ("y6",), "sideways")


def test_zero_label_is_rejected(cat):
    with pytest.raises(DecompositionError):
        label_degrees(cat.get("Spin_7", 2), ("y6^2",))


def test_spin11_restriction_all_pass(cat):
    rs = verify_motive_restriction(cat.get("Spin_11", 2), cat.get("Spin_7", 2), ("y10",))
    assert rs and all(r.verdict == PASS for r in rs)
    checks = {(r.check, r.witnesses.get("comparison")) for r in rs}
    assert ("restriction-image", "integral") in checks
    assert ("restriction-image", "mod 2") in checks
    assert ("character", "exact") in checks


def _with_restriction(entry, cls, expression, integral):
    items = [x for x in entry.items if not (isinstance(x, Restriction) and x.cls == cls)]
    items.append(Restriction("Spin_7", cls, expression, integral))
    return dataclasses.replace(entry, items=items)


def test_wrong_integral_restriction_is_caught(cat):
    G = _with_restriction(cat.get("Spin_11", 2), "c5", "0", True)
    rs = verify_motive_restriction(G, cat.get("Spin_7", 2), ("y10",))
    bad = [r for r in rs if r.verdict == FAIL]
    assert [r.witnesses["class"] for r in bad] == ["c5"]


def test_mod_p_comparison_ignores_even_multiples(cat):
    G = _with_restriction(cat.get("Spin_11", 2), "c5", "0", False)
    rs = verify_motive_restriction(G, cat.get("Spin_7", 2), ("y10",))
    assert all(r.passed for r in rs)


def test_restriction_needs_complete_target(cat):
    with pytest.raises(IncompleteDataError):
        verify_motive_restriction(cat.get("Spin_11", 2), cat.get("Spin_9", 2), ("y10",))


def test_restriction_needs_generator_labels(cat):
    with pytest.raises(DecompositionError):
        verify_motive_restriction(cat.get("Spin_11", 2), cat.get("Spin_7", 2), ("y10^2",))


def test_reflexive_passes_on_every_complete_entry(cat):
    checked = 0
    for e in cat.entries:
        if not e.res_complete:
            continue
        rs = reflexive_check(e)
        assert all(r.verdict == PASS for r in rs), (e.label, [r.to_json() for r in rs if not r.passed])
        checked += 1
    assert checked >= 10


def test_dominance_on_p2_entries(cat):
    for e in cat.entries:
        r = dominance_check(e)
        if e.prime == 2 and (e.spin_ell or e.group == "R_2(R)"):
            assert r.verdict == PASS, (e.label, r.witnesses)
        else:
            assert r.verdict in (PASS, NOT_APPLICABLE)


def test_spin_dominance_source_shape():
    s = spin_dominance_source(5)
    assert s.exterior_degrees == (4, 6, 8, 10)   # c2 .. c5
    assert s.poly_degree == 16              # e8 in topological degree
    ch = s.character(20)
    assert ch[0] == 1 and ch[16] >= 1


def test_dominance_violation_detected(cat):
    tiny = DominanceSource((), None, "Z/2")
    r = dominance_check(cat.get("Spin_7", 2), tiny)
    assert r.verdict == FAIL and r.witnesses["first_violation"] > 0


def test_kernel_ideal(cat):
    rs = kernel_ideal_check(cat.get("Spin_11", 2), cat.get("Spin_7", 2), ("y10",))
    assert sorted(r.witnesses["class"] for r in rs) == ["c4", "c5"]
    assert all(r.verdict == PASS for r in rs)
    rs = kernel_ideal_check(cat.get("Spin_13", 2), cat.get("Spin_11", 2), ("y12",))
    assert [r.witnesses["class"] for r in rs] == ["c6"]
    assert rs[0].verdict == PASS


def test_kernel_ideal_not_applicable_below_non_spin(cat):
    rs = kernel_ideal_check(cat.get("E_7", 2), cat.get("E_7", 2), ())
    assert rs[0].verdict == PASS
    rs = kernel_ideal_check(cat.get("R_4", 2), cat.get("pt", 2), ("y30",))
    assert rs[0].verdict == NOT_APPLICABLE


def test_antecedent_c2c4_nonzero(cat):
    r = antecedent_check(cat.get("Spin_11", 2))
    assert r.verdict == PASS and r.witnesses["nonzero_mod_p"]


def test_kernel_tensor_relation_matches_kernel_character(cat):
    upper, lower = cat.get("Spin_11", 2), cat.get("Spin_7", 2)
    degs = kernel_tensor_relation(upper, lower, ("y10",))
    ker = kernel_character(canonical_surjection(upper.presentation(), lower.presentation()))
    assert trim(series_from_degrees(degs, len(ker) - 1)) == trim(ker)


def test_spin_entries_edges_agree_with_catalog(cat):
    for ell in range(3, 11):
        e = spin_entry(ell, cat)
        lower = spin_entry(ell - 1, cat)
        (edge,) = e.edges
        assert verify_chain_edge(e, lower, edge.labels).passed


def test_results_validate_against_schema(cat):
    results = [verify_catalog_edge(cat, cat.get("Spin_7", 2), cat.get("Spin_7", 2).edges[0])]
    results += verify_motive_restriction(cat.get("Spin_11", 2), cat.get("Spin_7", 2), ("y10",))
    results.append(dominance_check(cat.get("E_8", 2)))
    doc = {"schema_version": "1", "command": "test", "status": "pass", "catalog": "bundled",
           "results": [r.to_json() for r in results]}
    jsonschema.validate(json.loads(json.dumps(doc)), SCHEMA)
