import pytest
from hypothesis import given, settings, strategies as st

from rostchow.algebra import poincare, trim
from rostchow.spectral import (
    DifferentialError, F2Space, d_squared_violations, PageDifferential, SpectralError, certify, e2_page, parse_e2, preimage,
    real_character, real_fiber, run_real, run_to_stable, turn_page, window_dims,
)


def test_e2_dimensions():
    page = e2_page({"y6": 6}, smax=10)
    assert page.dim(0, 0) == page.dim(3, 6) == 1
    assert page.dim(0, 3) == 0 and page.dim(11, 0) == 0
    assert page.total_dims(12) == [1] * 6 + [2] * 5 + [1] * 2
    page = e2_page({"a": 2, "b": 2}, smax=0)
    assert page.dim(0, 2) == 2 and page.dim(0, 4) == 1


def test_f2_space_and_preimage():
    S = F2Space([0b011, 0b110])
    assert S.dim == 2 and 0b101 in S and 0b001 not in S
    # map e0 -> 1, e1 -> 1, e2 -> 0 into F_2; kernel is span(e0+e1, e2)
    ker = F2Space(preimage([1, 2, 4], [1, 1, 0], F2Space()))
    assert ker.dim == 2 and 0b011 in ker and 0b100 in ker


def test_parse_e2():
    E = e2_page({"y6": 6, "y10": 10}).algebra
    assert parse_e2(E, "rho^3*y6 + y10") == {(3, 1), (0, 2)}
    assert parse_e2(E, "y6*y6") == set()
    assert parse_e2(E, "rho + rho") == set()
    with pytest.raises(SpectralError):
        parse_e2(E, "z")


def test_spin7_real_page_turn():
    page = e2_page({"y6": 6}, smax=24)
    for r in range(2, 7):
        page = turn_page(page, PageDifferential(r, {}))
    page = turn_page(page, PageDifferential(7, {"y6": "rho^7"}))
    assert page.r == 8
    assert page.rho_height() == 7
    assert page.surviving_generators() == {"rho": True, "y6": False}
    assert page.total_dims(22) == [1] * 7 + [0] * 16


def test_spin11_keeps_y10():
    page, cert = run_to_stable({"y6": 6, "y10": 10}, {7: {"y6": "rho^7"}}, smax=24)
    assert page.surviving_generators()["y10"]
    assert not page.surviving_generators()["y6"]
    assert cert.status == "stable"
    dims = page.total_dims(cert.window)
    assert dims == [1] * 7 + [0] * 3 + [1] * 7 + [0] * 6


def test_zero_differential_is_identity():
    page = e2_page({"y6": 6, "y10": 10}, smax=12)
    after = turn_page(page, PageDifferential(2, {}))
    assert all(after.dim(*bd) == page.dim(*bd) for bd in page.spaces)


def test_wrong_page_and_bidegree_rejected():
    page = e2_page({"y6": 6}, smax=12)
    with pytest.raises(DifferentialError):
        turn_page(page, PageDifferential(3, {}))
    with pytest.raises(DifferentialError):
        turn_page(page, PageDifferential(2, {"y6": "rho^3"}))
    with pytest.raises(SpectralError):
        PageDifferential(2, {"y7": "0"}).normalized(page.algebra)


def test_nonzero_square_rejected():
    # d2(a) = rho^2 * b and d2(b) = rho^2: d2 d2 (a) = rho^4 != 0
    page = e2_page({"b": 1, "a": 2}, smax=8)
    with pytest.raises(DifferentialError):
        turn_page(page, PageDifferential(2, {"a": "rho^2*b", "b": "rho^2"}))


def test_derivation_rule():
    page = e2_page({"y6": 6, "y10": 10}, smax=20)
    E = page.algebra
    d = PageDifferential(7, {"y6": "rho^7"})
    # d(y6 y10) = rho^7 y10
    assert d.on_monomial(E, 0, 0b11) == {(7, 0b10)}
    assert d.on_monomial(E, 0, 0b10) == set()


def test_certificate_stable_and_inconclusive():
    assert certify(e2_page({}, smax=10)).status == "stable"
    page, cert = run_to_stable({"y6": 6}, {}, smax=20)
    assert cert.status == "inconclusive"
    r, src, tgt = cert.witness
    assert r == 7 and src == (0, 6) and tgt == (7, 0)
    assert cert.window == 5


def test_spin7_certificate_window():
    page, cert = run_to_stable({"y6": 6}, {7: {"y6": "rho^7"}}, smax=24)
    assert cert.status == "stable" and cert.first_page == 8 and cert.window == 22


def test_real_runs_match_expected_character(cat):
    for group in ("Spin_7", "Spin_11", "Spin_13", "Spin_15", "Spin_19", "R_2(R)"):
        e = cat.get(group, 2)
        page, cert = run_real(e)
        assert cert.status == "stable", group
        dims = window_dims(page, cert)
        assert dims == trim(real_character(e, cert.window)), group


def test_real_character_shape(cat):
    assert trim(real_character(cat.get("Spin_7", 2))) == [1] * 7
    ch = real_character(cat.get("Spin_11", 2))
    assert trim(ch) == [1] * 7 + [0] * 3 + [1] * 7
    # E_8 at p = 2: y6 has height 8 and the quotient by y6 leaves y10 (height 4), y18, y30
    ch = trim(real_character(cat.get("E_8", 2)))
    assert sum(ch) == 7 * 4 * 2 * 2
    assert len(ch) - 1 == 6 + 3 * 10 + 18 + 30


def test_real_fiber_needs_height_two(cat):
    with pytest.raises(SpectralError):
        real_fiber(cat.get("E_8", 2))


fibers = st.lists(st.integers(1, 9), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(fibers, st.integers(2, 6), st.integers(0, 2))
def test_euler_characteristic_is_preserved(degs, r, which):
    """A differential hitting a rho power on a random fiber keeps chi fixed."""
    fiber = {f"x{i}": d for i, d in enumerate(degs)}
    name, t = list(fiber.items())[which % len(degs)]
    page = e2_page(fiber, smax=14)
    chi = page.euler()
    for k in range(2, t + 2):
        d = PageDifferential(k, {name: f"rho^{k}"} if k == t + 1 else {})
        page = turn_page(page, d)
        assert page.euler() == chi


def test_d_squared_exhaustive():
    E = e2_page({"y6": 6, "y10": 10, "y12": 12}, smax=24).algebra
    assert d_squared_violations(E, PageDifferential(7, {"y6": "rho^7"})) == []
    E = e2_page({"b": 1, "a": 2}, smax=8).algebra
    assert d_squared_violations(E, PageDifferential(2, {"a": "rho^2*b", "b": "rho^2"}))
