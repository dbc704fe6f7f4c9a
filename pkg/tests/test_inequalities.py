import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svsec.core import InputError
from svsec.inequalities import (
    NAMED_IDS,
    Box,
    defining_value,
    descartes_bound,
    diff_terms,
    expand_named,
    load_expected,
    prove_sign_on_ray,
    scan_lemma,
    sign_on_ray,
    verify_appendix,
)
from svsec.polynomial import RationalPoly

F = Fraction


def univariate(name, *coeffs_high_first):
    return RationalPoly.from_univariate(name, list(reversed(coeffs_high_first)))


def test_a1_base_top_coefficient():
    co = expand_named("A1-base").coefficient(3)
    assert co == univariate("n1", F(-1, 216), F(-1, 24), F(-31, 216), F(-17, 72), F(-5, 27), F(-1, 18), 8)


def test_a1_n1eq2_at_two():
    assert expand_named("A1-n1eq2").at(2) == univariate("n2", F(-17, 3), -24, F(26, 3), 95)


def test_a3_step_top_coefficient():
    co = expand_named("A3-step").coefficient(3)
    assert co == univariate("np", F(1, 3), F(1, 2), F(1, 6), -2)


def test_unknown_id():
    with pytest.raises(InputError):
        expand_named("A9")


@pytest.mark.parametrize("id", NAMED_IDS)
def test_expansions_match_tables(id):
    assert diff_terms(id, expand_named(id).poly, load_expected(id)) == []


@pytest.mark.parametrize("id", NAMED_IDS)
def test_expansion_agrees_with_direct_evaluation(id):
    ex = expand_named(id)
    rng = random.Random(id)
    for _ in range(100):
        values = {v: rng.randint(0, 40) for v in ex.poly.variables}
        assert ex.poly.evaluate(values) == defining_value(id, values)


def test_prove_sign_examples():
    x = RationalPoly.var("x")
    assert prove_sign_on_ray(-(x**2) - x - 1, 0, "<=0")
    assert prove_sign_on_ray(x**2 - 4, 2, ">=0")
    assert not prove_sign_on_ray(x**2 - 4, 1, ">=0")


def test_sign_on_ray_fallback():
    x = RationalPoly.var("x")
    # (x-3)^2 is non-negative everywhere but the shift at 0 has a negative term
    p = (x - 3) ** 2
    assert sign_on_ray(p, 0, ">=0") == "verified on range only"
    assert sign_on_ray(x - 5, 0, ">=0") == "fails"
    assert sign_on_ray(x - 5, 5, ">=0") == "proved"


@settings(max_examples=60)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5), st.integers(0, 6))
def test_proved_sign_holds_on_samples(cs, a):
    p = RationalPoly.from_univariate("x", cs)
    if prove_sign_on_ray(p, a, ">=0"):
        assert all(p.evaluate({"x": v}) >= 0 for v in range(a, a + 51))


def test_descartes_examples():
    assert descartes_bound([F(-17, 3), -24, F(26, 3), 95]) == 1
    assert descartes_bound([1, 1, 1]) == 0
    assert descartes_bound([1, -1, 1, -1]) == 3
    with pytest.raises(InputError):
        descartes_bound([0, 0])


@given(st.lists(st.fractions(-10, 10), min_size=1, max_size=8).filter(any), st.fractions(F(1, 10), 10))
def test_descartes_scale_invariant(cs, c):
    assert descartes_bound(cs) == descartes_bound([c * x for x in cs])


def test_box_parsing():
    b = Box.parse("k=3..5,n=2..6,d=3..5")
    assert (b.k, b.n, b.d) == ((3, 5), (2, 6), (3, 5))
    assert Box.parse("k=3,d=3").d == (3, 3)
    for bad in ("k=3..", "q=1..2", "k=5..3"):
        with pytest.raises(InputError):
            Box.parse(bad)
    with pytest.raises(InputError):
        scan_lemma("A1", "k=3..3,n=1..3,d=3..3")


def test_scan_examples():
    rep = scan_lemma("A2", "k=3,n=2..5,d=3")
    assert rep.ok and rep.instances > 0
    rep = scan_lemma("ineq31", "k=2,n=1,d=3")
    assert rep.ok and rep.instances == 1


def test_single_instance_a1():
    from svsec.horace import appendix_checks

    a1 = appendix_checks((2, 2, 2), (3, 3, 3), 143)[0]
    assert (a1["lhs"], a1["rhs"]) == (77, 78)


def test_scan_is_deterministic():
    a = scan_lemma("A3", "k=3..4,n=2..4,d=3..4")
    b = scan_lemma("A3", "k=3..4,n=2..4,d=3..4")
    assert a == b


def test_verify_appendix_small_box():
    rep = verify_appendix("k=3..3,n=2..4,d=3..4")
    assert rep.ok, [c.name for c in rep.failures]
    names = [c.name for c in rep.checks]
    assert names[:5] == [f"expansion {i}" for i in NAMED_IDS]
    thresholds = rep.findings["A3-base coefficient thresholds"]
    assert all(v["holds_from"] <= 2 for v in thresholds.values())


def test_perturbed_table_is_named():
    table = load_expected("A1-base")
    exps = (6, 3)
    bad = RationalPoly(table.variables, dict(table.terms))
    bad.terms[exps] = bad.terms[exps] + 1
    rep = verify_appendix(expected={"A1-base": bad}, scans=False)
    assert not rep.ok
    (failure,) = rep.failures
    diffs = failure.detail["diffs"]
    assert diffs == [{"id": "A1-base", "term": "n1^6*n3^3", "computed": "-1/216", "expected": "215/216"}]
