import copy
import json
from math import comb, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svsec import certificate as C
from svsec.certificate import Certificate
from svsec.checker import check
from svsec.config import Config
from svsec.core import HoraceInapplicable, InputError, critical_values, normalize
from svsec.horace import (
    appendix_checks,
    ballico_applicable,
    certify,
    choose_pivot,
    exceptional_cases,
    horace_step,
    nondefective_samples,
    p1_product_exceptional,
    registry_rule,
    theorem11_schedule,
    veronese_exceptional,
)
from svsec.terracini import check_nondefective


def problems(c):
    return [(tuple(k.n), tuple(k.d), k.m) for k in c.children]


def test_horace_step_at_143():
    step = horace_step((2, 2, 2), (3, 3, 3), 143)
    assert (step.numbers.s_r, step.numbers.eps_r) == (66, 5)
    assert step.children == (
        ((1, 2, 2), (3, 3, 3), 66),
        ((2, 2, 2), (2, 3, 3), 77),
        ((2, 2, 2), (1, 3, 3), 72),
    )
    sides = {(c["lhs"], c["op"], c["rhs"]) for c in step.side_conditions}
    assert sides == {(66, ">=", 5), (504, ">=", 300)}


def test_horace_step_at_142():
    step = horace_step((2, 2, 2), (3, 3, 3), 142)
    assert [m for *_, m in step.children] == [65, 77, 73]


def test_horace_step_side_condition_violated():
    # 7*87 - 600 = 9 = 6*1 + 3, so s = 1 < eps = 3
    with pytest.raises(HoraceInapplicable, match="side condition violated"):
        horace_step((2, 2, 2), (3, 3, 3), 87)


def test_horace_step_needs_degree_three():
    with pytest.raises(HoraceInapplicable):
        horace_step((2, 2), (2, 3), 10)


def test_horace_step_drops_point_factor():
    step = horace_step((1, 2), (3, 3), 10)
    assert step.children[0][:2] == ((2,), (3,))


def test_choose_pivot():
    assert choose_pivot((1, 2, 2), (2, 3, 4)) == 1
    assert choose_pivot((2, 2), (4, 3)) == 1
    assert choose_pivot((1, 1), (1, 2)) is None


def test_appendix_lemmas_at_143():
    a1, a2, a3 = appendix_checks((2, 2, 2), (3, 3, 3), 143)
    assert (a1["lhs"], a1["rhs"], a1["holds"]) == (77, 78, True)
    assert (a2["lhs"], a2["rhs"], a2["holds"]) == (66, 5, True)
    assert (a3["lhs"], a3["rhs"], a3["holds"]) == (50, 72, True)


def test_ballico_two_by_two():
    ok, trace = ballico_applicable((2, 2), (3, 3), 3)
    assert ok and trace["route"] == "ballico"
    assert (trace["ineq31"]["lhs"], trace["ineq31"]["rhs"]) == (100, 16)
    assert trace["r"] == 25 and trace["dim_x"] == 4


def test_ballico_p1_route():
    ok, trace = ballico_applicable((1, 1), (3, 3), 5)
    assert ok and trace["route"] == "p1-products"


def test_ballico_dim_three():
    ok, trace = ballico_applicable((1, 2), (3, 3), 2)
    assert ok and (trace["ineq31"]["lhs"], trace["ineq31"]["rhs"]) == (40, 9)


def test_ballico_rejects_low_degree():
    ok, _ = ballico_applicable((2, 2), (2, 3), 3)
    assert not ok


def test_certify_143_tree():
    c = certify((2, 2, 2), (3, 3, 3), 143)
    assert c.verdict == C.NONDEFECTIVE and c.kind == C.HORACE
    assert problems(c) == [((1, 2, 2), (3, 3, 3), 66), ((2, 2, 2), (2, 3, 3), 77), ((2, 2, 2), (1, 3, 3), 72)]
    kinds = [k.kind for k in c.children]
    assert kinds == [C.BASE, C.BC_WINDOW, C.BC_WINDOW]
    assert c.children[0].data["name"] == "ballico-factor-addition"
    assert check(c) == []


def test_certify_veronese_exception():
    c = certify((2,), (4,), 5)
    assert c.verdict == C.DEFECTIVE and c.kind == C.KNOWN_DEFECTIVE
    assert c.data["oracle"]["observed_rank"] == 14


def test_certify_two_factor_registry():
    c = certify((1, 1), (3, 4), 7)
    assert c.verdict == C.NONDEFECTIVE and c.kind == C.BASE


def test_theorem11_schedule_examples():
    c = theorem11_schedule((1, 2, 2), (3, 3, 3))
    assert c.verdict == C.NONDEFECTIVE
    assert all(k.data.get("name") == "ballico-factor-addition" for k in c.children)
    c = theorem11_schedule((2, 2, 2), (3, 3, 3))
    assert [k.m for k in c.children] == [142, 143]
    assert all(k.kind == C.HORACE for k in c.children)
    c = theorem11_schedule((1, 1, 1), (4, 5, 6))
    assert c.verdict == C.NONDEFECTIVE
    assert {k.data["name"] for k in c.children} == {"p1-products"}
    with pytest.raises(InputError):
        theorem11_schedule((1, 2), (2, 3))


def test_critical_root_serialises():
    c = certify((2, 2, 2), (3, 3, 3))
    obj = json.loads(c.dumps())
    assert obj["version"] == C.SCHEMA_VERSION
    assert obj["problem"] == {"n": [2, 2, 2], "d": [3, 3, 3], "m": None}
    assert Certificate.loads(c.dumps()).to_json() == c.to_json()


def test_depth_cap_reports_unknown():
    # children of the Horace step hit the depth cap and the root is too big for the oracle
    c = certify((2, 2, 2), (3, 3, 3), 143, Config(max_depth=0, cap=10**5))
    assert c.verdict == C.UNKNOWN and c.kind == C.UNRESOLVED
    assert check(c) == []


def test_cap_without_strategy_is_unknown():
    # d = (2,2,2): no Horace pivot, no registry rule, matrix over cap
    c = certify((2, 2, 2), (2, 2, 2), 31, Config(cap=1000))
    assert c.verdict == C.UNKNOWN and c.kind == C.UNRESOLVED


# -- registry data -----------------------------------------------------------


def test_exceptional_lists():
    assert veronese_exceptional(2, 4, 5) and veronese_exceptional(5, 2, 3)
    assert not veronese_exceptional(2, 4, 6)
    assert p1_product_exceptional((2, 4), 5) and p1_product_exceptional((1, 1, 1, 1), 3)
    assert not p1_product_exceptional((3, 3), 8)


def test_registry_claims_on_audit_sets():
    for n, d, m in exceptional_cases(10**4):
        assert registry_rule(n, d, m).verdict == C.DEFECTIVE
    assert len(nondefective_samples(300)) >= 20


# -- checker -----------------------------------------------------------------


def tamper(c, path, fn):
    c = copy.deepcopy(c)
    node = c
    for i in path:
        node = node.children[i]
    fn(node)
    return c


def test_checker_catches_tampering():
    good = certify((2, 2, 2), (3, 3, 3))
    assert check(good) == []
    bad = tamper(good, [1], lambda n: n.data.update(s_r=67))
    assert any("s_r" in e for e in check(bad))
    bad = tamper(good, [1, 1], lambda n: setattr(n, "m", 80))
    assert check(bad)
    bad = tamper(good, [0, 2], lambda n: setattr(n, "verdict", C.UNKNOWN))
    assert any("non-nondefective child" in e for e in check(bad))
    bad = tamper(good, [0, 0], lambda n: n.data.update(name="two-factor"))
    assert check(bad)
    bad = tamper(good, [], lambda n: n.data.update(r_upper=144))
    assert check(bad)


def test_checker_rejects_false_rank_claims():
    c = certify((1, 2), (2, 2), 3)
    assert c.kind == C.TERRACINI and check(c) == []
    bad = tamper(c, [], lambda n: n.data["outcome"].update(observed_rank=n.data["outcome"]["expected"] - 1))
    assert check(bad)


# -- properties --------------------------------------------------------------

small = st.lists(st.tuples(st.integers(1, 3), st.integers(1, 4)), min_size=1, max_size=3).filter(
    lambda ps: prod(comb(a + b, b) for a, b in ps) <= 150
)


@settings(max_examples=40, deadline=None)
@given(small, st.integers(1, 40), st.randoms(use_true_random=False))
def test_certify_sound_and_permutation_invariant(ps, m, rnd):
    n, d = zip(*ps)
    shuffled = list(ps)
    rnd.shuffle(shuffled)
    a = certify(n, d, m)
    b = certify(*zip(*shuffled), m)
    assert a.verdict == b.verdict
    assert check(a) == []


@settings(max_examples=30, deadline=None)
@given(small, st.integers(2, 40))
def test_certificates_cross_validate_with_oracle(ps, m):
    n, d = normalize(*zip(*ps))
    c = certify(n, d, m)
    oracle = check_nondefective(n, d, m)
    if c.verdict == C.NONDEFECTIVE:
        assert oracle.certified
    elif c.verdict == C.DEFECTIVE:
        assert not oracle.certified


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.integers(2, 4), min_size=3, max_size=4).map(sorted),
    st.lists(st.integers(3, 5), min_size=4, max_size=4),
)
def test_scheduler_steps_satisfy_appendix_lemmas(n, ds):
    d = tuple(ds[: len(n)])
    for r in sorted(set(critical_values(n, d))):
        assert all(c["holds"] for c in appendix_checks(n, d, r))
