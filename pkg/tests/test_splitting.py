import itertools
import random

import numpy as np
import pytest

from svsec import certificate as C
from svsec.checker import check
from svsec.core import InputError, ambient_count
from svsec.splitting import (
    TTriple,
    certify_T,
    identifiability_thresholds,
    split_reduce,
    theorem12_range,
    thresholds,
    triple_abundance,
)
from svsec.terracini import check_T_property, point_row, rank, sample_points, tangent_block

P = 2**31 - 1


def ctx(n0, m, t, x=2, a=16):
    return TTriple(n0, m, t, x, a)


@pytest.mark.parametrize("n0, x, a, out", [(1, 2, 16, (4, 4)), (2, 2, 16, (3, 4)), (3, 4, 8, (1, 1))])
def test_thresholds(n0, x, a, out):
    th = thresholds(n0, x, a)
    assert (th.a_lower, th.a_upper) == out


def test_split_reduce_examples():
    assert [t.as_tuple() for t in split_reduce(ctx(2, 9, 0), 0, 3)] == [(0, 3, 6), (1, 6, 3)]
    assert [t.as_tuple() for t in split_reduce(ctx(1, 8, 0), 0, 4)] == [(0, 4, 4), (0, 4, 4)]
    assert [t.as_tuple() for t in split_reduce(ctx(3, 5, 2), 2, 5)] == [(2, 5, 2), (0, 0, 7)]


def test_split_reduce_ranges():
    with pytest.raises(InputError):
        split_reduce(ctx(2, 9, 0), 2, 3)
    with pytest.raises(InputError):
        split_reduce(ctx(2, 9, 0), 0, 10)


@pytest.mark.parametrize(
    "triple, sub",
    [((2, 9, 0), True), ((2, 12, 0), False), ((0, 3, 6), True)],
)
def test_triple_abundance(triple, sub):
    cls = triple_abundance(ctx(*triple))
    assert cls.is_sub is sub
    assert cls.value == ("subabundant" if sub else "superabundant")


def test_split_bookkeeping():
    tr = ctx(3, 7, 2)
    for n1 in range(3):
        for m1 in range(8):
            a, b = split_reduce(tr, n1, m1)
            assert a.count + b.count == tr.count
            assert a.ambient + b.ambient == tr.ambient


@pytest.mark.parametrize(
    "n0, n, d, out",
    [(1, (1, 1), (3, 3), (8, 8)), (2, (1, 1), (3, 3), (9, 12)), (2, (2, 2), (3, 3), (42, 45))],
)
def test_theorem12_range(n0, n, d, out):
    assert theorem12_range(n0, n, d) == out
    assert out[1] - out[0] <= n0 + 1


def test_identifiability_thresholds():
    assert identifiability_thresholds((1, 1, 1), (3, 3, 3)) == 16
    assert identifiability_thresholds((2, 2, 2), (3, 3, 3)) == 142
    assert identifiability_thresholds((1, 1), (3, 3), n0=1) == 8
    with pytest.raises(InputError):
        identifiability_thresholds((1, 1), (2, 3))


def test_certify_T_symmetric_split():
    c = certify_T(1, (1, 1), (3, 3), 8)
    assert c.verdict == C.NONDEFECTIVE and c.kind == C.SPLITTING
    assert c.data["children"] == [[0, 4, 4], [0, 4, 4]]
    for leaf in c.children:
        assert leaf.kind == C.TERRACINI and leaf.data["outcome"]["observed_rank"] == 16
    assert check(c) == []


def test_certify_T_chain():
    c = certify_T(2, (1, 1), (3, 3), 9)
    assert c.verdict == C.NONDEFECTIVE
    assert c.data["children"] == [[0, 3, 6], [1, 6, 3]]
    inner = c.children[1]
    assert inner.data["children"] == [[0, 3, 6], [0, 3, 6]]
    leaves = [n for n in c.walk() if n.kind == C.TERRACINI]
    assert [(n.n[0], n.m, n.t) for n in leaves] == [(0, 3, 6)] * 3
    assert check(c) == []


def test_certify_T_superabundant_branch_is_flagged():
    c = certify_T(2, (1, 1), (3, 3), 13)
    assert c.verdict == C.NONDEFECTIVE and c.kind == C.MONOTONE
    assert c.children[0].data["note"] == "symmetric to printed proof"
    assert check(c) == []


def test_certify_T_with_trivial_factor():
    c = certify_T(0, (1, 1), (3, 3), 4)
    assert c.kind == C.TERRACINI and c.data["outcome"]["observed_rank"] == 12


@pytest.mark.slow
def test_lemma_closure_exhaustive():
    r = range(9)
    for x, a in itertools.product(range(1, 9), repeat=2):
        for n0, m, t in itertools.product(r, r, r):
            parent = TTriple(n0, m, t, x, a)
            p_count, p_amb = parent.count, parent.ambient
            for n1 in range(n0):
                for m1 in range(m + 1):
                    left, right = split_reduce(parent, n1, m1)
                    if left.count <= left.ambient and right.count <= right.ambient:
                        assert p_count <= p_amb
                    if left.count >= left.ambient and right.count >= right.ambient:
                        assert p_count >= p_amb


def split_matrix(n0, n1, nX, dX, m, m1, t, seed):
    """Terracini rows of ``T(n0, m, t)`` at points whose ``v`` lies in ``V1`` (first
    ``m1`` points, ``v`` in the first ``n1+1`` coordinates) or ``V2`` (the rest)."""
    rng = random.Random(seed)
    n, d = (n0,) + nX, (1,) + dX
    xs = sample_points(nX, dX, m + t, 0, P, seed).points
    rows = []
    for i in range(m):
        support = range(n1 + 1) if i < m1 else range(n1 + 1, n0 + 1)
        v = tuple(rng.randrange(1, P) if j in support else 0 for j in range(n0 + 1))
        rows.append(tangent_block((v,) + xs[i], n, d, P))
    for w in xs[m:]:
        rows.append(np.kron(np.eye(n0 + 1, dtype=np.int64), point_row(w, nX, dX, P)[None, :]) % P)
    return np.vstack(rows)


@pytest.mark.parametrize(
    "n0, n1, nX, dX, m, m1, t",
    [(1, 0, (1, 1), (3, 3), 8, 4, 0), (2, 0, (1, 1), (3, 3), 9, 3, 0), (2, 1, (2,), (3,), 6, 4, 1), (3, 1, (1,), (4,), 6, 3, 2)],
)
def test_special_points_block_diagonalise(n0, n1, nX, dX, m, m1, t):
    A = split_matrix(n0, n1, nX, dX, m, m1, t, seed=5)
    NX = ambient_count(nX, dX)
    cut = (n1 + 1) * NX
    left = A[:, :cut].any(axis=1)
    right = A[:, cut:].any(axis=1)
    assert not (left & right).any()
    total = rank(A, P)
    assert total == rank(A[left], P) + rank(A[right], P)
    parent = TTriple(n0, m, t, sum(nX), NX)
    a, b = split_reduce(parent, n1, m1)
    # both children attain their T-property rank, hence so does the parent
    assert (rank(A[left], P), rank(A[right], P)) == (a.expected, b.expected)
    assert total == parent.expected


def random_instances(count, seed=0, max_cols=600):
    rng = random.Random(seed)
    shapes = [((1,), (3,)), ((1,), (4,)), ((2,), (3,)), ((1,), (5,)), ((1, 1), (3, 3)), ((2,), (4,)), ((1, 1), (3, 4)), ((1, 2), (3, 3))]
    out = []
    while len(out) < count:
        nX, dX = rng.choice(shapes)
        n0 = rng.randint(1, 3)
        NX = ambient_count(nX, dX)
        if (n0 + 1) * NX > max_cols:
            continue
        hi = (n0 + 1) * thresholds(n0, sum(nX), NX).a_upper
        out.append((n0, nX, dX, rng.randint(1, hi + 2)))
    return out


def test_split_vs_direct_agree():
    disagreements = []
    cases = random_instances(60)
    for n0, nX, dX, m in cases:
        via_split = certify_T(n0, nX, dX, m).verdict == C.NONDEFECTIVE
        direct = check_T_property(n0, nX, dX, m, 0).certified
        if via_split != direct:
            disagreements.append((n0, nX, dX, m))
    assert len(cases) >= 50
    assert disagreements == []
