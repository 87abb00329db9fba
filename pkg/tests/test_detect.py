from fractions import Fraction

import pytest

from grpdouble.detect import (
    covering_bound_check,
    covering_frontier,
    freiman_coset,
    hamidoune_witness,
    jump_check,
    kneser_witness,
    smallest_containing_coset,
)
from grpdouble.errors import EmptySetError, NotApplicableError
from grpdouble.groups import build_group, cyclic
from grpdouble.sets import Subset, enumerate_subgroups, left_cosets

from conftest import S, all_subsets


def pset(g, a, b):
    return frozenset(g.mul(x, y) for x in a for y in b)


def pinv(g, a):
    return frozenset(g.inv(x) for x in a)


def kneser_ok(g, a, h):
    a, h = frozenset(a), frozenset(h)
    diff = pset(g, a, pinv(g, a))
    return pset(g, diff, h) == diff and len(diff) >= 2 * len(pset(g, a, h)) - len(h)


def hamidoune_ok(g, a, h, branch):
    a, h, ai = frozenset(a), frozenset(h), pinv(g, frozenset(a))
    if branch == 2:
        ah = pset(g, a, h)
        t = pset(g, a, ai)
        return pset(g, ah, ai) == t and len(t) >= 2 * len(ah) - len(h)
    ha = pset(g, h, a)
    t = pset(g, ai, a)
    return pset(g, ai, ha) == t and len(t) >= 2 * len(ha) - len(h)


def test_freiman_examples():
    z8, z4 = cyclic(8), cyclic(4)
    r = freiman_coset(S(z8, 0, 2, 4))
    assert r.found and r.subgroup.tolist() == [0, 2, 4, 6] and r.representative == 0
    assert len(r.subgroup) <= r.ratio * 3
    for h in enumerate_subgroups(build_group("dihedral:3")):
        r = freiman_coset(h)
        assert r.found and r.subgroup == h and r.representative == 0
    r = freiman_coset(S(z4, 0, 1))
    assert r.status == "not-applicable" and r.ratio == Fraction(3, 2)
    with pytest.raises(EmptySetError):
        freiman_coset(Subset(z4, 0))


def test_freiman_coset_translate():
    g = build_group("dihedral:4")
    a = S(g, 5, 7)        # a coset of a subgroup of order 2
    r = freiman_coset(a)
    assert r.found
    assert set(a) <= {g.mul(r.representative, h) for h in r.subgroup}


def test_jump_examples():
    z4, z8 = cyclic(4), cyclic(8)
    j = jump_check(S(z4, 0, 1))
    assert (j.minimum, j.bound, j.passed, j.tight) == (1, 1, True, True)
    j = jump_check(S(z8, 0, 2, 4))
    assert (j.minimum, j.bound, j.passed, j.tight) == (2, 2, True, True)
    h = S(z8, 0, 4)
    j = jump_check(h)
    assert (j.minimum, j.bound) == (2, 2)


def test_jump_brute(small_group):
    g = small_group
    for a in all_subsets(g):
        ai = pinv(g, a)
        vals = [sum(1 for y in ai for z in a if g.mul(y, z) == x) for x in range(g.order)]
        m = min(v for v in vals if v)
        j = jump_check(a)
        assert j.minimum == m and j.bound == 2 * len(a) - len(pset(g, a, ai))


def test_frontier_examples():
    z4 = cyclic(4)
    fr = covering_frontier(S(z4, 0, 1))
    assert fr.pairs() == [(1, 2), (4, 1)]
    assert fr.entries[0].representatives == [0, 1]
    # a subgroup is covered by itself with R = 1; the trivial subgroup also
    # stays on the frontier as (1, |H|) unless H is trivial
    for h in enumerate_subgroups(build_group("quaternion:8")):
        pairs = covering_frontier(h).pairs()
        assert pairs[-1] == (len(h), 1)
        assert pairs[0] == (1, len(h))
        assert all(r > 1 for _, r in pairs[:-1])


def test_frontier_is_pareto(small_group):
    g = small_group
    subs = enumerate_subgroups(g)
    for a in list(all_subsets(g))[::7]:
        pts = {(len(h), sum(1 for c in left_cosets(h) if a & c)) for h in subs}
        front = sorted(p for p in pts if not any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in pts))
        assert covering_frontier(a).pairs() == front


def test_smallest_containing_coset():
    z4 = cyclic(4)
    assert len(smallest_containing_coset(S(z4, 0, 1))) == 4
    assert smallest_containing_coset(S(z4, 1, 3)).tolist() == [0, 2]


def test_kneser_examples():
    z9, z4 = cyclic(9), cyclic(4)
    w = kneser_witness(S(z9, 0, 1, 3, 4, 6, 7))
    assert w.found and w.subgroup.tolist() == [0, 3, 6]
    assert w.checks[1][1:3] == (9, 9)
    w = kneser_witness(S(z4, 0, 1))
    assert w.found and w.subgroup.tolist() == [0]
    assert w.checks[1][1:] == (3, 3, True)
    h = S(cyclic(8), 0, 2, 4, 6)
    w = kneser_witness(h)
    assert w.found and kneser_ok(h.group, h, w.subgroup)
    assert kneser_ok(h.group, h, h)
    with pytest.raises(NotApplicableError):
        kneser_witness(S(build_group("symmetric:3"), 0, 1))


@pytest.mark.parametrize("spec", ["cyclic:6", "cyclic:8", "product:cyclic:2,cyclic:4"])
def test_kneser_brute(spec):
    g = build_group(spec)
    subs = enumerate_subgroups(g)
    for a in all_subsets(g):
        w = kneser_witness(a)
        want = next((h for h in subs if kneser_ok(g, a, h)), None)
        assert w.found and w.subgroup == want


def test_hamidoune_examples():
    z4 = cyclic(4)
    w = hamidoune_witness(S(z4, 0, 1))
    assert w.found and w.subgroup.tolist() == [0] and w.branch == 2
    d4 = build_group("dihedral:4")
    for h in enumerate_subgroups(d4):
        assert hamidoune_ok(d4, h, h, 1) and hamidoune_ok(d4, h, h, 2)
    w = hamidoune_witness(S(d4, 0, 1))
    assert w.found and w.branch in (1, 2) and hamidoune_ok(d4, S(d4, 0, 1), w.subgroup, w.branch)


@pytest.mark.parametrize("spec", ["dihedral:3", "dihedral:4", "quaternion:8"])
def test_hamidoune_brute(spec):
    g = build_group(spec)
    subs = enumerate_subgroups(g)
    for a in all_subsets(g):
        w = hamidoune_witness(a)
        want = next(((h, b) for h in subs for b in (2, 1) if hamidoune_ok(g, a, h, b)), None)
        assert w.found and (w.subgroup, w.branch) == want


def test_hamidoune_branch_one_only():
    g = build_group("symmetric:3")
    w = hamidoune_witness(S(g, 0, 1), branches=(1,))
    assert w.branch in (None, 1)


def test_covering_bound_examples():
    z4, z9 = cyclic(4), cyclic(9)
    r = covering_bound_check(S(z4, 0, 1))
    assert r.epsilon == Fraction(1, 2) and r.R_bound == 3 and r.R == 2 and r.passed
    h = S(z9, 0, 3, 6)
    r = covering_bound_check(h)
    assert r.epsilon == 1 and r.R == 1 and r.R_bound == 1 and r.passed
    r = covering_bound_check(S(z9, 0, 1, 3, 4, 6, 7))
    assert r.epsilon == Fraction(1, 2) and r.subgroup.tolist() == [0, 3, 6]
    assert r.h_size == 3 >= r.h_bound and r.R == 2 <= r.R_bound and r.passed
    with pytest.raises(NotApplicableError):
        covering_bound_check(S(cyclic(7), 0, 1, 3))
