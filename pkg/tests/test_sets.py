import itertools

import pytest

from grpdouble.errors import CapExceededError, EmptySetError, GroupMismatchError, NotApplicableError
from grpdouble.groups import build_group, cyclic
from grpdouble.sets import (
    Subset,
    coset_trace,
    doubling_report,
    enumerate_subgroups,
    inverse_set,
    is_subgroup,
    left_cosets,
    left_translate,
    power_set,
    product_set,
    right_translate,
    subgroup_closure,
)

from conftest import S, SMALL_GROUPS, all_subsets


def brute_product(a, b):
    g = a.group
    return {g.mul(x, y) for x in a for y in b}


def brute_subgroups(g):
    """Oracle: close every subset by repeated multiplication and deduplicate."""
    found = set()
    for m in range(1, 1 << g.order):
        elems = {i for i in range(g.order) if m >> i & 1} | {g.identity}
        while True:
            more = {g.mul(x, y) for x in elems for y in elems} | elems
            if more == elems:
                break
            elems = more
        found.add(frozenset(elems))
    return found


def test_subset_basics():
    g = cyclic(8)
    a = S(g, 0, 2, 5)
    assert a.tolist() == [0, 2, 5] and len(a) == 3 and 5 in a and 1 not in a and 9 not in a
    assert a.min() == 0 and S(g, 6, 3).min() == 3
    assert (a | S(g, 1)).tolist() == [0, 1, 2, 5]
    assert (a & S(g, 2, 3)).tolist() == [2]
    assert (a - S(g, 0)).tolist() == [2, 5]
    assert S(g, 2) <= a and not a <= S(g, 2)
    assert Subset.from_bool(g, a.to_bool()) == a
    assert len(Subset.whole(g)) == 8 and Subset.identity_set(g).tolist() == [0]
    with pytest.raises(ValueError):
        Subset(g, 1 << 8)
    with pytest.raises(IndexError):
        S(g, 8)
    with pytest.raises(EmptySetError):
        Subset(g, 0).min()


def test_group_mismatch():
    a, b = S(cyclic(4), 0), S(cyclic(4), 0)
    with pytest.raises(GroupMismatchError):
        product_set(a, b)
    with pytest.raises(GroupMismatchError):
        a | b
    assert a != b


def test_product_set_examples():
    g = cyclic(4)
    a = S(g, 0, 1)
    assert product_set(a, a).tolist() == [0, 1, 2]
    ai = inverse_set(a)
    assert ai.tolist() == [0, 3]
    assert product_set(a, ai).tolist() == [0, 1, 3]
    assert product_set(a, Subset.identity_set(g)) == a
    assert not product_set(a, Subset(g, 0))


def test_product_set_matches_pairs(small_group):
    g = small_group
    subs = list(all_subsets(g, nonempty=False))[:: max(1, (1 << g.order) // 40)]
    for a, b in itertools.product(subs, repeat=2):
        assert set(product_set(a, b).tolist()) == brute_product(a, b)


def test_translates_and_powers():
    g = build_group("dihedral:4")
    a = S(g, 1, 4)
    assert left_translate(1, a).tolist() == sorted(g.mul(1, x) for x in a)
    assert right_translate(a, 4).tolist() == sorted(g.mul(x, 4) for x in a)
    x = S(g, 0, 1)
    assert power_set(x, 1) == x
    p = x
    for k in range(2, 7):
        p = product_set(p, x)
        assert power_set(x, k) == p
    with pytest.raises(ValueError):
        power_set(x, 0)


def test_inverse_set_examples():
    d4 = build_group("dihedral:4")
    refl = S(d4, 4, 5, 6)
    assert inverse_set(refl) == refl
    for h in enumerate_subgroups(d4):
        assert inverse_set(h) == h


def test_doubling_examples():
    z4, z8 = cyclic(4), cyclic(8)
    r = doubling_report(S(z4, 0, 1))
    assert str(r.ratio) == "3/2" and r.product_size == 3 and r.symmetric_agreement
    assert r.epsilon == 2 - r.ratio
    r = doubling_report(S(z8, 0, 2, 4))
    assert r.product_size == 4 and str(r.ratio) == "4/3"
    for h in enumerate_subgroups(build_group("quaternion:8")):
        assert doubling_report(h).ratio == 1
    with pytest.raises(EmptySetError):
        doubling_report(Subset(z4, 0))


def test_closure_examples():
    z8, d4 = cyclic(8), build_group("dihedral:4")
    assert subgroup_closure(S(z8, 2)).tolist() == [0, 2, 4, 6]
    assert subgroup_closure(S(z8, 0)).tolist() == [0]
    assert subgroup_closure(S(d4, 1, 4)) == Subset.whole(d4)
    with pytest.raises(EmptySetError):
        subgroup_closure(Subset(z8, 0))


@pytest.mark.parametrize("spec,count", [("cyclic:6", 4), ("cyclic:4", 3), ("quaternion:8", 6),
                                        ("dihedral:4", 10), ("symmetric:3", 6), ("product:cyclic:2,cyclic:2", 5)])
def test_enumerate_subgroups_against_oracle(spec, count):
    g = build_group(spec)
    subs = enumerate_subgroups(g)
    assert len(subs) == count
    assert {frozenset(h.tolist()) for h in subs} == brute_subgroups(g)
    keys = [(len(h), h.bits) for h in subs]
    assert keys == sorted(keys)
    assert all(is_subgroup(h) for h in subs)


def test_enumerate_subgroups_z6_listing():
    subs = enumerate_subgroups(cyclic(6))
    assert [h.tolist() for h in subs] == [[0], [0, 3], [0, 2, 4], list(range(6))]


def test_enumerate_cap():
    with pytest.raises(CapExceededError):
        enumerate_subgroups(cyclic(300))
    assert len(enumerate_subgroups(cyclic(12), cap=12)) == 6


def test_is_subgroup_examples():
    z8, z4 = cyclic(8), cyclic(4)
    assert is_subgroup(S(z8, 0, 2, 4, 6))
    assert not is_subgroup(S(z4, 0, 1, 3))
    assert not is_subgroup(Subset(z4, 0))
    assert not is_subgroup(S(z4, 2))


def test_is_subgroup_matches_oracle(small_group):
    subs = {frozenset(h.tolist()) for h in enumerate_subgroups(small_group)}
    for a in all_subsets(small_group):
        assert is_subgroup(a) == (frozenset(a.tolist()) in subs)


def test_left_cosets_partition():
    g = build_group("symmetric:3")
    for h in enumerate_subgroups(g):
        cs = left_cosets(h)
        assert len(cs) * len(h) == g.order
        assert sum(c.bits for c in cs) == (1 << g.order) - 1
        for c in cs:
            x = c.min()
            assert c == left_translate(x, h)


def test_coset_trace_examples():
    z4 = cyclic(4)
    a = S(z4, 0, 1)
    t = coset_trace(a, S(z4, 0, 2))
    assert t.R == 2 and t.representatives == [0, 1] and t.max_intersection == 1
    assert coset_trace(a, Subset.whole(z4)).R == 1
    assert coset_trace(a, Subset.identity_set(z4)).R == len(a)
    with pytest.raises(NotApplicableError):
        coset_trace(a, S(z4, 0, 1))


def test_coset_trace_representative_is_smallest_member():
    g = build_group("dihedral:4")
    a = S(g, 1, 3, 5, 6)
    for h in enumerate_subgroups(g):
        t = coset_trace(a, h)
        for rep, c in zip(t.representatives, t.cosets):
            assert rep == (a & c).min()
        assert sum(len(a & c) for c in t.cosets) == len(a)


def test_small_doubling_does_not_force_symmetry():
    # a left coset xH of a non-normal H has AA^-1 = xHx^-1 but A^-1 A = H
    g = build_group("symmetric:3")
    a = S(g, 1, 3)
    x = a.min()
    h = left_translate(g.inv(x), a)
    assert is_subgroup(h) and left_translate(x, h) == a
    fwd, rev = product_set(a, inverse_set(a)), product_set(inverse_set(a), a)
    assert len(fwd) == len(rev) == 2 < 2 * len(a)
    assert rev == h and fwd != rev
    assert not doubling_report(a).symmetric_agreement
