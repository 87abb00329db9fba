from fractions import Fraction

from hypothesis import given, settings, strategies as st

from grpdouble.convolution import GroupFunction, adjoint, convolve, norm_identity_check
from grpdouble.detect import freiman_coset, hamidoune_witness, jump_check, kneser_witness
from grpdouble.groups import build_group
from grpdouble.sets import Subset, doubling_report, inverse_set, product_set
from grpdouble.survey import CHECKS, row_for_subset, rows_for_masks

GROUPS = {s: build_group(s) for s in [
    "cyclic:12", "cyclic:30", "dihedral:5", "dihedral:12", "quaternion:8", "symmetric:4",
    "product:cyclic:2,quaternion:8", "product:cyclic:3,symmetric:3", "product:cyclic:8,dihedral:4",
]}

group_st = st.sampled_from(sorted(GROUPS)).map(GROUPS.get)


@st.composite
def group_and_sets(draw, n=1, nonempty=True):
    g = draw(group_st)
    lo = 1 if nonempty else 0
    sets = [Subset(g, draw(st.integers(lo, (1 << g.order) - 1))) for _ in range(n)]
    return (g, *sets)


@st.composite
def group_and_fns(draw, n=3):
    g = draw(group_st)
    val = st.fractions(min_value=-4, max_value=4, max_denominator=6)
    return g, [GroupFunction.from_values(g, draw(st.lists(val, min_size=g.order, max_size=g.order))) for _ in range(n)]


@settings(max_examples=60, deadline=None)
@given(group_and_sets(3, nonempty=False))
def test_product_set_associative_and_pairs(args):
    g, a, b, c = args
    assert product_set(product_set(a, b), c) == product_set(a, product_set(b, c))
    assert set(product_set(a, b)) == {g.mul(x, y) for x in a for y in b}
    if a and b:
        assert len(product_set(a, b)) >= max(len(a), len(b))


@settings(max_examples=40, deadline=None)
@given(group_and_fns())
def test_convolution_associative_and_adjoint(args):
    g, (f, h, k) = args
    assert convolve(convolve(f, h), k) == convolve(f, convolve(h, k))
    assert adjoint(convolve(f, h)) == convolve(adjoint(h), adjoint(f))
    assert convolve(f, h).total() == f.total() * h.total()


@settings(max_examples=80, deadline=None)
@given(group_and_sets(1))
def test_theorem_checks_on_random_sets(args):
    g, a = args
    d = doubling_report(a)
    assert jump_check(a).passed
    if g.is_abelian:
        assert d.symmetric_agreement
    n = norm_identity_check(a)
    assert n.equal and n.bound_ok
    assert freiman_coset(a).status != "refuted"
    assert hamidoune_witness(a).found
    if g.is_abelian:
        assert kneser_witness(a).found


@settings(max_examples=40, deadline=None)
@given(group_and_sets(4))
def test_batch_rows_equal_per_set_rows(args):
    g, *subs = args
    checks = tuple(c for c in CHECKS if c != "pipeline")
    assert rows_for_masks(g, [s.bits for s in subs], checks) == [row_for_subset(s, checks) for s in subs]


@settings(max_examples=40, deadline=None)
@given(group_and_sets(1))
def test_inverse_is_involution(args):
    g, a = args
    assert inverse_set(inverse_set(a)) == a
    assert Fraction(len(product_set(a, inverse_set(a))), len(a)) == doubling_report(a).ratio
