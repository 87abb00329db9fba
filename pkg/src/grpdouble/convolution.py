"""Real-valued functions and probability measures on a finite group.

Exact mode stores a function as an integer numerator vector over one
positive common denominator, so every convolution is an integer kernel
call and every comparison is exact. Fast mode stores float64 values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .errors import EmptySetError, GroupMismatchError
from .groups import Group
from .sets import Subset, inverse_set, left_translate, product_set

_INT_LIMIT = 1 << 62


def _int_array(values):
    """int64 when every entry fits comfortably, else object (Python ints)."""
    ints = [int(v) for v in values]
    if all(-_INT_LIMIT < v < _INT_LIMIT for v in ints):
        return np.array(ints, dtype=np.int64)
    return np.array(ints, dtype=object)


def _bound(arr):
    return max((abs(int(v)) for v in arr), default=0)


class GroupFunction:
    """f: G -> R; exact as ``num / den`` or fast as float64 ``num`` (den 1)."""

    __slots__ = ("group", "num", "den", "exact")

    def __init__(self, group: Group, num, den=1, exact=True):
        num = np.asarray(num)
        if num.shape != (group.order,):
            raise ValueError(f"function needs {group.order} values, got shape {num.shape}")
        if exact:
            if den <= 0:
                raise ValueError("denominator must be positive")
            if num.dtype.kind not in "iuO":
                raise TypeError("exact functions need integer numerators")
            if num.dtype.kind == "O" and _bound(num) < _INT_LIMIT:
                num = num.astype(np.int64)
            elif num.dtype.kind != "O":
                num = num.astype(np.int64)
        else:
            num = num.astype(np.float64)
            den = 1
        self.group, self.num, self.den, self.exact = group, num, int(den), exact

    # -- constructors
    @classmethod
    def from_values(cls, group, values, exact=True):
        values = list(values)
        if not exact:
            return cls(group, np.array([float(v) for v in values]), exact=False)
        fr = [Fraction(v) for v in values]
        den = math.lcm(*(q.denominator for q in fr)) if fr else 1
        return cls(group, _int_array(q.numerator * (den // q.denominator) for q in fr), den)

    @classmethod
    def indicator(cls, a: Subset, exact=True):
        num = a.to_bool().astype(np.int64)
        return cls(a.group, num, 1, exact)

    @classmethod
    def delta(cls, group, x=None, exact=True):
        num = np.zeros(group.order, dtype=np.int64)
        num[group.identity if x is None else group.check(x)] = 1
        return cls(group, num, 1, exact)

    @classmethod
    def zeros(cls, group, exact=True):
        return cls(group, np.zeros(group.order, dtype=np.int64), 1, exact)

    # -- access
    def __getitem__(self, x):
        v = self.num[self.group.check(x)]
        return Fraction(int(v), self.den) if self.exact else float(v)

    @property
    def values(self):
        if self.exact:
            return np.array([Fraction(int(v), self.den) for v in self.num], dtype=object)
        return self.num.copy()

    def tolist(self):
        return list(self.values)

    def to_float(self):
        return self.num.astype(np.float64) / self.den

    def support(self) -> Subset:
        return Subset.from_bool(self.group, self.num != 0)

    def total(self):
        s = self.num.sum()
        return Fraction(int(s), self.den) if self.exact else float(s)

    def sup_norm(self):
        if self.exact:
            return Fraction(_bound(self.num), self.den)
        return float(np.abs(self.num).max())

    def reduced(self):
        if not self.exact:
            return self
        g = math.gcd(self.den, *(int(v) for v in self.num))
        if g <= 1:
            return self
        return GroupFunction(self.group, self.num // g, self.den // g)

    # -- arithmetic
    def _align(self, other):
        if other.group is not self.group:
            raise GroupMismatchError("functions live on different groups")
        if not (self.exact and other.exact):
            return self.to_float(), other.to_float(), 1, False
        den = math.lcm(self.den, other.den)
        a = self.num * (den // self.den)
        b = other.num * (den // other.den)
        return a, b, den, True

    def __add__(self, other):
        a, b, den, exact = self._align(other)
        return GroupFunction(self.group, a + b, den, exact)

    def __sub__(self, other):
        a, b, den, exact = self._align(other)
        return GroupFunction(self.group, a - b, den, exact)

    def __neg__(self):
        return GroupFunction(self.group, -self.num, self.den, self.exact)

    def scale(self, c):
        if not self.exact:
            return GroupFunction(self.group, self.num * float(c), exact=False)
        c = Fraction(c)
        return GroupFunction(self.group, self.num * c.numerator, self.den * c.denominator)

    def __eq__(self, other):
        if not isinstance(other, GroupFunction) or other.group is not self.group:
            return NotImplemented
        a, b, _, _ = self._align(other)
        return bool(np.array_equal(a, b))

    __hash__ = None

    def __repr__(self):
        shown = [str(v) for v in self.values] if self.exact else list(self.num)
        return f"GroupFunction({self.group.label}, {shown})"


class GroupMeasure:
    """Non-negative weights summing to one."""

    __slots__ = ("fn",)

    def __init__(self, fn: GroupFunction):
        if (fn.num < 0).any():
            raise ValueError("measure weights must be non-negative")
        total = fn.total()
        if (fn.exact and total != 1) or (not fn.exact and abs(total - 1) > 1e-12):
            raise ValueError(f"measure weights must sum to 1, got {total}")
        self.fn = fn

    @classmethod
    def uniform(cls, x: Subset, exact=True):
        """P_X, the uniform probability measure on X."""
        if not x:
            raise EmptySetError("uniform measure on the empty set")
        f = GroupFunction.indicator(x, exact)
        return cls(GroupFunction(x.group, f.num, len(x)) if exact else f.scale(1 / len(x)))

    @classmethod
    def point(cls, group, x=None, exact=True):
        return cls(GroupFunction.delta(group, x, exact))

    @property
    def group(self):
        return self.fn.group

    @property
    def weights(self):
        return self.fn.values

    def support(self):
        return self.fn.support()

    def adjoint(self):
        return GroupMeasure(adjoint(self.fn))

    def as_function(self):
        return self.fn


def _as_fn(f):
    return f.fn if isinstance(f, GroupMeasure) else f


def convolve(f, g, impl=None) -> GroupFunction:
    """(f * g)(x) = sum over yz = x of f(y) g(z); measures are accepted as their weights."""
    f, g = _as_fn(f), _as_fn(g)
    if f.group is not g.group:
        raise GroupMismatchError("functions live on different groups")
    grp = f.group
    if not (f.exact and g.exact):
        k = impl or kernels()
        return GroupFunction(grp, k.convolve(grp.mul_table, grp.inv_table, f.to_float(), g.to_float()), exact=False)
    a, b = f.num, g.num
    if a.dtype == object or b.dtype == object or _bound(a) * len(a) * _bound(b) >= _INT_LIMIT:
        k = kernels("numpy")
        out = k.convolve(grp.mul_table, grp.inv_table, a.astype(object), b.astype(object))
    else:
        k = impl or kernels()
        out = k.convolve(grp.mul_table, grp.inv_table, a, b)
    return GroupFunction(grp, out, f.den * g.den)


def convolve_measure(f, m: GroupMeasure, impl=None) -> GroupFunction:
    """(f * mu)(x) = sum_z f(x z^-1) mu(z)."""
    return convolve(f, m, impl)


def convolve_measures(m1: GroupMeasure, m2: GroupMeasure) -> GroupMeasure:
    return GroupMeasure(convolve(m1, m2))


def adjoint(f: GroupFunction) -> GroupFunction:
    """f~(x) = f(x^-1); values are real so there is no conjugation."""
    return GroupFunction(f.group, f.num[f.group.inv_table], f.den, f.exact)


def inner(f, g):
    f, g = _as_fn(f), _as_fn(g)
    if f.group is not g.group:
        raise GroupMismatchError("functions live on different groups")
    if f.exact and g.exact:
        a, b = f.num, g.num
        if a.dtype == object or b.dtype == object or _bound(a) * _bound(b) * len(a) >= _INT_LIMIT:
            s = sum(int(x) * int(y) for x, y in zip(a, b))
        else:
            s = int(a @ b)
        return Fraction(s, f.den * g.den)
    return float(f.to_float() @ g.to_float())


def norm_sq(f):
    return inner(f, f)


# ---------------------------------------------------------------- checks


@dataclass(frozen=True)
class IdentityReport:
    passed: bool
    support_ok: bool
    counts_ok: bool
    discrepancy: dict | None = None

    def to_dict(self):
        return {"passed": self.passed, "support_ok": self.support_ok,
                "counts_ok": self.counts_ok, "discrepancy": self.discrepancy}


def indicator_conv_identities(a: Subset, b: Subset) -> IdentityReport:
    """supp(1_A * 1_B) = AB and 1_A * 1_B(x) = |A n xB^-1| for every x."""
    conv = convolve(GroupFunction.indicator(a), GroupFunction.indicator(b))
    prod = product_set(a, b)
    supp = conv.support()
    support_ok = supp == prod
    disc = None
    if not support_ok:
        x = (supp.bits ^ prod.bits)
        disc = {"kind": "support", "x": (x & -x).bit_length() - 1}
    binv = inverse_set(b)
    counts_ok = True
    for x in range(a.group.order):
        want = len(a & left_translate(x, binv))
        if conv.num[x] != want:
            counts_ok = False
            disc = disc or {"kind": "count", "x": x, "value": int(conv.num[x]), "expected": want}
            break
    return IdentityReport(support_ok and counts_ok, support_ok, counts_ok, disc)


def adjoint_inner_products(f, g, h):
    """(<f*g, h>, <g, f~*h>, <f, h*g~>)."""
    return (
        inner(convolve(f, g), h),
        inner(g, convolve(adjoint(f), h)),
        inner(f, convolve(h, adjoint(g))),
    )


def adjoint_identity_check(f, g, h) -> bool:
    p, q, r = adjoint_inner_products(f, g, h)
    return p == q == r


@dataclass(frozen=True)
class NormReport:
    norm_rev: Fraction       # ||1_{A^-1} * 1_A||^2
    norm_fwd: Fraction       # ||1_A * 1_{A^-1}||^2
    equal: bool
    lower_bound: Fraction    # |A|^3 * |A| / |AA^-1|
    bound_ok: bool

    def to_dict(self):
        return {"norm_rev": str(self.norm_rev), "norm_fwd": str(self.norm_fwd), "equal": self.equal,
                "lower_bound": str(self.lower_bound), "bound_ok": self.bound_ok}


def norm_identity_check(a: Subset) -> NormReport:
    if not a:
        raise EmptySetError("norm identity needs a non-empty set")
    one_a = GroupFunction.indicator(a)
    one_ai = GroupFunction.indicator(inverse_set(a))
    rev = norm_sq(convolve(one_ai, one_a))
    fwd = norm_sq(convolve(one_a, one_ai))
    size = len(a)
    bound = Fraction(size ** 4, len(product_set(a, inverse_set(a))))
    return NormReport(rev, fwd, rev == fwd, bound, fwd >= bound)


# ---------------------------------------------------------------- local norms


def _check_local(f, bp):
    if not bp:
        raise EmptySetError("local norms need a non-empty B'")
    if bp.group is not f.group:
        raise GroupMismatchError("B' and the function live on different groups")


def local_l2_sq(f: GroupFunction, c, x: int, bp: Subset):
    """Mean of (F(y) - c)^2 over y in xB', exactly (float in fast mode)."""
    _check_local(f, bp)
    ys = f.group.mul_table[f.group.check(x), bp.indices()]
    if not f.exact:
        return float(np.mean((f.num[ys] - float(c)) ** 2))
    c = Fraction(c)
    tot = sum((Fraction(int(f.num[y]), f.den) - c) ** 2 for y in ys)
    return tot / len(ys)


def local_l2_distance(f: GroupFunction, c, x: int, bp: Subset) -> float:
    """(1/|B'| sum_{y in xB'} (F(y) - c)^2)^(1/2)."""
    return math.sqrt(local_l2_sq(f, c, x, bp))


def local_linf_distance(f: GroupFunction, x: int, bp: Subset):
    """max over y in xB' of |F(y) - F(x)|."""
    _check_local(f, bp)
    x = f.group.check(x)
    ys = f.group.mul_table[x, bp.indices()]
    diff = max(abs(int(f.num[y]) - int(f.num[x])) for y in ys) if f.exact else float(np.abs(f.num[ys] - f.num[x]).max())
    return Fraction(diff, f.den) if f.exact else diff


def local_linf_all(f: GroupFunction, bp: Subset) -> GroupFunction:
    """x -> local_linf_distance(F, x, B') for every x at once."""
    _check_local(f, bp)
    grid = f.group.mul_table[:, bp.indices()]
    num = np.abs(f.num[grid] - f.num[:, None]).max(axis=1)
    return GroupFunction(f.group, num, f.den, f.exact)


def local_l2_sq_all(f: GroupFunction, centers: GroupFunction, bp: Subset) -> GroupFunction:
    """x -> mean over y in xB' of (F(y) - C(x))^2 for every x at once."""
    _check_local(f, bp)
    a, c, den, exact = f._align(centers)
    grid = f.group.mul_table[:, bp.indices()]
    if exact and (_bound(a) + _bound(c)) ** 2 * len(bp) >= _INT_LIMIT:
        a, c = a.astype(object), c.astype(object)
    diff = a[grid] - c[:, None]
    num = (diff * diff).sum(axis=1)
    if not exact:
        return GroupFunction(f.group, num / len(bp), exact=False)
    return GroupFunction(f.group, num, den * den * len(bp))
