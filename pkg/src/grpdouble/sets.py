"""Subsets of a finite group as bit-vectors, product sets, doubling and cosets."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceededError, EmptySetError, GroupMismatchError, NotApplicableError
from .groups import Group

SUBGROUP_ENUM_CAP = 256


def _to_bool(bits, n):
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


def _from_bool(arr):
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


class Subset:
    """A subset of ``group`` stored as a Python-int bit-vector (bit i = element i)."""

    __slots__ = ("group", "bits", "cardinality")

    def __init__(self, group: Group, bits: int = 0):
        if bits < 0 or bits >> group.order:
            raise ValueError(f"bit-vector has positions outside a group of order {group.order}")
        self.group = group
        self.bits = bits
        self.cardinality = bits.bit_count()

    @classmethod
    def from_indices(cls, group, indices):
        bits = 0
        for i in indices:
            bits |= 1 << group.check(int(i))
        return cls(group, bits)

    @classmethod
    def from_bool(cls, group, arr):
        return cls(group, _from_bool(np.asarray(arr, dtype=bool)))

    @classmethod
    def whole(cls, group):
        return cls(group, (1 << group.order) - 1)

    @classmethod
    def identity_set(cls, group):
        return cls(group, 1 << group.identity)

    def to_bool(self):
        return _to_bool(self.bits, self.group.order)

    def indices(self):
        return np.flatnonzero(self.to_bool())

    def tolist(self):
        return [int(i) for i in self.indices()]

    def __len__(self):
        return self.cardinality

    def __bool__(self):
        return self.bits != 0

    def __iter__(self):
        return iter(self.tolist())

    def __contains__(self, a):
        return 0 <= a < self.group.order and (self.bits >> a) & 1 == 1

    def _same(self, other):
        if not isinstance(other, Subset):
            return NotImplemented
        if other.group is not self.group:
            raise GroupMismatchError("subsets belong to different groups")
        return True

    def __eq__(self, other):
        if not isinstance(other, Subset):
            return NotImplemented
        return other.group is self.group and other.bits == self.bits

    def __hash__(self):
        return hash((id(self.group), self.bits))

    def __or__(self, other):
        self._same(other)
        return Subset(self.group, self.bits | other.bits)

    def __and__(self, other):
        self._same(other)
        return Subset(self.group, self.bits & other.bits)

    def __sub__(self, other):
        self._same(other)
        return Subset(self.group, self.bits & ~other.bits)

    def __le__(self, other):
        self._same(other)
        return self.bits & ~other.bits == 0

    def __repr__(self):
        return f"Subset({self.group.label}, {self.tolist()})"

    def min(self):
        if not self.bits:
            raise EmptySetError("empty set has no minimum")
        return (self.bits & -self.bits).bit_length() - 1


def _check_pair(a: Subset, b: Subset):
    if a.group is not b.group:
        raise GroupMismatchError("subsets belong to different groups")


def product_set(a: Subset, b: Subset) -> Subset:
    """AB = {xy : x in A, y in B}: the union of the row translates xB."""
    _check_pair(a, b)
    g = a.group
    if not a or not b:
        return Subset(g)
    out = np.zeros(g.order, dtype=bool)
    out[g.mul_table[np.ix_(a.indices(), b.indices())]] = True
    return Subset.from_bool(g, out)


def inverse_set(a: Subset) -> Subset:
    out = np.zeros(a.group.order, dtype=bool)
    out[a.group.inv_table[a.indices()]] = True
    return Subset.from_bool(a.group, out)


def left_translate(x: int, a: Subset) -> Subset:
    out = np.zeros(a.group.order, dtype=bool)
    out[a.group.mul_table[a.group.check(x), a.indices()]] = True
    return Subset.from_bool(a.group, out)


def right_translate(a: Subset, x: int) -> Subset:
    out = np.zeros(a.group.order, dtype=bool)
    out[a.group.mul_table[a.indices(), a.group.check(x)]] = True
    return Subset.from_bool(a.group, out)


def power_set(x: Subset, k: int) -> Subset:
    """X^k by repeated squaring; ``k >= 1``."""
    if k < 1:
        raise ValueError("power needs k >= 1")
    result, base = None, x
    while k:
        if k & 1:
            result = base if result is None else product_set(result, base)
        k >>= 1
        if k:
            base = product_set(base, base)
    return result


@dataclass(frozen=True)
class DoublingReport:
    set_size: int
    product_size: int
    ratio: Fraction
    symmetric_agreement: bool
    reverse_size: int

    @property
    def epsilon(self):
        return 2 - self.ratio

    def to_dict(self):
        return {
            "set_size": self.set_size,
            "product_size": self.product_size,
            "ratio": str(self.ratio),
            "symmetric_agreement": self.symmetric_agreement,
            "reverse_size": self.reverse_size,
        }


def doubling_report(a: Subset) -> DoublingReport:
    """|AA^-1| / |A| as an exact fraction, plus whether AA^-1 = A^-1 A."""
    if not a:
        raise EmptySetError("doubling of the empty set is undefined")
    ai = inverse_set(a)
    fwd = product_set(a, ai)
    rev = product_set(ai, a)
    return DoublingReport(len(a), len(fwd), Fraction(len(fwd), len(a)), fwd == rev, len(rev))


def _closure_bits(g: Group, gens) -> int:
    reached = np.zeros(g.order, dtype=bool)
    reached[g.identity] = True
    frontier = np.array([g.identity])
    gens = np.asarray(list(gens), dtype=np.intp)
    if not len(gens):
        return 1 << g.identity
    while len(frontier):
        new = g.mul_table[np.ix_(frontier, gens)].ravel()
        frontier = np.unique(new[~reached[new]])
        reached[frontier] = True
    return _from_bool(reached)


def subgroup_closure(s: Subset) -> Subset:
    """Smallest subgroup containing ``s``."""
    if not s:
        raise EmptySetError("closure of the empty set")
    return Subset(s.group, _closure_bits(s.group, s.indices()))


def is_subgroup(a: Subset) -> bool:
    if not a or a.group.identity not in a:
        return False
    return product_set(a, a) == a and inverse_set(a) <= a


def enumerate_subgroups(g: Group, cap=SUBGROUP_ENUM_CAP) -> list:
    """All subgroups of ``g`` sorted by (size, bit-vector).

    Breadth-first: start from the trivial subgroup and extend each known
    subgroup by every element outside it. Cached on the group.
    """
    if g.order > cap:
        raise CapExceededError(f"subgroup enumeration capped at order {cap}, got {g.order}")
    cache = g.__dict__.setdefault("_subgroups", None)
    if cache is not None:
        return list(cache)
    trivial = 1 << g.identity
    known = {trivial}
    queue = deque([(trivial, ())])
    while queue:
        bits, gens = queue.popleft()
        for x in range(g.order):
            if (bits >> x) & 1:
                continue
            ext = gens + (x,)
            new = _closure_bits(g, ext)
            if new not in known:
                known.add(new)
                queue.append((new, ext))
    subs = [Subset(g, b) for b in sorted(known, key=lambda b: (b.bit_count(), b))]
    g.__dict__["_subgroups"] = tuple(subs)
    return subs


def left_cosets(h: Subset) -> list:
    """Partition of the group into left cosets xH, ordered by smallest element."""
    g = h.group
    seen = 0
    out = []
    for x in range(g.order):
        if (seen >> x) & 1:
            continue
        c = left_translate(x, h)
        seen |= c.bits
        out.append(c)
    return out


@dataclass(frozen=True)
class CosetTrace:
    count: int
    representatives: list
    max_intersection: int
    cosets: list

    @property
    def R(self):
        return self.count

    def to_dict(self):
        return {
            "R": self.count,
            "representatives": list(self.representatives),
            "max_intersection": self.max_intersection,
        }


def coset_trace(a: Subset, h: Subset) -> CosetTrace:
    """Left cosets xH meeting A; each is represented by its smallest element of A."""
    _check_pair(a, h)
    if not is_subgroup(h):
        raise NotApplicableError("coset_trace needs H to be a subgroup")
    reps, best, hit = [], 0, []
    for c in left_cosets(h):
        common = a & c
        if common:
            reps.append(common.min())
            best = max(best, len(common))
            hit.append(c)
    return CosetTrace(len(reps), reps, best, hit)
