"""Finite groups as index-based Cayley tables, with builders and validation."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import GroupError

DEFAULT_MAX_ORDER = 4096
SYMMETRIC_MAX_DEGREE = 6
EXHAUSTIVE_ASSOC_LIMIT = 64


@dataclass(frozen=True, eq=False)
class Group:
    """A finite group given by its multiplication and inverse tables.

    Elements are the integers ``0..order-1``. Builders always put the
    identity at index 0; tables loaded from a file may put it anywhere.
    """

    order: int
    mul_table: np.ndarray
    inv_table: np.ndarray
    identity: int = 0
    label: str = ""

    def __post_init__(self):
        mul = np.ascontiguousarray(self.mul_table, dtype=np.int32)
        inv = np.ascontiguousarray(self.inv_table, dtype=np.int32)
        if mul.shape != (self.order, self.order) or inv.shape != (self.order,):
            raise GroupError(f"table shapes {mul.shape}, {inv.shape} do not match order {self.order}")
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul_table", mul)
        object.__setattr__(self, "inv_table", inv)

    def __repr__(self):
        return f"Group({self.label or '?'}, order={self.order})"

    def __len__(self):
        return self.order

    def check(self, a):
        if not 0 <= a < self.order:
            raise IndexError(f"element {a} out of range for group of order {self.order}")
        return a

    def mul(self, a, b):
        return int(self.mul_table[self.check(a), self.check(b)])

    def inv(self, a):
        return int(self.inv_table[self.check(a)])

    def element_order(self, a):
        k, x = 1, self.check(a)
        while x != self.identity:
            x = int(self.mul_table[x, a])
            k += 1
        return k

    @cached_property
    def is_abelian(self):
        return bool(np.array_equal(self.mul_table, self.mul_table.T))


def mul(g: Group, a: int, b: int) -> int:
    return g.mul(a, b)


def inv(g: Group, a: int) -> int:
    return g.inv(a)


@dataclass
class AxiomReport:
    closure: bool = True
    identity: bool = True
    inverses: bool = True
    associativity: bool = True
    method: str = "exhaustive"
    counterexample: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.closure and self.identity and self.inverses and self.associativity

    def to_dict(self):
        return {
            "closure": self.closure,
            "identity": self.identity,
            "inverses": self.inverses,
            "associativity": self.associativity,
            "method": self.method,
            "counterexample": self.counterexample,
        }


def _magma_generators(table):
    """Greedy generating set: every element is reachable by right-multiplying by generators."""
    n = table.shape[0]
    reached = np.zeros(n, dtype=bool)
    gens = []
    for g in range(n):
        if reached[g]:
            continue
        gens.append(g)
        reached[g] = True
        frontier = np.flatnonzero(reached)
        while len(frontier):
            cols = table[frontier][:, gens].ravel()
            frontier = np.unique(cols[~reached[cols]])
            reached[frontier] = True
    return gens


def _associativity_witness(table, exhaustive_limit):
    n = table.shape[0]
    if n <= exhaustive_limit:
        # (ab)c vs a(bc) over all triples, sliced on a
        for a in range(n):
            left = table[table[a]]            # left[b, c] = (ab)c
            right = table[a][table]           # right[b, c] = a(bc)
            bad = np.argwhere(left != right)
            if len(bad):
                b, c = bad[0]
                return "exhaustive", (a, int(b), int(c))
        return "exhaustive", None
    # Light's test: checking (x g) y = x (g y) for generators g suffices.
    for g in _magma_generators(table):
        left = table[table[:, g]]             # left[x, y] = (xg)y
        right = table[:, table[g]]            # right[x, y] = x(gy)
        bad = np.argwhere(left != right)
        if len(bad):
            x, y = bad[0]
            return "light", (int(x), g, int(y))
    return "light", None


def verify_group_axioms(g: Group, exhaustive_limit=EXHAUSTIVE_ASSOC_LIMIT) -> AxiomReport:
    """Check closure, identity, inverses and associativity of ``g``'s tables.

    Associativity is checked over all triples up to ``exhaustive_limit``
    elements and with Light's generator test above that; both are exact.
    Failures come back as data with the first counterexample found.
    """
    return check_table(g.mul_table, g.identity, g.inv_table, exhaustive_limit)


def check_table(table, identity, inv_table=None, exhaustive_limit=EXHAUSTIVE_ASSOC_LIMIT):
    table = np.asarray(table)
    n = table.shape[0]
    rep = AxiomReport()
    if table.ndim != 2 or table.shape != (n, n) or n == 0:
        rep.closure = rep.identity = rep.inverses = rep.associativity = False
        rep.counterexample = {"axiom": "closure", "shape": list(table.shape)}
        return rep
    out = np.argwhere((table < 0) | (table >= n))
    if len(out) or not 0 <= identity < n:
        rep.closure = False
        rep.identity = rep.inverses = rep.associativity = False
        where = [int(v) for v in out[0]] if len(out) else []
        rep.counterexample = {"axiom": "closure", "entry": where, "identity": int(identity)}
        return rep
    ar = np.arange(n)
    bad = np.flatnonzero((table[identity] != ar) | (table[:, identity] != ar))
    if len(bad):
        rep.identity = False
        rep.counterexample = {"axiom": "identity", "element": int(bad[0])}
    if inv_table is None:
        hits = table == identity
        has = hits.any(axis=1)
        inv_table = np.where(has, hits.argmax(axis=1), -1)
    inv_table = np.asarray(inv_table)
    ok = (inv_table >= 0) & (inv_table < n)
    safe = np.where(ok, inv_table, 0)
    bad = np.flatnonzero(~ok | (table[ar, safe] != identity) | (table[safe, ar] != identity))
    if len(bad):
        rep.inverses = False
        rep.counterexample.setdefault("axiom", "inverses")
        rep.counterexample.setdefault("element", int(bad[0]))
    method, triple = _associativity_witness(table, exhaustive_limit)
    rep.method = method
    if triple is not None:
        rep.associativity = False
        rep.counterexample.setdefault("axiom", "associativity")
        rep.counterexample.setdefault("triple", list(triple))
    return rep


# ---------------------------------------------------------------- builders

def cyclic(n):
    ar = np.arange(n)
    return Group(n, (ar[:, None] + ar[None, :]) % n, (-ar) % n, 0, f"cyclic:{n}")


def dihedral(n):
    """Symmetries of the n-gon, order 2n; index ``i + n*j`` is r^i s^j."""
    i = np.arange(2 * n) % n
    j = np.arange(2 * n) // n
    # r^i s^j . r^k s^l = r^(i + (-1)^j k) s^(j+l)
    sign = np.where(j == 0, 1, -1)
    rot = (i[:, None] + sign[:, None] * i[None, :]) % n
    ref = (j[:, None] + j[None, :]) % 2
    table = rot + n * ref
    inv = np.where(j == 0, (-i) % n, i + n)
    return Group(2 * n, table, inv, 0, f"dihedral:{n}")


def symmetric(n):
    if not 1 <= n <= SYMMETRIC_MAX_DEGREE:
        raise GroupError(f"symmetric:n needs 1 <= n <= {SYMMETRIC_MAX_DEGREE}, got {n}")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    m = len(perms)
    weights = n ** np.arange(n)
    codes = perms @ weights
    order = np.argsort(codes)
    # (p q)(i) = p(q(i))
    comp = perms[np.arange(m)[:, None, None], perms[None, :, :]]
    table = order[np.searchsorted(codes[order], comp @ weights)]
    inverse = np.argsort(perms, axis=1)
    inv = order[np.searchsorted(codes[order], inverse @ weights)]
    return Group(m, table, inv, 0, f"symmetric:{n}")


def quaternion8():
    """Units +-1, +-i, +-j, +-k stored at indices 0..7 in that order."""
    # unit products: (unit, sign) of u*v for u, v in (1, i, j, k)
    prod = {
        (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
        (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
        (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
        (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
    }
    table = np.zeros((8, 8), dtype=np.int64)
    for a, b in itertools.product(range(8), repeat=2):
        unit, sign = prod[a // 2, b // 2]
        sign *= (-1) ** (a % 2 + b % 2)
        table[a, b] = 2 * unit + (sign < 0)
    inv = np.array([0, 1, 3, 2, 5, 4, 7, 6])
    return Group(8, table, inv, 0, "quaternion:8")


def direct_product(g1: Group, g2: Group, label=None):
    n1, n2 = g1.order, g2.order
    m1 = g1.mul_table.astype(np.int64)
    m2 = g2.mul_table.astype(np.int64)
    table = (m1[:, None, :, None] * n2 + m2[None, :, None, :]).reshape(n1 * n2, n1 * n2)
    inv = (g1.inv_table[:, None].astype(np.int64) * n2 + g2.inv_table[None, :]).ravel()
    return Group(n1 * n2, table, inv, g1.identity * n2 + g2.identity,
                 label or f"product:{g1.label},{g2.label}")


def load_table(path, max_order=DEFAULT_MAX_ORDER, label=None) -> Group:
    """Read a Cayley-table JSON file ``{"order", "identity", "table"}``."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise GroupError(f"cannot read Cayley table {path}: {exc}") from exc
    if not isinstance(doc, dict) or not {"order", "identity", "table"} <= doc.keys():
        raise GroupError(f"{path}: expected an object with order, identity and table")
    n, e, rows = doc["order"], doc["identity"], doc["table"]
    if not isinstance(n, int) or not isinstance(e, int) or n < 1:
        raise GroupError(f"{path}: order and identity must be integers")
    if n > max_order:
        raise GroupError(f"{path}: order {n} exceeds cap {max_order}")
    if (not isinstance(rows, list) or len(rows) != n
            or any(not isinstance(r, list) or len(r) != n for r in rows)):
        raise GroupError(f"{path}: table must be {n}x{n}")
    try:
        table = np.array(rows, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise GroupError(f"{path}: non-integer table entry") from exc
    rep = check_table(table, e)
    if not rep.ok:
        raise GroupError(f"{path}: table fails group axioms: {rep.counterexample}")
    hits = table == e
    return Group(n, table, hits.argmax(axis=1), e, label or f"file:{path}")


# ---------------------------------------------------------------- spec parsing

def _parse(spec, pos, max_order):
    """Parse one group spec starting at ``pos``; return ``(order, thunk, end)``.

    The order is computed before any table is built so the cap can be
    enforced up front.
    """
    head, sep, _ = spec[pos:].partition(":")
    if not sep:
        raise GroupError(f"bad group spec {spec[pos:]!r}")
    pos += len(head) + 1
    if head == "product":
        n1, t1, pos = _parse(spec, pos, max_order)
        if pos >= len(spec) or spec[pos] != ",":
            raise GroupError(f"product needs two comma-separated factors in {spec!r}")
        n2, t2, pos = _parse(spec, pos + 1, max_order)
        return n1 * n2, (lambda: direct_product(t1(), t2())), pos
    if head == "file":
        end = spec.find(",", pos)
        end = len(spec) if end < 0 else end
        path = spec[pos:end]
        grp = load_table(path, max_order)
        return grp.order, (lambda: grp), end
    end = pos
    while end < len(spec) and spec[end].isdigit():
        end += 1
    if end == pos:
        raise GroupError(f"missing integer parameter in {spec!r}")
    k = int(spec[pos:end])
    if head == "cyclic":
        if k < 1:
            raise GroupError("cyclic:n needs n >= 1")
        return k, (lambda: cyclic(k)), end
    if head == "dihedral":
        if k < 1:
            raise GroupError("dihedral:n needs n >= 1")
        return 2 * k, (lambda: dihedral(k)), end
    if head == "symmetric":
        if not 1 <= k <= SYMMETRIC_MAX_DEGREE:
            raise GroupError(f"symmetric:n needs 1 <= n <= {SYMMETRIC_MAX_DEGREE}")
        return math.factorial(k), (lambda: symmetric(k)), end
    if head == "quaternion":
        if k != 8:
            raise GroupError("only quaternion:8 is supported")
        return 8, quaternion8, end
    raise GroupError(f"unknown group family {head!r}")


def build_group(spec: str, max_order=DEFAULT_MAX_ORDER) -> Group:
    """Build a group from ``cyclic:n``, ``dihedral:n``, ``symmetric:n``,
    ``quaternion:8``, ``product:<spec>,<spec>`` or ``file:<path>``."""
    spec = spec.strip()
    order, thunk, end = _parse(spec, 0, max_order)
    if end != len(spec):
        raise GroupError(f"trailing text in group spec {spec!r}")
    if order > max_order:
        raise GroupError(f"group order {order} exceeds cap {max_order}")
    grp = thunk()
    if grp.label != spec and not spec.startswith("file:"):
        object.__setattr__(grp, "label", spec)
    return grp
