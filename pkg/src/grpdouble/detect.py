"""Structural detectors and witness finders for sets of small doubling."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .convolution import GroupFunction, convolve
from .errors import EmptySetError, NotApplicableError
from .masks import pareto
from .sets import (
    Subset,
    coset_trace,
    doubling_report,
    enumerate_subgroups,
    inverse_set,
    is_subgroup,
    left_translate,
    product_set,
)


def _nonempty(a):
    if not a:
        raise EmptySetError("detector needs a non-empty set")


@dataclass
class FreimanResult:
    status: str                     # found | not-applicable | refuted
    ratio: Fraction
    subgroup: Subset | None = None
    representative: int | None = None
    failures: list = field(default_factory=list)

    @property
    def found(self):
        return self.status == "found"

    def to_dict(self):
        return {
            "status": self.status,
            "ratio": str(self.ratio),
            "subgroup": None if self.subgroup is None else self.subgroup.tolist(),
            "representative": self.representative,
            "failures": list(self.failures),
        }


def freiman_coset(a: Subset) -> FreimanResult:
    """For K = |AA^-1|/|A| < 3/2, return H = A^-1 A and a with A inside aH.

    ``refuted`` would mean the small-doubling coset theorem failed on this
    input; it is reported, never raised.
    """
    _nonempty(a)
    rep = doubling_report(a)
    if rep.ratio >= Fraction(3, 2):
        return FreimanResult("not-applicable", rep.ratio)
    h = product_set(inverse_set(a), a)
    rep_elt = a.min()
    failures = []
    if not is_subgroup(h):
        failures.append("A^-1 A is not a subgroup")
    if not a <= left_translate(rep_elt, h):
        failures.append("A not inside aH")
    if len(h) > rep.ratio * len(a):
        failures.append("|H| > K|A|")
    return FreimanResult("refuted" if failures else "found", rep.ratio, h, rep_elt, failures)


@dataclass(frozen=True)
class JumpReport:
    minimum: int
    bound: int
    passed: bool
    argmin: int

    @property
    def tight(self):
        return self.minimum == self.bound

    def to_dict(self):
        return {"minimum": self.minimum, "bound": self.bound, "passed": self.passed, "argmin": self.argmin}


def jump_check(a: Subset) -> JumpReport:
    """min of 1_{A^-1} * 1_A over A^-1 A against 2|A| - |AA^-1|."""
    _nonempty(a)
    ai = inverse_set(a)
    u = convolve(GroupFunction.indicator(ai), GroupFunction.indicator(a))
    vals = np.where(u.num > 0, u.num, np.iinfo(np.int64).max)
    x = int(np.argmin(vals))
    m = int(vals[x])
    bound = 2 * len(a) - len(product_set(a, ai))
    return JumpReport(m, bound, m >= bound, x)


@dataclass(frozen=True)
class CoverEntry:
    subgroup: Subset
    R: int
    representatives: list

    def to_dict(self):
        return {"H_size": len(self.subgroup), "R": self.R,
                "H": self.subgroup.tolist(), "X": list(self.representatives)}


@dataclass(frozen=True)
class CoveringFrontier:
    entries: list

    def pairs(self):
        return [(len(e.subgroup), e.R) for e in self.entries]

    def to_dict(self):
        return {"entries": [e.to_dict() for e in self.entries]}


def covering_frontier(a: Subset) -> CoveringFrontier:
    """Pareto-minimal (|H|, R) over all subgroups H, with X one element of A per coset."""
    _nonempty(a)
    subs = enumerate_subgroups(a.group)
    traces = [coset_trace(a, h) for h in subs]
    keep = pareto([len(h) for h in subs], [t.R for t in traces])
    return CoveringFrontier([CoverEntry(subs[j], traces[j].R, traces[j].representatives) for j in keep])


def smallest_containing_coset(a: Subset) -> Subset:
    """Smallest subgroup H with A inside a single left coset aH."""
    _nonempty(a)
    shifted = left_translate(a.group.inv(a.min()), a)
    return next(h for h in enumerate_subgroups(a.group) if shifted <= h)


@dataclass
class WitnessReport:
    theorem: str                    # kneser | hamidoune-1 | hamidoune-2
    found: bool
    subgroup: Subset | None = None
    checks: list = field(default_factory=list)   # (text, left, right, pass)

    @property
    def branch(self):
        return int(self.theorem[-1]) if self.theorem.startswith("hamidoune-") else None

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "found": self.found,
            "subgroup": None if self.subgroup is None else self.subgroup.tolist(),
            "checks": [{"claim": c, "left": l, "right": r, "pass": p} for c, l, r, p in self.checks],
        }


def kneser_witness(a: Subset) -> WitnessReport:
    """H with (A-A)+H = A-A and |A-A| >= 2|A+H| - |H|, smallest H first."""
    _nonempty(a)
    if not a.group.is_abelian:
        raise NotApplicableError("Kneser's theorem needs an abelian group")
    diff = product_set(a, inverse_set(a))
    for h in enumerate_subgroups(a.group):
        stab = product_set(diff, h)
        ah = product_set(a, h)
        rhs = 2 * len(ah) - len(h)
        if stab == diff and len(diff) >= rhs:
            return WitnessReport("kneser", True, h, [
                ("A-A+H = A-A", len(stab), len(diff), True),
                ("|A-A| >= 2|A+H| - |H|", len(diff), rhs, True),
            ])
    return WitnessReport("kneser", False)


def _hamidoune_branch(a, ai, h, branch, target):
    if branch == 2:
        ah = product_set(a, h)
        mid = product_set(ah, ai)
        txt = ("AHA^-1 = AA^-1", "|AA^-1| >= 2|AH| - |H|")
    else:
        ah = product_set(h, a)
        mid = product_set(ai, ah)
        txt = ("A^-1HA = A^-1A", "|A^-1A| >= 2|HA| - |H|")
    rhs = 2 * len(ah) - len(h)
    eq = mid == target
    ineq = len(target) >= rhs
    return eq and ineq, [(txt[0], len(mid), len(target), eq), (txt[1], len(target), rhs, ineq)]


def hamidoune_witness(a: Subset, branches=(2, 1)) -> WitnessReport:
    """Subgroup satisfying one of Hamidoune's two alternatives.

    Subgroups are scanned by increasing size; for each, the branches are
    tried in the order given.
    """
    _nonempty(a)
    ai = inverse_set(a)
    targets = {2: product_set(a, ai), 1: product_set(ai, a)}
    for h in enumerate_subgroups(a.group):
        for br in branches:
            ok, checks = _hamidoune_branch(a, ai, h, br, targets[br])
            if ok:
                return WitnessReport(f"hamidoune-{br}", True, h, checks)
    return WitnessReport("hamidoune", False)


@dataclass
class BoundReport:
    epsilon: Fraction
    branch: int
    subgroup: Subset
    h_size: int
    h_bound: Fraction
    R: int
    R_bound: Fraction
    passed: bool

    def to_dict(self):
        return {
            "epsilon": str(self.epsilon),
            "branch": self.branch,
            "H": self.subgroup.tolist(),
            "H_size": self.h_size,
            "H_size_bound": str(self.h_bound),
            "R": self.R,
            "R_bound": str(self.R_bound),
            "passed": self.passed,
        }


def covering_bound_check(a: Subset) -> BoundReport:
    """|H| >= eps|A| and R <= 2/eps - 1 for a Hamidoune subgroup, eps = 2 - ratio.

    Uses a branch-2 subgroup when one exists; otherwise a branch-1 subgroup,
    whose bound concerns right cosets Hx, counted as left cosets of A^-1.
    """
    _nonempty(a)
    eps = doubling_report(a).epsilon
    if eps <= 0:
        raise NotApplicableError("covering bound needs doubling ratio below 2")
    wit = hamidoune_witness(a, branches=(2,))
    branch = 2
    target = a
    if not wit.found:
        wit = hamidoune_witness(a, branches=(1,))
        branch = 1
        target = inverse_set(a)
    if not wit.found:
        raise NotApplicableError("no Hamidoune subgroup found")
    h = wit.subgroup
    r = coset_trace(target, h).R
    h_bound = eps * len(a)
    r_bound = 2 / eps - 1
    return BoundReport(eps, branch, h, len(h), h_bound, r, r_bound, len(h) >= h_bound and r <= r_bound)
