"""Batch engine over single-word subset masks for groups of order <= 64.

Subsets become ``uint64`` masks and every product set is a handful of
byte-table lookups per element of the left factor. The kernels come from
the active backend (see ``_backend``); all entry points take ``impl`` to
force one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import CapExceededError
from .groups import Group
from .sets import Subset, enumerate_subgroups, left_cosets

MAX_MASK_ORDER = 64
CHECKS = ("jump", "norm", "freiman", "kneser", "hamidoune", "covering")

_VBITS = ((np.arange(256)[:, None] >> np.arange(8)[None, :]) & 1).astype(bool)


def _byte_table(images, n):
    """images[..., g] -> element hit by g; returns table[..., chunk, byte]."""
    nch = (n + 7) // 8
    lead = images.shape[:-1]
    padded = np.full(lead + (nch * 8,), -1, dtype=np.int64)
    padded[..., :n] = images
    one = np.where(padded >= 0, np.left_shift(np.uint64(1), np.maximum(padded, 0).astype(np.uint64)), np.uint64(0))
    one = one.reshape(lead + (nch, 1, 8))
    picked = np.where(_VBITS, one, np.uint64(0))
    return np.bitwise_or.reduce(picked, axis=-1)


@dataclass(frozen=True, eq=False)
class MaskTables:
    n: int
    identity: int
    ltab: np.ndarray
    itab: np.ndarray
    inv_table: np.ndarray


def tables(group: Group) -> MaskTables:
    if group.order > MAX_MASK_ORDER:
        raise CapExceededError(f"mask engine handles order <= {MAX_MASK_ORDER}, got {group.order}")
    cached = group.__dict__.get("_mask_tables")
    if cached is None:
        n = group.order
        mul = group.mul_table.astype(np.int64)
        cached = MaskTables(
            n,
            group.identity,
            np.ascontiguousarray(_byte_table(mul, n)),
            np.ascontiguousarray(_byte_table(group.inv_table.astype(np.int64), n)),
            group.inv_table.astype(np.int64),
        )
        group.__dict__["_mask_tables"] = cached
    return cached


def to_masks(subsets) -> np.ndarray:
    return np.array([s.bits for s in subsets], dtype=np.uint64)


def from_mask(group, mask) -> Subset:
    return Subset(group, int(mask))


@dataclass(frozen=True, eq=False)
class SubgroupData:
    subgroups: list
    masks: np.ndarray
    sizes: np.ndarray
    coset_masks: np.ndarray
    coset_owner: np.ndarray


def subgroup_data(group: Group) -> SubgroupData:
    """Subgroups in increasing (size, mask) order with their left cosets."""
    cached = group.__dict__.get("_subgroup_data")
    if cached is None:
        subs = enumerate_subgroups(group)
        cm, owner = [], []
        for j, h in enumerate(subs):
            for c in left_cosets(h):
                cm.append(c.bits)
                owner.append(j)
        cached = SubgroupData(
            subs,
            to_masks(subs),
            np.array([len(h) for h in subs], dtype=np.int64),
            np.array(cm, dtype=np.uint64),
            np.array(owner, dtype=np.int64),
        )
        group.__dict__["_subgroup_data"] = cached
    return cached


def all_masks(n, start=1, stop=None) -> np.ndarray:
    stop = (1 << n) if stop is None else stop
    return np.arange(start, stop, dtype=np.uint64)


def analyze_masks(group: Group, masks, checks=CHECKS, impl=None) -> dict:
    """Run the selected detectors on a batch of non-empty masks.

    Returns arrays keyed by quantity: ``size``, ``dd`` (|AA^-1|), ``dd_rev``
    (|A^-1 A|), ``sym``; ``jump_min``; ``norm_fwd``/``norm_rev``;
    ``freiman``/``freiman_h``; ``kneser`` (subgroup index or -1, absent for
    non-abelian groups); ``hamidoune``/``hamidoune_branch``; ``cover_R``
    (one column per subgroup). Subgroup indices refer to
    ``subgroup_data(group).subgroups``.
    """
    k = impl or kernels()
    t = tables(group)
    n = t.n
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    out = {}
    d = k.doubling(t.ltab, t.itab, masks, n)
    out["size"], out["dd"], out["dd_rev"], out["sym"] = d[:, 0], d[:, 1], d[:, 2], d[:, 3].astype(bool)
    if "jump" in checks or "norm" in checks:
        u = k.correlation(t.ltab, k.invert(t.itab, masks), n)
        out["jump_min"] = np.where(u > 0, u, np.iinfo(np.int64).max).min(axis=1)
        out["norm_rev"] = (u * u).sum(axis=1)
    if "norm" in checks:
        v = k.correlation(t.ltab, masks, n)
        out["norm_fwd"] = (v * v).sum(axis=1)
    if "freiman" in checks:
        out["freiman"], out["freiman_h"] = k.freiman(t.ltab, t.itab, masks, n, t.identity, t.inv_table)
    if {"kneser", "hamidoune", "covering"} & set(checks):
        sd = subgroup_data(group)
        if "kneser" in checks and group.is_abelian:
            out["kneser"] = k.kneser(t.ltab, t.itab, masks, sd.masks, sd.sizes, n)
        if "hamidoune" in checks:
            out["hamidoune"], out["hamidoune_branch"] = k.hamidoune(t.ltab, t.itab, masks, sd.masks, sd.sizes, n)
        if "covering" in checks:
            out["cover_R"] = k.coset_counts(masks, sd.coset_masks, sd.coset_owner, len(sd.subgroups))
    return out


def pareto(sizes, counts):
    """Indices of Pareto-minimal (size, count) pairs, first index kept on ties."""
    order = sorted(range(len(sizes)), key=lambda j: (sizes[j], counts[j], j))
    keep, best = [], None
    for j in order:
        if best is None or counts[j] < best:
            keep.append(j)
            best = counts[j]
    return keep
