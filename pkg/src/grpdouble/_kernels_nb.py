"""numba kernels over single-word (order <= 64) subset masks.

Every function here has a twin with the same signature in ``_kernels_np``.
Tables: ``ltab[a, c, v]`` is the mask of ``a * g`` for the elements ``g`` of
byte chunk ``c`` whose bits are set in ``v``; ``itab[c, v]`` likewise for
inverses.
"""
import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def _pop(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def _translate(ltab, a, m):
    out = np.uint64(0)
    for c in range(ltab.shape[1]):
        byte = (m >> np.uint64(8 * c)) & np.uint64(0xFF)
        if byte:
            out |= ltab[a, c, byte]
    return out


@njit(cache=True)
def _invert(itab, m):
    out = np.uint64(0)
    for c in range(itab.shape[0]):
        byte = (m >> np.uint64(8 * c)) & np.uint64(0xFF)
        if byte:
            out |= itab[c, byte]
    return out


@njit(cache=True)
def _product(ltab, left, right, n):
    out = np.uint64(0)
    for a in range(n):
        if (left >> np.uint64(a)) & np.uint64(1):
            out |= _translate(ltab, a, right)
    return out


@njit(cache=True)
def popcount(masks):
    out = np.empty(masks.shape[0], dtype=np.int64)
    for i in range(masks.shape[0]):
        out[i] = _pop(masks[i])
    return out


@njit(cache=True)
def invert(itab, masks):
    out = np.empty_like(masks)
    for i in range(masks.shape[0]):
        out[i] = _invert(itab, masks[i])
    return out


@njit(cache=True)
def translate(ltab, a, masks):
    out = np.empty_like(masks)
    for i in range(masks.shape[0]):
        out[i] = _translate(ltab, a, masks[i])
    return out


@njit(cache=True)
def product(ltab, left, right, n):
    out = np.empty_like(left)
    for i in range(left.shape[0]):
        out[i] = _product(ltab, left[i], right[i], n)
    return out


@njit(cache=True)
def doubling(ltab, itab, masks, n):
    """Columns: |A|, |AA^-1|, |A^-1 A|, AA^-1 == A^-1 A."""
    out = np.empty((masks.shape[0], 4), dtype=np.int64)
    for i in range(masks.shape[0]):
        a = masks[i]
        ai = _invert(itab, a)
        p = _product(ltab, a, ai, n)
        q = _product(ltab, ai, a, n)
        out[i, 0] = _pop(a)
        out[i, 1] = _pop(p)
        out[i, 2] = _pop(q)
        out[i, 3] = 1 if p == q else 0
    return out


@njit(cache=True)
def correlation(ltab, masks, n):
    """``out[i, x] = |m & x m|``; with ``m = A^-1`` this is 1_{A^-1} * 1_A."""
    out = np.empty((masks.shape[0], n), dtype=np.int64)
    for i in range(masks.shape[0]):
        m = masks[i]
        for x in range(n):
            out[i, x] = _pop(m & _translate(ltab, x, m))
    return out


@njit(cache=True)
def freiman(ltab, itab, masks, n, identity, inv_table):
    """Status 0 not applicable (K >= 3/2), 1 found, 2 refuted; plus |A^-1 A|."""
    status = np.zeros(masks.shape[0], dtype=np.int8)
    hsize = np.zeros(masks.shape[0], dtype=np.int64)
    e_bit = np.uint64(1) << np.uint64(identity)
    for i in range(masks.shape[0]):
        a = masks[i]
        size = _pop(a)
        ai = _invert(itab, a)
        dd = _pop(_product(ltab, a, ai, n))
        h = _product(ltab, ai, a, n)
        hsize[i] = _pop(h)
        if 2 * dd >= 3 * size:
            continue
        ok = (h & e_bit) != 0 and _invert(itab, h) == h and _product(ltab, h, h, n) == h
        low = 0
        while not (a >> np.uint64(low)) & np.uint64(1):
            low += 1
        ok = ok and (_translate(ltab, inv_table[low], a) & ~h) == 0
        ok = ok and hsize[i] <= dd
        status[i] = 1 if ok else 2
    return status, hsize


@njit(cache=True)
def hamidoune(ltab, itab, masks, subs, sub_sizes, n):
    """First subgroup index (in the given order) meeting branch 2, else branch 1."""
    idx = np.full(masks.shape[0], -1, dtype=np.int64)
    branch = np.zeros(masks.shape[0], dtype=np.int8)
    for i in range(masks.shape[0]):
        a = masks[i]
        ai = _invert(itab, a)
        aai = _product(ltab, a, ai, n)
        aia = _product(ltab, ai, a, n)
        s2 = _pop(aai)
        s1 = _pop(aia)
        for j in range(subs.shape[0]):
            h = subs[j]
            ah = _product(ltab, a, h, n)
            if 2 * _pop(ah) - sub_sizes[j] <= s2 and _product(ltab, ah, ai, n) == aai:
                idx[i] = j
                branch[i] = 2
                break
            ha = _product(ltab, h, a, n)
            if 2 * _pop(ha) - sub_sizes[j] <= s1 and _product(ltab, ai, ha, n) == aia:
                idx[i] = j
                branch[i] = 1
                break
    return idx, branch


@njit(cache=True)
def kneser(ltab, itab, masks, subs, sub_sizes, n):
    """First subgroup index with (A-A)+H = A-A and |A-A| >= 2|A+H| - |H|."""
    idx = np.full(masks.shape[0], -1, dtype=np.int64)
    for i in range(masks.shape[0]):
        a = masks[i]
        d = _product(ltab, _invert(itab, a), a, n)
        sd = _pop(d)
        for j in range(subs.shape[0]):
            h = subs[j]
            if 2 * _pop(_product(ltab, a, h, n)) - sub_sizes[j] <= sd and _product(ltab, d, h, n) == d:
                idx[i] = j
                break
    return idx


@njit(cache=True)
def coset_counts(masks, coset_masks, coset_owner, nsub):
    out = np.zeros((masks.shape[0], nsub), dtype=np.int64)
    for i in range(masks.shape[0]):
        a = masks[i]
        for c in range(coset_masks.shape[0]):
            if a & coset_masks[c]:
                out[i, coset_owner[c]] += 1
    return out


@njit(cache=True)
def convolve(mul, inv, f, g):
    """(f * g)(x) = sum_y f(y) g(y^-1 x) for numeric f, g."""
    n = f.shape[0]
    out = np.zeros(n, dtype=f.dtype)
    for y in range(n):
        fy = f[y]
        if fy == 0:
            continue
        row = mul[y]
        for z in range(n):
            out[row[z]] += fy * g[z]
    return out
