"""Pure-numpy twins of the kernels in ``_kernels_nb``, vectorised over the batch."""
import numpy as np

NAME = "numpy"

_U1 = np.uint64(1)
_BYTE = np.uint64(0xFF)


def _bytes(masks, nchunks):
    return [((masks >> np.uint64(8 * c)) & _BYTE).astype(np.intp) for c in range(nchunks)]


def _gather(ltab, a, chunks, rows=None):
    out = None
    for c, b in enumerate(chunks):
        part = ltab[a, c, b if rows is None else b[rows]]
        out = part if out is None else out | part
    return out


def popcount(masks):
    return np.bitwise_count(masks).astype(np.int64)


def invert(itab, masks):
    out = np.zeros_like(masks)
    for c, b in enumerate(_bytes(masks, itab.shape[0])):
        out |= itab[c, b]
    return out


def translate(ltab, a, masks):
    return _gather(ltab, a, _bytes(masks, ltab.shape[1]))


def product(ltab, left, right, n):
    out = np.zeros_like(left)
    chunks = _bytes(right, ltab.shape[1])
    for a in range(n):
        rows = np.flatnonzero((left >> np.uint64(a)) & _U1)
        if len(rows):
            out[rows] |= _gather(ltab, a, chunks, rows)
    return out


def doubling(ltab, itab, masks, n):
    ai = invert(itab, masks)
    p = product(ltab, masks, ai, n)
    q = product(ltab, ai, masks, n)
    return np.stack([popcount(masks), popcount(p), popcount(q), (p == q).astype(np.int64)], axis=1)


def correlation(ltab, masks, n):
    chunks = _bytes(masks, ltab.shape[1])
    out = np.empty((len(masks), n), dtype=np.int64)
    for x in range(n):
        out[:, x] = popcount(masks & _gather(ltab, x, chunks))
    return out


def freiman(ltab, itab, masks, n, identity, inv_table):
    size = popcount(masks)
    ai = invert(itab, masks)
    dd = popcount(product(ltab, masks, ai, n))
    h = product(ltab, ai, masks, n)
    hsize = popcount(h)
    status = np.zeros(len(masks), dtype=np.int8)
    live = 2 * dd < 3 * size
    ok = ((h >> np.uint64(identity)) & _U1).astype(bool)
    ok &= invert(itab, h) == h
    ok &= product(ltab, h, h, n) == h
    low = popcount((masks & (~masks + _U1)) - _U1)
    shift = np.asarray(inv_table, dtype=np.intp)[low]
    moved = np.zeros_like(masks)
    for c, b in enumerate(_bytes(masks, ltab.shape[1])):
        moved |= ltab[shift, c, b]
    ok &= (moved & ~h) == 0
    ok &= hsize <= dd
    status[live] = np.where(ok[live], 1, 2)
    return status, hsize


def hamidoune(ltab, itab, masks, subs, sub_sizes, n):
    idx = np.full(len(masks), -1, dtype=np.int64)
    branch = np.zeros(len(masks), dtype=np.int8)
    ai = invert(itab, masks)
    aai = product(ltab, masks, ai, n)
    aia = product(ltab, ai, masks, n)
    s2, s1 = popcount(aai), popcount(aia)
    pending = np.arange(len(masks))
    for j in range(len(subs)):
        if not len(pending):
            break
        a, inv_a = masks[pending], ai[pending]
        h = np.full(len(pending), subs[j], dtype=np.uint64)
        ah = product(ltab, a, h, n)
        hit2 = (2 * popcount(ah) - sub_sizes[j] <= s2[pending]) & (product(ltab, ah, inv_a, n) == aai[pending])
        ha = product(ltab, h, a, n)
        hit1 = (2 * popcount(ha) - sub_sizes[j] <= s1[pending]) & (product(ltab, inv_a, ha, n) == aia[pending])
        hit = hit2 | hit1
        idx[pending[hit]] = j
        branch[pending[hit]] = np.where(hit2[hit], 2, 1)
        pending = pending[~hit]
    return idx, branch


def kneser(ltab, itab, masks, subs, sub_sizes, n):
    idx = np.full(len(masks), -1, dtype=np.int64)
    d = product(ltab, invert(itab, masks), masks, n)
    sd = popcount(d)
    pending = np.arange(len(masks))
    for j in range(len(subs)):
        if not len(pending):
            break
        h = np.full(len(pending), subs[j], dtype=np.uint64)
        a, dp = masks[pending], d[pending]
        hit = (2 * popcount(product(ltab, a, h, n)) - sub_sizes[j] <= sd[pending]) & (product(ltab, dp, h, n) == dp)
        idx[pending[hit]] = j
        pending = pending[~hit]
    return idx


def coset_counts(masks, coset_masks, coset_owner, nsub):
    out = np.zeros((len(masks), nsub), dtype=np.int64)
    for cm, owner in zip(coset_masks, coset_owner):
        out[:, owner] += (masks & cm) != 0
    return out


def convolve(mul, inv, f, g):
    supp = np.flatnonzero(f)
    if not len(supp):
        return np.zeros_like(f)
    return np.asarray(f[supp] @ g[mul[inv[supp]]], dtype=f.dtype)
