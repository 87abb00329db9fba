import os
import subprocess
import sys

import numpy as np
import pytest

from grpdouble import _backend, _kernels_nb, _kernels_np
from grpdouble.errors import CapExceededError
from grpdouble.groups import build_group, cyclic
from grpdouble.masks import all_masks, analyze_masks, from_mask, pareto, tables, to_masks
from grpdouble.sets import Subset, inverse_set, left_translate, product_set
from grpdouble.survey import row_for_subset, rows_for_masks

CHECKS = ("jump", "freiman", "kneser", "hamidoune", "covering")
GROUPS = ["cyclic:6", "cyclic:9", "dihedral:4", "quaternion:8", "symmetric:3", "product:cyclic:2,cyclic:4"]


def test_backend_selection():
    assert _backend.kernels("numpy") is _kernels_np
    assert _backend.kernels("numba") is _kernels_nb
    assert _backend.kernels().NAME in ("numba", "numpy")
    with pytest.raises(ValueError):
        _backend.kernels("fortran")


@pytest.mark.parametrize("value,expected", [("numpy", "numpy"), ("numba", "numba")])
def test_env_flag_selects_backend(value, expected):
    env = dict(os.environ, GRPDOUBLE_BACKEND=value)
    out = subprocess.run([sys.executable, "-c", "from grpdouble._backend import kernels; print(kernels().NAME)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected


def test_mask_roundtrip():
    g = build_group("dihedral:5")
    subs = [Subset(g, b) for b in (1, 5, 1023, 0b1010010)]
    masks = to_masks(subs)
    assert masks.dtype == np.uint64
    assert [from_mask(g, m) for m in masks] == subs


def test_mask_cap():
    with pytest.raises(CapExceededError):
        tables(cyclic(65))
    assert tables(cyclic(64)).n == 64


@pytest.mark.parametrize("impl", [_kernels_nb, _kernels_np])
def test_elementwise_kernels(impl):
    g = build_group("product:cyclic:8,dihedral:4")   # order 64: top bit in use
    t = tables(g)
    rng = np.random.default_rng(5)
    masks = rng.integers(1, 2 ** 63, 40, dtype=np.uint64) | np.uint64(1 << 63)
    subs = [Subset(g, int(m)) for m in masks]
    assert impl.popcount(masks).tolist() == [len(s) for s in subs]
    assert impl.invert(t.itab, masks).tolist() == [inverse_set(s).bits for s in subs]
    assert impl.translate(t.ltab, 9, masks).tolist() == [left_translate(9, s).bits for s in subs]
    right = masks[::-1].copy()
    want = [product_set(a, Subset(g, int(b))).bits for a, b in zip(subs, right)]
    assert impl.product(t.ltab, masks, right, g.order).tolist() == want


@pytest.mark.parametrize("spec", GROUPS)
def test_backends_agree_exhaustively(spec):
    g = build_group(spec)
    masks = all_masks(g.order)
    a = analyze_masks(g, masks, impl=_kernels_nb)
    b = analyze_masks(g, masks, impl=_kernels_np)
    assert a.keys() == b.keys()
    for key in a:
        assert np.array_equal(a[key], b[key]), key


@pytest.mark.parametrize("spec", GROUPS)
def test_batch_rows_match_per_set_rows(spec):
    g = build_group(spec)
    masks = all_masks(g.order)
    batch = rows_for_masks(g, masks, CHECKS)
    step = 1 if g.order <= 8 else 13
    for m in range(1, 1 << g.order, step):
        assert batch[m - 1] == row_for_subset(Subset(g, m), CHECKS), m


def test_norm_columns_match_convolution():
    from grpdouble.convolution import norm_identity_check
    g = build_group("dihedral:3")
    res = analyze_masks(g, all_masks(g.order), checks=("norm",))
    for m in range(1, 1 << g.order):
        rep = norm_identity_check(Subset(g, m))
        assert res["norm_rev"][m - 1] == rep.norm_rev and res["norm_fwd"][m - 1] == rep.norm_fwd


def test_pareto():
    assert pareto([1, 2, 4], [2, 2, 1]) == [0, 2]
    assert pareto([1, 1, 2], [3, 3, 1]) == [0, 2]
    assert pareto([3, 1], [1, 1]) == [1]
