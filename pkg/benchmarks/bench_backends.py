"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_backends.py --group dihedral:8 --sets 20000
"""
import argparse
import time

import numpy as np

from grpdouble import _kernels_nb, _kernels_np
from grpdouble.groups import build_group
from grpdouble.masks import subgroup_data, tables


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--group", default="dihedral:8")
    p.add_argument("--sets", type=int, default=20000, help="random subsets per kernel")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    g = build_group(args.group)
    t, sd = tables(g), subgroup_data(g)
    n = g.order
    rng = np.random.Generator(np.random.PCG64(args.seed))
    top = (1 << n) - 1
    masks = (rng.integers(1, 2 ** 63, args.sets, dtype=np.uint64) & np.uint64(top)) | np.uint64(1)
    f = rng.integers(-9, 10, n)
    h = rng.integers(-9, 10, n)

    cases = {
        "doubling": lambda k: k.doubling(t.ltab, t.itab, masks, n),
        "correlation": lambda k: k.correlation(t.ltab, masks, n),
        "freiman": lambda k: k.freiman(t.ltab, t.itab, masks, n, t.identity, t.inv_table),
        "hamidoune": lambda k: k.hamidoune(t.ltab, t.itab, masks, sd.masks, sd.sizes, n),
        "coset_counts": lambda k: k.coset_counts(masks, sd.coset_masks, sd.coset_owner, len(sd.subgroups)),
        "convolve x1000": lambda k: [k.convolve(g.mul_table, g.inv_table, f, h) for _ in range(1000)],
    }
    if g.is_abelian:
        cases["kneser"] = lambda k: k.kneser(t.ltab, t.itab, masks, sd.masks, sd.sizes, n)

    print(f"{g.label}: order {n}, {len(sd.subgroups)} subgroups, {args.sets} sets, best of {args.repeat}")
    print(f"{'kernel':<16}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  same")
    for name, fn in cases.items():
        fn(_kernels_nb)                       # compile / load cache outside the timing
        tn, a = timed(lambda: fn(_kernels_nb), args.repeat)
        tp, b = timed(lambda: fn(_kernels_np), args.repeat)
        same = all(np.array_equal(x, y) for x, y in zip(a if isinstance(a, tuple) else [a],
                                                        b if isinstance(b, tuple) else [b]))
        print(f"{name:<16}{tn:>10.4f}{tp:>10.4f}{tp / tn:>9.1f}  {same}")


if __name__ == "__main__":
    main()
