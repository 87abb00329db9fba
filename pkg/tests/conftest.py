import itertools
import sys
import json

import pytest

from grpdouble.groups import build_group

SMALL_GROUPS = [
    "cyclic:1", "cyclic:2", "cyclic:4", "cyclic:6", "dihedral:3", "dihedral:4",
    "quaternion:8", "product:cyclic:2,cyclic:2", "symmetric:3",
]


def alternating4_table():
    """Cayley table of the even permutations of 4 points, identity first."""
    perms = [p for p in itertools.permutations(range(4))
             if sum(p[i] > p[j] for i in range(4) for j in range(i + 1, 4)) % 2 == 0]
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[i]] for i in range(4))] for q in perms] for p in perms]
    return {"order": len(perms), "identity": 0, "table": table}


@pytest.fixture(scope="session")
def a4_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("tables") / "a4.json"
    path.write_text(json.dumps(alternating4_table()))
    return path


@pytest.fixture(params=SMALL_GROUPS)
def small_group(request):
    return build_group(request.param)


def all_subsets(g, nonempty=True):
    from grpdouble.sets import Subset
    for m in range(1 if nonempty else 0, 1 << g.order):
        yield Subset(g, m)


def S(g, *idx):
    from grpdouble.sets import Subset
    return Subset.from_indices(g, idx)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
