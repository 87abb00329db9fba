"""Survey engine: run detectors over many (group, subset) pairs and persist rows."""
from __future__ import annotations

import csv
import io
import json
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .detect import covering_frontier, freiman_coset, hamidoune_witness, jump_check, kneser_witness
from .errors import EmptySetError, NotApplicableError
from .groups import Group, build_group
from .masks import MAX_MASK_ORDER, analyze_masks, pareto, subgroup_data
from .periodicity import ContinuityNotFound, analytic_pipeline
from .sets import Subset, doubling_report, subgroup_closure

log = logging.getLogger(__name__)

CHECKS = ("jump", "freiman", "kneser", "hamidoune", "covering", "pipeline")
HARD_CHECKS = ("jump", "freiman", "kneser", "hamidoune")
MODES = ("exhaustive", "random", "all-of-size")
EXHAUSTIVE_MAX_ORDER = 20
SHARD = 4096
DEFAULT_PIPELINE_EPSILON = Fraction(1, 2)


class ConfigError(ValueError):
    pass


class SetSpecError(ValueError):
    pass


def make_rng(seed):
    """PCG64 seeded with a 64-bit integer; the one PRNG used for sampling."""
    return np.random.Generator(np.random.PCG64(int(seed) & ((1 << 64) - 1)))


def parse_set_spec(g: Group, spec: str) -> Subset:
    """``0,1,5`` | ``gen:2,3`` (closure of generators) | ``random:k:seed``."""
    spec = spec.strip()
    if spec.startswith("random:"):
        m = re.fullmatch(r"random:(\d+):(\d+)", spec)
        if not m:
            raise SetSpecError(f"bad random set spec {spec!r}; expected random:<k>:<seed>")
        k, seed = int(m.group(1)), int(m.group(2))
        if not 1 <= k <= g.order:
            raise SetSpecError(f"random set size {k} outside 1..{g.order}")
        picks = make_rng(seed).choice(g.order, size=k, replace=False)
        return Subset.from_indices(g, sorted(int(i) for i in picks))
    gen = spec.startswith("gen:")
    body = spec[4:] if gen else spec
    if not re.fullmatch(r"\s*\d+\s*(,\s*\d+\s*)*", body):
        if not body.strip():
            raise EmptySetError("set spec is empty")
        raise SetSpecError(f"bad set spec {spec!r}")
    idx = [int(t) for t in body.split(",")]
    bad = [i for i in idx if i >= g.order]
    if bad:
        raise SetSpecError(f"element {bad[0]} out of range for order {g.order}")
    s = Subset.from_indices(g, idx)
    return subgroup_closure(s) if gen else s


@dataclass
class SurveyConfig:
    groups: list
    subset_mode: str = "exhaustive"
    count: int | None = None
    seed: int | None = None
    size: int | None = None
    checks: tuple = ("jump",)
    epsilon: Fraction | None = None
    output_path: str | None = None
    workers: int = 1
    format: str = "csv"

    def __post_init__(self):
        self.checks = tuple(c for c in CHECKS if c in set(self.checks))
        if self.epsilon is not None:
            self.epsilon = Fraction(self.epsilon)

    def validate(self, built=None):
        if not self.groups:
            raise ConfigError("no groups given")
        if self.subset_mode not in MODES:
            raise ConfigError(f"subset_mode must be one of {MODES}")
        if not self.checks:
            raise ConfigError(f"choose checks from {CHECKS}")
        if self.subset_mode == "random" and (self.seed is None or not self.count or self.count < 1):
            raise ConfigError("random mode needs a positive count and a seed")
        if self.subset_mode == "all-of-size" and (self.size is None or self.size < 1):
            raise ConfigError("all-of-size mode needs size >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.format not in ("csv", "json", "table"):
            raise ConfigError("format must be csv, json or table")
        if self.epsilon is not None and not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie strictly between 0 and 1")
        for g in built or ():
            if self.subset_mode == "exhaustive" and g.order > EXHAUSTIVE_MAX_ORDER:
                raise ConfigError(f"exhaustive mode needs order <= {EXHAUSTIVE_MAX_ORDER}; {g.label} has {g.order}")
            if self.subset_mode == "all-of-size" and self.size > g.order:
                raise ConfigError(f"size {self.size} exceeds order of {g.label}")

    def to_dict(self):
        return {
            "groups": list(self.groups),
            "subset_mode": self.subset_mode,
            "count": self.count,
            "seed": self.seed,
            "size": self.size,
            "checks": list(self.checks),
            "epsilon": None if self.epsilon is None else str(self.epsilon),
            "output_path": self.output_path,
            "workers": self.workers,
            "format": self.format,
        }

    @classmethod
    def from_dict(cls, doc):
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path):
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (OSError, ValueError, TypeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc


# ---------------------------------------------------------------- subset streams


def _same_popcount_masks(n, k):
    """All k-subsets of n elements as masks in increasing integer order (Gosper)."""
    m = (1 << k) - 1
    top = 1 << n
    while m < top:
        yield m
        c = m & -m
        r = m + c
        m = (((r ^ m) >> 2) // c) | r


def subset_masks(cfg: SurveyConfig, g: Group, rng):
    n = g.order
    if cfg.subset_mode == "exhaustive":
        return range(1, 1 << n)
    if cfg.subset_mode == "all-of-size":
        return _same_popcount_masks(n, cfg.size)
    out = []
    while len(out) < cfg.count:
        bits = rng.integers(0, 2, size=n).astype(bool)
        if bits.any():
            out.append(int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"))
    return out


# ---------------------------------------------------------------- rows


def columns(checks):
    cols = ["group", "set", "size", "product_size", "ratio", "symmetric"]
    per = {
        "jump": ["jump_min", "jump_bound", "jump_pass"],
        "freiman": ["freiman", "freiman_H_size"],
        "kneser": ["kneser", "kneser_H_size"],
        "hamidoune": ["hamidoune", "hamidoune_H_size"],
        "covering": ["frontier", "cover_bound"],
        "pipeline": ["pipeline", "pipeline_R", "pipeline_failed_step"],
    }
    for c in CHECKS:
        if c in checks:
            cols += per[c]
    return cols


def _cover_bound(frontier_pairs, size, product_size):
    # entry with R <= 2/eps and |H| <= 2|A|, eps = 2 - |AA^-1|/|A|
    eps = 2 - Fraction(product_size, size)
    if eps <= 0:
        return "n/a"
    ok = any(r <= 2 / eps and h <= 2 * size for h, r in frontier_pairs)
    return "pass" if ok else "fail"


def _frontier_text(pairs):
    return " ".join(f"{h}:{r}" for h, r in pairs)


def _pipeline_cols(a, ratio, epsilon):
    eps = epsilon if epsilon is not None else DEFAULT_PIPELINE_EPSILON
    if ratio > 2 - eps:
        return {"pipeline": "n/a", "pipeline_R": None, "pipeline_failed_step": None}
    try:
        rep = analytic_pipeline(a, eps)
    except ContinuityNotFound as exc:
        return {"pipeline": "not-found", "pipeline_R": None, "pipeline_failed_step": exc.report.failed_step}
    return {"pipeline": "success" if rep.success else "failed", "pipeline_R": rep.R,
            "pipeline_failed_step": rep.failed_step}


def row_for_subset(a: Subset, checks, epsilon=None) -> dict:
    """One survey row from the per-set detectors (any group order)."""
    g = a.group
    d = doubling_report(a)
    row = {"group": g.label, "set": a.tolist(), "size": d.set_size, "product_size": d.product_size,
           "ratio": str(d.ratio), "symmetric": d.symmetric_agreement}
    if "jump" in checks:
        j = jump_check(a)
        row.update(jump_min=j.minimum, jump_bound=j.bound, jump_pass=j.passed)
    if "freiman" in checks:
        f = freiman_coset(a)
        row.update(freiman=f.status, freiman_H_size=len(f.subgroup) if f.subgroup is not None else None)
    if "kneser" in checks:
        if g.is_abelian:
            w = kneser_witness(a)
            row.update(kneser="found" if w.found else "not-found",
                       kneser_H_size=len(w.subgroup) if w.found else None)
        else:
            row.update(kneser="n/a", kneser_H_size=None)
    if "hamidoune" in checks:
        w = hamidoune_witness(a)
        row.update(hamidoune=f"branch-{w.branch}" if w.found else "not-found",
                   hamidoune_H_size=len(w.subgroup) if w.found else None)
    if "covering" in checks:
        pairs = covering_frontier(a).pairs()
        row.update(frontier=_frontier_text(pairs), cover_bound=_cover_bound(pairs, d.set_size, d.product_size))
    if "pipeline" in checks:
        row.update(_pipeline_cols(a, d.ratio, epsilon))
    return row


def rows_for_masks(g: Group, masks, checks, epsilon=None, impl=None) -> list:
    """Survey rows for a batch of masks through the batch kernels (order <= 64)."""
    masks = np.asarray(masks, dtype=np.uint64)
    res = analyze_masks(g, masks, checks=checks, impl=impl)
    sd = subgroup_data(g) if {"kneser", "hamidoune", "covering"} & set(checks) else None
    sizes = sd.sizes.tolist() if sd else None
    freiman_names = {0: "not-applicable", 1: "found", 2: "refuted"}
    rows = []
    for i, m in enumerate(masks.tolist()):
        size, dd = int(res["size"][i]), int(res["dd"][i])
        a = Subset(g, m)
        row = {"group": g.label, "set": a.tolist(), "size": size, "product_size": dd,
               "ratio": str(Fraction(dd, size)), "symmetric": bool(res["sym"][i])}
        if "jump" in checks:
            jm = int(res["jump_min"][i])
            row.update(jump_min=jm, jump_bound=2 * size - dd, jump_pass=jm >= 2 * size - dd)
        if "freiman" in checks:
            st = int(res["freiman"][i])
            row.update(freiman=freiman_names[st], freiman_H_size=int(res["freiman_h"][i]) if st else None)
        if "kneser" in checks:
            if g.is_abelian:
                j = int(res["kneser"][i])
                row.update(kneser="found" if j >= 0 else "not-found", kneser_H_size=sizes[j] if j >= 0 else None)
            else:
                row.update(kneser="n/a", kneser_H_size=None)
        if "hamidoune" in checks:
            j = int(res["hamidoune"][i])
            row.update(hamidoune=f"branch-{int(res['hamidoune_branch'][i])}" if j >= 0 else "not-found",
                       hamidoune_H_size=sizes[j] if j >= 0 else None)
        if "covering" in checks:
            counts = res["cover_R"][i].tolist()
            pairs = [(sizes[j], counts[j]) for j in pareto(sizes, counts)]
            row.update(frontier=_frontier_text(pairs), cover_bound=_cover_bound(pairs, size, dd))
        if "pipeline" in checks:
            row.update(_pipeline_cols(a, Fraction(dd, size), epsilon))
        rows.append(row)
    return rows


@lru_cache(maxsize=None)
def _group(spec):
    return build_group(spec)


def _shard(job):
    spec, masks, checks, epsilon = job
    g = _group(spec)
    if g.order <= MAX_MASK_ORDER:
        return rows_for_masks(g, masks, checks, epsilon)
    return [row_for_subset(Subset(g, m), checks, epsilon) for m in masks]


def _jobs(cfg, groups):
    rng = make_rng(cfg.seed) if cfg.subset_mode == "random" else None
    for spec, g in zip(cfg.groups, groups):
        batch = []
        for m in subset_masks(cfg, g, rng):
            batch.append(m)
            if len(batch) == SHARD:
                yield spec, batch, cfg.checks, cfg.epsilon
                batch = []
        if batch:
            yield spec, batch, cfg.checks, cfg.epsilon


@dataclass
class SurveySummary:
    rows: int = 0
    counts: dict = field(default_factory=dict)
    hard_failures: int = 0

    @property
    def exit_status(self):
        return 1 if self.hard_failures else 0

    def add(self, row):
        self.rows += 1
        for key, value in _outcomes(row):
            bucket = self.counts.setdefault(key, {})
            bucket[value] = bucket.get(value, 0) + 1
            if key in HARD_CHECKS and value in ("fail", "refuted", "not-found"):
                self.hard_failures += 1

    def to_dict(self):
        return {"rows": self.rows, "counts": self.counts, "hard_failures": self.hard_failures}


def _outcomes(row):
    if "jump_pass" in row:
        yield "jump", "pass" if row["jump_pass"] else "fail"
    for key in ("freiman", "kneser", "hamidoune", "pipeline"):
        if key in row:
            v = row[key]
            yield key, "found" if key == "hamidoune" and v.startswith("branch") else v
    if "cover_bound" in row:
        yield "covering", row["cover_bound"]


def run_survey(cfg: SurveyConfig, stream=None) -> SurveySummary:
    """Evaluate every configured (group, subset) pair and write rows in a fixed order.

    Rows go to ``cfg.output_path`` (or ``stream``) as they are produced,
    except in table format which needs all rows to size its columns.
    """
    groups = [_group(s) for s in cfg.groups]
    cfg.validate(groups)
    cols = columns(cfg.checks)
    summary = SurveySummary()
    out = stream
    handle = None
    if out is None and cfg.output_path:
        try:
            handle = open(cfg.output_path, "w", newline="")
        except OSError as exc:
            raise ConfigError(f"cannot write {cfg.output_path}: {exc}") from exc
        out = handle
    writer = RowWriter(out, cols, cfg.format)
    try:
        jobs = _jobs(cfg, groups)
        if cfg.workers == 1:
            results = map(_shard, jobs)
            for rows in results:
                for row in rows:
                    summary.add(row)
                    writer.write(row)
        else:
            with ProcessPoolExecutor(cfg.workers) as pool:
                for rows in pool.map(_shard, jobs):
                    for row in rows:
                        summary.add(row)
                        writer.write(row)
        writer.close()
    finally:
        if handle:
            handle.close()
    log.info("survey: %d rows, %d hard failures", summary.rows, summary.hard_failures)
    return summary


# ---------------------------------------------------------------- emitters


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return " ".join(str(i) for i in v)
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


class RowWriter:
    """Streams rows as csv or JSON lines; table format is buffered."""

    def __init__(self, out, cols, fmt):
        self.out, self.cols, self.fmt = out, cols, fmt
        self.buffer = []
        self._csv = None
        if out is not None and fmt == "csv":
            self._csv = csv.writer(out, lineterminator="\n")
            self._csv.writerow(cols)

    def write(self, row):
        if self.out is None:
            return
        if self.fmt == "csv":
            self._csv.writerow([_cell(row.get(c)) for c in self.cols])
        elif self.fmt == "json":
            self.out.write(json.dumps({c: row.get(c) for c in self.cols}, separators=(",", ":")) + "\n")
        else:
            self.buffer.append(row)

    def close(self):
        if self.out is not None and self.fmt == "table":
            self.out.write(_table(self.buffer, self.cols))


def _table(rows, cols):
    if not rows:
        raise ValueError("table format needs at least one row")
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def emit_report(rows, fmt="json", path=None, cols=None) -> str:
    """Render rows in csv, table or json (one object per line); optionally write to ``path``."""
    rows = list(rows)
    if cols is None:
        cols = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    writer = RowWriter(buf, cols, fmt)
    for r in rows:
        writer.write(r)
    writer.close()
    text = buf.getvalue()
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {path}: {exc}") from exc
    return text


def parse_report(text) -> list:
    """Inverse of ``emit_report(..., fmt="json")``."""
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def build_subset_rows(g, subsets, checks, epsilon=None):
    """Rows for explicit subsets, via the batch kernels when the group allows it."""
    if g.order <= MAX_MASK_ORDER:
        return rows_for_masks(g, [s.bits for s in subsets], checks, epsilon)
    return [row_for_subset(s, checks, epsilon) for s in subsets]


__all__ = [
    "CHECKS", "ConfigError", "NotApplicableError", "SetSpecError", "SurveyConfig", "SurveySummary",
    "emit_report", "parse_report", "parse_set_spec", "row_for_subset", "rows_for_masks", "run_survey",
]
