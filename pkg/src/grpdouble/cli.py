"""grpdouble command line: analyze | survey | pipeline | convolve | cs-witness."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .convolution import GroupFunction, convolve, norm_identity_check
from .detect import (
    covering_bound_check,
    covering_frontier,
    freiman_coset,
    hamidoune_witness,
    jump_check,
    kneser_witness,
    smallest_containing_coset,
)
from .errors import NotApplicableError
from .groups import build_group
from .periodicity import ContinuityNotFound, analytic_pipeline, cs_witness
from .sets import doubling_report
from .survey import CHECKS, ConfigError, SurveyConfig, parse_set_spec, run_survey

log = logging.getLogger("grpdouble")


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _checks(text):
    items = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in items if c not in CHECKS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown checks {bad}; choose from {', '.join(CHECKS)}")
    return items


def _emit(doc, out):
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _na(fn, *args):
    try:
        return fn(*args).to_dict()
    except NotApplicableError as exc:
        return {"status": "not-applicable", "reason": str(exc)}


def cmd_analyze(args):
    g = build_group(args.group)
    a = parse_set_spec(g, args.set)
    doc = {
        "group": g.label,
        "order": g.order,
        "set": a.tolist(),
        "doubling": doubling_report(a).to_dict(),
        "jump": jump_check(a).to_dict(),
        "norms": norm_identity_check(a).to_dict(),
        "freiman": freiman_coset(a).to_dict(),
        "smallest_coset_size": len(smallest_containing_coset(a)),
        "frontier": covering_frontier(a).to_dict(),
        "kneser": _na(kneser_witness, a),
        "hamidoune": hamidoune_witness(a).to_dict(),
        "covering_bound": _na(covering_bound_check, a),
    }
    _emit(doc, args.out)
    return 0


def cmd_survey(args):
    if args.config:
        cfg = SurveyConfig.load(args.config)
    else:
        if not args.group:
            raise ConfigError("survey needs --group or --config")
        cfg = SurveyConfig(groups=args.group, subset_mode=args.mode, count=args.count, seed=args.seed,
                           size=args.size, checks=tuple(args.checks or ("jump",)), epsilon=args.epsilon)
    # explicit flags override the config file
    for key in ("out", "format", "workers"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, "output_path" if key == "out" else key, val)
    stream = None if cfg.output_path else sys.stdout
    summary = run_survey(cfg, stream=stream)
    print(json.dumps(summary.to_dict(), sort_keys=True), file=sys.stderr)
    return summary.exit_status


def cmd_pipeline(args):
    g = build_group(args.group)
    a = parse_set_spec(g, args.set)
    try:
        rep = analytic_pipeline(a, args.epsilon)
    except ContinuityNotFound as exc:
        _emit(exc.report.to_dict(), args.out)
        return 3
    _emit(rep.to_dict(), args.out)
    return 0 if rep.success else 3


def cmd_convolve(args):
    g = build_group(args.group)
    a = parse_set_spec(g, args.set_a)
    b = parse_set_spec(g, args.set_b)
    u = convolve(GroupFunction.indicator(a), GroupFunction.indicator(b))
    _emit({"group": g.label, "A": a.tolist(), "B": b.tolist(),
           "values": [str(v) for v in u.tolist()], "support": u.support().tolist()}, args.out)
    return 0


def cmd_cs_witness(args):
    g = build_group(args.group)
    a = parse_set_spec(g, args.set)
    _emit(cs_witness(a, args.k).to_dict(), args.out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="grpdouble", description="Doubling, convolution and coset structure on finite groups.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_set=True):
        sp.add_argument("--group", required=True, help="cyclic:n | dihedral:n | symmetric:n | quaternion:8 | product:<g>,<h> | file:<path>")
        if with_set:
            sp.add_argument("--set", required=True, help="0,1,5 | gen:2,3 | random:k:seed")
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("analyze", help="doubling, detectors and witnesses for one set")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("survey", help="run checks over many (group, set) pairs")
    sp.add_argument("--group", action="append", help="repeat for several groups")
    sp.add_argument("--config", help="JSON file with SurveyConfig fields")
    sp.add_argument("--mode", default="exhaustive", choices=("exhaustive", "random", "all-of-size"))
    sp.add_argument("--count", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--size", type=int, help="subset size for all-of-size mode")
    sp.add_argument("--checks", type=_checks, help=f"comma list from {','.join(CHECKS)}")
    sp.add_argument("--epsilon", type=_fraction, help="epsilon for the pipeline check (default 1/2)")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json", "table"))
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=cmd_survey)

    sp = sub.add_parser("pipeline", help="run the almost-periodicity pipeline")
    common(sp)
    sp.add_argument("--epsilon", type=_fraction, required=True)
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("convolve", help="1_A * 1_B as exact values")
    common(sp, with_set=False)
    sp.add_argument("--set-a", required=True)
    sp.add_argument("--set-b", required=True)
    sp.set_defaults(func=cmd_convolve)

    sp = sub.add_parser("cs-witness", help="large-fourfold-mass set X with X^k growth")
    common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_cs_witness)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, IndexError, OSError) as exc:
        print(f"grpdouble: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
