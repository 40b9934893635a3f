"""Command-line interface: ``tangleroof {sweep,profile,classify,verify,bound}``.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .ghz import lower_bound
from .polytope import IdenticallyZero, build_polytope
from .roof import (compute_profile, fmt, profile_csv, profile_summary, roof_value)
from .spin_model import BOUNDARIES, ModelParams, RankTwoMixture, model_mixture
from .sweep import (NumericalFailure, evaluate_point, parse_range, records_csv, run_sweep)
from .threetangle import tangle_quartic
from .verify import run_all

log = logging.getLogger("tangleroof")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p, ranges=True):
    kind = "value or start:stop:count" if ranges else "value"
    p.add_argument("--gamma", default=None, help=f"anisotropy ({kind})")
    p.add_argument("--h", default=None, help=f"field strength ({kind})")
    p.add_argument("--alpha", default=None, help=f"field tilt in radians ({kind}); 'pi' allowed")
    p.add_argument("--site", type=int, default=None, help="traced site (default 0)")
    p.add_argument("--boundary", choices=BOUNDARIES, default=None)
    p.add_argument("--L", type=int, default=None, help="chain length (default 4)")
    p.add_argument("--grid", type=int, default=None, help="roof grid size (default 2001)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--config", default=None, help="JSON file with default flag values")


def build_parser():
    parser = _Parser(prog="tangleroof", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, help_ in [("sweep", "roof at the model mixture over a parameter grid"),
                        ("classify", "zero-polytope class over a parameter grid"),
                        ("bound", "roof vs GHZ-symmetric lower bound")]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "bound":
            p.add_argument("--mixture", default=None,
                           help="JSON file with psi0, psi1 (real 8-vectors); sweeps p instead")
    p = sub.add_parser("profile", help="full roof profile at one parameter point")
    _common(p, ranges=False)
    p.add_argument("--mixture", default=None,
                   help="JSON file with psi0, psi1 and optional p_model instead of a model")
    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--config", default=None)
    return parser


DEFAULTS = {"gamma": "0", "h": "0.5", "alpha": "0", "site": 0, "boundary": "periodic",
            "L": 4, "grid": 2001, "seed": 0, "threads": None, "out": None, "trials": 2000,
            "mixture": None}


def _resolve(args):
    """Flags override the config file, which overrides built-in defaults."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(cfg) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key, default in DEFAULTS.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            setattr(args, key, cfg.get(key, default))
    return args


def _ranges(args):
    try:
        return parse_range(args.gamma), parse_range(args.h), parse_range(args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_mixture(path):
    try:
        data = json.loads(Path(path).read_text())
        psi0 = np.asarray(data["psi0"], dtype=float)
        psi1 = np.asarray(data["psi1"], dtype=float)
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read mixture file {path}: {exc}") from exc
    if psi0.shape != (8,) or psi1.shape != (8,):
        raise UsageError("psi0 and psi1 must have 8 entries")
    psi0, psi1 = psi0 / np.linalg.norm(psi0), psi1 / np.linalg.norm(psi1)
    p = float(data.get("p_model", 0.5))
    return RankTwoMixture(psi0, psi1, p)


def cmd_sweep(args):
    g, h, a = _ranges(args)
    recs = run_sweep(g, h, a, args.site, args.boundary, args.L, args.grid, args.threads,
                     seed=args.seed)
    _emit(records_csv(recs), args.out)
    return EXIT_OK


def cmd_classify(args):
    g, h, a = _ranges(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "h", "alpha", "site", "boundary", "class", "span_lo", "span_hi"])
    for gv in g:
        for hv in h:
            for av in a:
                params = ModelParams(float(gv), float(hv), float(av), args.L, args.boundary)
                try:
                    mix, _ = model_mixture(params, args.site)
                    poly = build_polytope(tangle_quartic(mix.psi0, mix.psi1))
                    label, span = poly.label, poly.axis_span
                except IdenticallyZero:
                    label, span = "0Y", (0.0, 1.0)
                except (ArithmeticError, RuntimeError, ValueError) as exc:
                    raise NumericalFailure(params, exc) from exc
                lo, hi = ("", "") if span is None else (fmt(span[0]), fmt(span[1]))
                w.writerow([fmt(gv), fmt(hv), fmt(av), args.site, args.boundary, label, lo, hi])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_profile(args):
    if args.mixture:
        mix = _load_mixture(args.mixture)
        params = None
    else:
        try:
            params = ModelParams(*(float(r[0]) for r in _ranges(args)), args.L, args.boundary)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        try:
            mix, _ = model_mixture(params, args.site)
        except (ArithmeticError, RuntimeError) as exc:
            raise NumericalFailure(params, exc) from exc
    try:
        prof = compute_profile(mix, grid=args.grid)
        summary = profile_summary(prof)
        summary["ghz_lb"] = lower_bound(mix, seed=args.seed)
    except (ArithmeticError, RuntimeError) as exc:
        raise NumericalFailure(params, exc) from exc
    summary = {"params": None if params is None else {
        "gamma": params.gamma, "h": params.h, "alpha": params.alpha, "L": params.L,
        "boundary": params.boundary, "site": args.site}, **summary}
    text = json.dumps(summary, indent=2, sort_keys=False) + "\n"
    if args.out:
        stem = Path(args.out)
        stem.with_suffix(".csv").write_text(profile_csv(prof))
        stem.with_suffix(".json").write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bound(args):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.mixture:
        mix = _load_mixture(args.mixture)
        prof = compute_profile(mix, grid=args.grid)
        w.writerow(["p", "roof", "ghz_lb", "diff"])
        n = max(int(args.grid) // 100, 2) + 1
        for p in np.linspace(0.0, 1.0, n):
            r, b = roof_value(prof, p), lower_bound(mix, p, seed=args.seed)
            w.writerow([fmt(p), fmt(r), fmt(b), fmt(r - b)])
    else:
        g, h, a = _ranges(args)
        recs = run_sweep(g, h, a, args.site, args.boundary, args.L, args.grid, args.threads,
                         seed=args.seed)
        w.writerow(["gamma", "h", "alpha", "p_model", "roof", "ghz_lb", "diff"])
        for r in recs:
            w.writerow([fmt(r.gamma), fmt(r.h), fmt(r.alpha), fmt(r.p_model),
                        fmt(r.sqrt_tau3), fmt(r.ghz_lb), fmt(r.sqrt_tau3 - r.ghz_lb)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args):
    results = run_all(seed=args.seed, trials=args.trials, quick=args.quick)
    for r in results:
        print(r.line())
    npass = sum(r.passed for r in results)
    print(f"{npass}/{len(results)} suites passed")
    return EXIT_OK if npass == len(results) else EXIT_NUMERIC


COMMANDS = {"sweep": cmd_sweep, "classify": cmd_classify, "profile": cmd_profile,
            "bound": cmd_bound, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](_resolve(args))
    except UsageError as exc:
        print(f"tangleroof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        log.error("numerical failure at %s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
