"""Command-line interface: ``cpscan detect | simulate | critval | subsample``.

Exit codes: 0 success (whether or not a change is found), 2 usage or
validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from itertools import combinations

import numpy as np

from . import __version__, critvals
from .detector import TestConfig, run_detection
from .errors import CpscanError, DataError, ParameterError
from .ingest import hypergeometric_subsample, read_csv, write_csv
from .metrics import adjusted_rand_index, breakpoints_to_labels
from .simgen import SCENARIOS, run_experiment, scenario

log = logging.getLogger("cpscan")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_test_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, default=1.0, help="norm order (default 1)")
    p.add_argument("--beta", type=float, default=0.9, help="Z-process boost exponent (default 0.9)")
    p.add_argument("--kappa", type=float, default=0.4,
                   help="boundary weight exponent; 0.5 selects the Gumbel limit (default 0.4)")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p.add_argument("--min-seg", type=int, default=20, help="minimum segment length (default 20)")
    p.add_argument("--mc-reps", type=int, default=critvals.DEFAULT_REPS,
                   help="Monte-Carlo replications for critical values (default 100000)")
    p.add_argument("--crit-grid", type=int, default=None,
                   help="fixed grid size for critical values (default: each segment's length)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--cache-dir", default=None,
                   help=f"critical-value cache (default ${critvals.CACHE_ENV} or ~/.cache/cpscan)")
    p.add_argument("--threads", type=int, default=1, help="worker cap; 1 is bit-reproducible")
    p.add_argument("--quick", action="store_true",
                   help=f"use {critvals.QUICK_REPS} Monte-Carlo reps (simulate: also halve reps)")


def _config(args) -> TestConfig:
    return TestConfig(
        p=args.p, beta=args.beta, kappa=args.kappa, alpha=args.alpha, min_seg=args.min_seg,
        mc_reps=critvals.QUICK_REPS if args.quick else args.mc_reps,
        seed=args.seed, cache_dir=args.cache_dir, threads=max(1, args.threads),
        crit_grid=args.crit_grid,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpscan", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    det = sub.add_parser("detect", help="test a CSV sequence for change points")
    det.add_argument("input", help="CSV file, one observation per row")
    det.add_argument("-o", "--output", help="write the JSON report here (default stdout)")
    det.add_argument("--header", action="store_true", help="skip the first line")
    det.add_argument("--segment", action="store_true", help="binary segmentation for multiple changes")
    det.add_argument("--emit-paths", metavar="PATH", help="write V/Z/Z0 paths of every tested segment")
    det.add_argument("--subsample", type=int, metavar="M",
                     help="treat input as counts and subsample M items per row first")
    det.add_argument("--stability", type=int, default=1, metavar="S",
                     help="with --subsample, repeat detection on S independent subsamples")
    _add_test_flags(det)

    sim = sub.add_parser("simulate", help="run a size/power/segmentation experiment")
    sim.add_argument("--scenario", required=True, choices=sorted(SCENARIOS))
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--d", type=int, required=True)
    sim.add_argument("--reps", type=int, default=2000)
    sim.add_argument("--eta", type=float, default=0.5, help="break fraction (ex4-ex6)")
    sim.add_argument("--mu", type=float, default=0.2, help="location shift per coordinate")
    sim.add_argument("--phi", type=float, default=None)
    sim.add_argument("--phi-prime", type=float, default=0.55)
    sim.add_argument("--nu", type=float, default=7.0)
    sim.add_argument("--r", dest="r_fixed", type=int, default=None,
                     help="fixed number of changes for ex7-ex9 (default 1+Poisson(1))")
    sim.add_argument("-o", "--output")
    _add_test_flags(sim)

    cv = sub.add_parser("critval", help="print (and cache) a bridge critical-value table")
    cv.add_argument("--n", type=int, required=True)
    cv.add_argument("--kappa", type=float, default=0.4)
    cv.add_argument("--reps", type=int, default=critvals.DEFAULT_REPS)
    cv.add_argument("--seed", type=int, default=0)
    cv.add_argument("--cache-dir", default=None)
    cv.add_argument("--threads", type=int, default=1)

    ss = sub.add_parser("subsample", help="hypergeometric subsampling of a count CSV")
    ss.add_argument("input")
    ss.add_argument("-m", type=int, required=True, help="items drawn per row")
    ss.add_argument("-o", "--output", help="output CSV (default stdout)")
    ss.add_argument("--header", action="store_true")
    ss.add_argument("--seed", type=int, default=0)
    return parser


def _emit(obj, path) -> None:
    text = json.dumps(obj, indent=2, allow_nan=False)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_detect(args) -> int:
    cfg = _config(args)
    started = time.perf_counter()
    keep_paths = bool(args.emit_paths)
    if args.subsample is not None:
        counts = read_csv(args.input, has_header=args.header, counts=True)
        seeds = np.random.SeedSequence(args.seed).spawn(max(1, args.stability))
        datasets = [hypergeometric_subsample(counts, args.subsample, s).astype(float) for s in seeds]
    else:
        if args.stability != 1:
            raise ParameterError("--stability requires --subsample")
        datasets = [read_csv(args.input, has_header=args.header)]

    runs = [run_detection(x, cfg, segment=args.segment, keep_paths=keep_paths) for x in datasets]
    first = runs[0]
    n, d = datasets[0].shape
    if any(r.records and r.records[0].degenerate for r in runs):
        log.warning("degenerate (constant) data: scale estimate is zero, no test performed")
    report = {
        "n": n,
        "d": d,
        "config": {**cfg.to_dict(), "segment": args.segment, "quick": args.quick},
        "tests": [r.to_dict() for r in first.records],
        "breakpoints": first.breakpoints,
        "detection_order": first.detection_order,
        "runtime": time.perf_counter() - started,
    }
    if args.subsample is not None:
        sets = [r.breakpoints for r in runs]
        labels = [breakpoints_to_labels(b, n) for b in sets]
        pairs = list(combinations(range(len(runs)), 2))
        report["subsample"] = {
            "m": args.subsample,
            "runs": len(runs),
            "breakpoints": sets,
            "identical_fraction": (
                float(np.mean([sets[i] == sets[j] for i, j in pairs])) if pairs else 1.0
            ),
            "mean_pairwise_ari": (
                float(np.mean([adjusted_rand_index(labels[i], labels[j]) for i, j in pairs]))
                if pairs else 1.0
            ),
        }
    _emit(report, args.output)
    if keep_paths:
        _emit(
            {"segments": [
                {"start": start, "stop": stop, **paths.to_dict()}
                for start, stop, paths in first.paths
            ]},
            args.emit_paths,
        )
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _config(args)
    reps = max(1, args.reps // 2) if args.quick else args.reps
    extra = {}
    if args.r_fixed is not None:
        extra["r_law"] = args.r_fixed
    spec = scenario(
        args.scenario, args.n, args.d, phi=args.phi, phi_prime=args.phi_prime, mu=args.mu,
        nu=args.nu, eta=args.eta, seed=args.seed, **extra,
    )
    report = run_experiment(spec, cfg, reps, threads=cfg.threads, quick=args.quick).to_dict()
    report.pop("details", None)
    _emit(report, args.output)
    return EXIT_OK


def cmd_critval(args) -> int:
    table = critvals.cache_lookup_or_build(
        args.n, args.kappa, args.reps, args.seed, args.cache_dir, threads=max(1, args.threads)
    )
    out = table.to_dict()
    out["from_cache"] = table.from_cache
    _emit(out, None)
    return EXIT_OK


def cmd_subsample(args) -> int:
    counts = read_csv(args.input, has_header=args.header, counts=True)
    out = hypergeometric_subsample(counts, args.m, args.seed)
    write_csv(args.output if args.output else sys.stdout, out)
    return EXIT_OK


COMMANDS = {
    "detect": cmd_detect,
    "simulate": cmd_simulate,
    "critval": cmd_critval,
    "subsample": cmd_subsample,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, DataError, OSError) as exc:
        print(f"cpscan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CpscanError as exc:
        print(f"cpscan: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"cpscan: internal error: {exc!r}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
