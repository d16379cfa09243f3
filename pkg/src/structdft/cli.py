"""
Command-line front end.

    structdft compute --n 1024 --support 0,1,6,7,38,65,135,512 --algo shift-sample --level 2
    structdft bench --k-set 8,32,256 --algos progressive --trials 100 --out bench.csv
    structdft verify --trials 1000 --eta 5 --k 64

Exit codes: 0 success, 1 usage or input error, 2 algorithm failure
(compute) or hard-check violation (verify).
"""

import argparse
import json
import logging
import math
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .bench import ALGORITHMS, aggregate_and_emit, run_trials, worker_count
from .baselines import resolve_level, shift_and_sample, submatrix_method
from .core import fft_pow2, log2_exact, random_spectrum, synthesize_signal
from .errors import InvalidInputError
from .io import matrix_to_json, parse_support, read_signal, spectrum_to_dict
from .progressive import ProgressiveConfig, extract_merging_trees, progressive_sdft
from .verify import verify_lemmas

log = logging.getLogger("structdft")

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for algorithm failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pow2(text):
    try:
        n = int(text)
        log2_exact(n)
    except (ValueError, InvalidInputError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a power of two") from None
    return n


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated integer list") from None


def _snr_list(text):
    out = []
    for v in text.split(","):
        v = v.strip().lower()
        if not v:
            continue
        if v in ("none", "inf", "clean"):
            out.append(None)
            continue
        try:
            x = float(v)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad SNR value {v!r}") from None
        if not math.isfinite(x):
            raise argparse.ArgumentTypeError("SNR values must be finite (use 'none')")
        out.append(x)
    return out


def _level(text):
    if text in ("auto-stable", "auto-optimal"):
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("level must be auto-stable, auto-optimal or an integer") from None


def build_parser():
    p = _Parser(prog="structdft", description="DFT coefficients on a known frequency support.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--n", type=_pow2, default=16384, help="signal length (power of two)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    c = sub.add_parser("compute", parents=[common], help="run one algorithm on one signal")
    c.add_argument("--support", required=True, help="comma list or JSON file of indices")
    c.add_argument("--signal", default="synthesize",
                   help="'synthesize' or a signal file (.csv or binary)")
    c.add_argument("--algo", choices=("submatrix", "shift-sample", "progressive"),
                   default="progressive")
    c.add_argument("--eta", type=int, default=1)
    c.add_argument("--level", type=_level, default="auto-stable")
    c.add_argument("--trace", action="store_true", help="include the per-stage execution trace")

    b = sub.add_parser("bench", parents=[common], help="Monte-Carlo sweep to CSV + gnuplot")
    b.add_argument("--k-set", type=_int_list, default=[8, 16, 32, 64, 128, 256])
    b.add_argument("--snr-set", type=_snr_list, default=[None],
                   help="comma list of SNR values in dB; 'none' for noiseless")
    b.add_argument("--trials", type=int, default=1000)
    b.add_argument("--algos", type=lambda s: [a.strip() for a in s.split(",") if a.strip()],
                   default=["submatrix", "shift-sample-optimal", "shift-sample-stable",
                            "progressive"])
    b.add_argument("--eta", type=int, default=1)
    b.add_argument("--no-cond", action="store_true", help="skip condition-number estimates")
    b.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $SDFT_THREADS or 1; 0 = all cores)")

    v = sub.add_parser("verify", parents=[common], help="Monte-Carlo check of structural invariants")
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--eta", type=int, default=1)
    v.add_argument("--k", type=int, default=64)
    return p


def _emit(text, out):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------

def _trace_payload(report):
    trace = {"stages": report.stages}
    systems = getattr(report, "systems", None) or {}
    trace["systems"] = [
        {"level": key[0], "residue": key[1], "unknowns": list(ns.unknowns),
         "shifts": list(ns.shifts_used), "matrix": matrix_to_json(ns.matrix)}
        for key, ns in systems.items() if ns.matrix is not None
    ]
    if report.algorithm == "progressive":
        trace["merging_trees"] = [
            {"root": list(t.root), "members": [list(m) for m in t.members],
             "weight": t.weight, "height": t.height, "leaf_mu": t.leaf_mu,
             "complete": t.complete}
            for t in extract_merging_trees(report) if t.height > 0 or not t.complete
        ]
    return trace


def cmd_compute(args):
    if args.eta < 1:
        raise UsageError("--eta must be at least 1")
    support = parse_support(args.support, args.n)
    rng = np.random.default_rng(args.seed)
    if args.signal == "synthesize":
        f = synthesize_signal(support, random_spectrum(support, rng))
    else:
        f = read_signal(args.signal)
        if f.shape[0] != args.n:
            raise UsageError(f"signal has {f.shape[0]} samples but --n is {args.n}")

    if args.algo == "submatrix":
        coeffs, report = submatrix_method(f, support)
    elif args.algo == "shift-sample":
        level = {"auto-stable": "stable", "auto-optimal": "optimal"}.get(args.level, args.level)
        coeffs, report = shift_and_sample(f, support, level)
    else:
        r = args.level
        if isinstance(r, str):
            r = None if r == "auto-stable" else resolve_level("optimal", len(support))
        coeffs, report = progressive_sdft(f, support, ProgressiveConfig(eta=args.eta, r=r))

    oracle = fft_pow2(f)[support.as_array()]
    est = np.array([coeffs[j] for j in support.indices])
    rel = float(np.linalg.norm(est - oracle) / max(np.linalg.norm(oracle), 1e-300))

    fmt = args.format or "json"
    if fmt == "json":
        payload = {
            "spectrum": spectrum_to_dict(coeffs, args.n),
            "report": report.to_dict(),
            "oracle_rel_error": rel if report.success else None,
        }
        if args.trace:
            payload["trace"] = _trace_payload(report)
        _emit(json.dumps(payload, indent=2, default=str), args.out)
    else:
        lines = ["index,re,im"] + [f"{j},{float(complex(c).real)!r},{float(complex(c).imag)!r}"
                                   for j, c in sorted(coeffs.items())]
        _emit("\n".join(lines) + "\n", args.out)
        if args.trace:
            print(json.dumps(_trace_payload(report), default=str), file=sys.stderr)

    if not report.success:
        print(f"failure: {report.failure} at node {report.failure_node}", file=sys.stderr)
        return EXIT_FAILURE
    log.info("%s: blocks %s, reporting-model ops %d, oracle rel error %.2e",
             report.algorithm, report.block_sizes, report.ops.paper_model, rel)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def cmd_bench(args):
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.eta < 1:
        raise UsageError("--eta must be at least 1")
    bad = [a for a in args.algos if a not in ALGORITHMS]
    if bad:
        raise UsageError(f"unknown algorithms {bad}; choose from {', '.join(ALGORITHMS)}")
    if not args.k_set or any(not 0 < k <= args.n for k in args.k_set):
        raise UsageError(f"every k must lie in (0, {args.n}]")
    fmt = args.format or "csv"
    out = args.out or Path(f"bench.{fmt}")
    workers = worker_count(args.workers)

    records = []
    try:
        for algo in args.algos:
            for snr in args.snr_set:
                for k in args.k_set:
                    log.info("bench %s k=%d snr=%s trials=%d", algo, k, snr, args.trials)
                    records.extend(run_trials(algo, args.n, k, args.trials, eta=args.eta,
                                              snr_db=snr, seed=args.seed,
                                              with_cond=not args.no_cond, workers=workers))
    finally:
        if records:
            paths = aggregate_and_emit(records, out, fmt=fmt)
            for p in paths:
                print(p)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args):
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.eta < 1:
        raise UsageError("--eta must be at least 1")
    if not 0 < args.k <= args.n:
        raise UsageError(f"--k must lie in (0, {args.n}]")
    report = verify_lemmas(args.trials, args.n, args.k, args.eta, seed=args.seed)
    if (args.format or "json") == "json" and args.out is not None:
        args.out.write_text(json.dumps(report.to_dict(), indent=2, default=str))
    if args.format == "json" and args.out is None:
        print(json.dumps(report.to_dict(), indent=2, default=str))
    else:
        print(report.summary())
    if report.ok:
        return EXIT_OK
    base = args.out.parent if args.out is not None else Path.cwd()
    path = report.write_counterexample(base / "verify_counterexample.json")
    first = report.violations[0]
    print(f"hard check {first.check!r} failed at node {first.node} (trial {first.trial}); "
          f"counterexample trace: {path}", file=sys.stderr)
    return EXIT_FAILURE


COMMANDS = {"compute": cmd_compute, "bench": cmd_bench, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidInputError, OSError) as exc:
        print(f"structdft {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
