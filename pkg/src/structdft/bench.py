"""
Monte-Carlo harness: random supports, noisy solves, per-trial records and
their aggregation into CSV tables plus gnuplot scripts.

Every trial draws from its own generator seeded by ``(seed, trial)`` so a
record depends only on its configuration, never on scheduling.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass
import json
import logging
import math
import os
from pathlib import Path

import numpy as np

from .baselines import OPTIMAL, STABLE, resolve_level, shift_and_sample, submatrix_method
from .core import SupportSet, log2_exact, random_spectrum, synthesize_signal
from .errors import InvalidInputError
from .progressive import ProgressiveConfig, progressive_sdft

log = logging.getLogger(__name__)

ALGORITHMS = (
    "submatrix",
    "shift-sample",
    "shift-sample-optimal",
    "shift-sample-stable",
    "progressive",
)

CSV_FIELDS = (
    "k", "N", "algorithm", "eta", "r", "snr_db", "trials", "failure_rate",
    "mean_error_l2", "mean_block", "max_block", "mean_ops_actual", "mean_ops_paper",
    "mean_log10_cond",
)


@dataclass
class BenchRecord:
    k: int
    N: int
    algorithm: str
    eta: int
    r: int
    snr_db: float
    error_l2: float
    rel_error: float
    success: bool
    failure: str
    n_support: int
    mean_block: float
    weighted_mean_block: float
    max_block: int
    ops_actual: int
    ops_paper_model: int
    mean_log10_cond: float
    seed: int
    trial: int


@dataclass(frozen=True)
class NoiseSpec:
    snr_db: float = None

    def __post_init__(self):
        if self.snr_db is not None and not math.isfinite(self.snr_db):
            raise InvalidInputError("snr_db must be finite (use None for no noise)")


def sample_support(n, k, rng):
    """Include each index of Z_n independently with probability k/n; redraw empty sets."""
    log2_exact(n)
    if not 0 < k <= n:
        raise InvalidInputError(f"k={k} must lie in (0, {n}]")
    p = k / n
    while True:
        idx = np.flatnonzero(rng.random(n) < p)
        if idx.size:
            return SupportSet(tuple(idx.tolist()), n)
        log.info("empty support drawn for n=%d, k=%d; redrawing", n, k)


def noise_variance(spec, signal_power):
    if spec is None or spec.snr_db is None:
        return 0.0
    return signal_power / 10 ** (spec.snr_db / 10)


def add_noise(b, spec, signal_power, rng):
    """Add circular complex Gaussian noise of variance ``signal_power / 10**(snr/10)``."""
    if signal_power <= 0:
        raise InvalidInputError("signal_power must be positive")
    b = np.asarray(b, dtype=complex)
    var = noise_variance(spec, signal_power)
    if var == 0.0:
        return b
    scale = math.sqrt(var / 2)
    return b + scale * (rng.standard_normal(b.shape) + 1j * rng.standard_normal(b.shape))


def trial_streams(seed, trial):
    """Independent generators for (support + coefficients, noise, condition estimates)."""
    ss = np.random.SeedSequence([int(seed), int(trial)])
    return [np.random.default_rng(s) for s in ss.spawn(3)]


def default_level(algorithm, k, level=None):
    if algorithm == "shift-sample-optimal":
        return resolve_level(OPTIMAL, k)
    if algorithm in ("shift-sample-stable", "progressive"):
        return resolve_level(STABLE, k) if level is None else resolve_level(level, k)
    if algorithm == "shift-sample":
        return resolve_level(STABLE if level is None else level, k)
    return 0


def run_algorithm(algorithm, f, support, r, eta=1, perturb=None, with_cond=False, rng=None):
    if algorithm == "submatrix":
        return submatrix_method(f, support, perturb=perturb, with_cond=with_cond, rng=rng)
    if algorithm.startswith("shift-sample"):
        return shift_and_sample(f, support, r, perturb=perturb, with_cond=with_cond, rng=rng)
    if algorithm == "progressive":
        cfg = ProgressiveConfig(eta=eta, r=r)
        return progressive_sdft(f, support, cfg, perturb=perturb, with_cond=with_cond, rng=rng)
    raise InvalidInputError(f"unknown algorithm {algorithm!r}")


def run_trial(algorithm, n, k, eta=1, level=None, noise=None, seed=0, trial=0,
              with_cond=False):
    """
    One synthetic trial.

    The level is resolved from the nominal ``k`` (the support-model
    parameter), not from the drawn support size, so that a configuration
    maps to one fixed level.
    """
    if algorithm not in ALGORITHMS:
        raise InvalidInputError(f"unknown algorithm {algorithm!r}")
    if isinstance(noise, (int, float)):
        noise = NoiseSpec(float(noise))
    data_rng, noise_rng, cond_rng = trial_streams(seed, trial)
    support = sample_support(n, k, data_rng)
    truth = random_spectrum(support, data_rng)
    f = synthesize_signal(support, truth)
    r = min(default_level(algorithm, k, level), log2_exact(n))

    true_vec = np.array([truth[j] for j in support.indices])
    power = float(np.mean(np.abs(true_vec) ** 2))
    perturb = None
    if noise is not None and noise.snr_db is not None:
        def perturb(b):
            return add_noise(b, noise, power, noise_rng)

    est, report = run_algorithm(algorithm, f, support, r, eta=eta, perturb=perturb,
                                with_cond=with_cond, rng=cond_rng)
    est_vec = np.array([est[j] for j in support.indices])
    err = rel = None
    if report.success:
        err = float(np.linalg.norm(est_vec - true_vec))
        rel = err / float(np.linalg.norm(true_vec))
    return BenchRecord(
        k=k, N=n, algorithm=algorithm, eta=eta, r=r,
        snr_db=None if noise is None else noise.snr_db,
        error_l2=err, rel_error=rel, success=report.success, failure=report.failure,
        n_support=len(support),
        mean_block=report.mean_block,
        weighted_mean_block=report.weighted_mean_block,
        max_block=report.max_block,
        ops_actual=report.ops.total,
        ops_paper_model=report.ops.paper_model,
        mean_log10_cond=report.mean_log10_cond,
        seed=seed, trial=trial,
    )


def _run_chunk(args):
    algorithm, n, k, eta, level, snr_db, seed, trials, with_cond = args
    noise = NoiseSpec(snr_db) if snr_db is not None else None
    return [run_trial(algorithm, n, k, eta, level, noise, seed, t, with_cond) for t in trials]


def worker_count(workers=None):
    if workers is None:
        workers = int(os.environ.get("SDFT_THREADS", "1"))
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def run_trials(algorithm, n, k, trials, eta=1, level=None, snr_db=None, seed=0,
               with_cond=False, workers=1):
    """Run ``trials`` independent trials, optionally across worker processes."""
    workers = worker_count(workers)
    idx = list(range(trials))
    if workers == 1 or trials < 2 * workers:
        return _run_chunk((algorithm, n, k, eta, level, snr_db, seed, idx, with_cond))
    chunks = [idx[i::workers] for i in range(workers)]
    jobs = [(algorithm, n, k, eta, level, snr_db, seed, c, with_cond) for c in chunks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, jobs))
    records = [rec for part in parts for rec in part]
    return sorted(records, key=lambda rec: rec.trial)


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------

def _mean(values):
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else math.nan


def aggregate(records, group_by=("algorithm", "N", "k", "eta", "snr_db")):
    """
    Fold records into one summary row per group, keyed by CSV column names.

    Error and condition-number means are taken over successful runs; block
    sizes and op counts over all runs.
    """
    if not records:
        raise InvalidInputError("no records to aggregate")
    groups = {}
    for rec in records:
        groups.setdefault(tuple(getattr(rec, g) for g in group_by), []).append(rec)
    rows = []
    for recs in groups.values():
        first = recs[0]
        ok = [rec for rec in recs if rec.success]
        rows.append({
            "k": first.k,
            "N": first.N,
            "algorithm": first.algorithm,
            "eta": first.eta,
            "r": first.r,
            "snr_db": first.snr_db,
            "trials": len(recs),
            "failure_rate": 1 - len(ok) / len(recs),
            "mean_error_l2": _mean([rec.error_l2 for rec in ok]),
            "mean_block": _mean([rec.mean_block for rec in recs]),
            "max_block": max(rec.max_block for rec in recs),
            "mean_ops_actual": _mean([rec.ops_actual for rec in recs]),
            "mean_ops_paper": _mean([rec.ops_paper_model for rec in recs]),
            # failed runs (possibly with infinite condition numbers) only count
            # towards failure_rate, exactly as for the error average
            "mean_log10_cond": _mean([rec.mean_log10_cond for rec in ok]),
        })
    return rows


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_csv(rows, path):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for row in rows:
            writer.writerow([_fmt(row[name]) for name in CSV_FIELDS])
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


_GP_HEADER = """set datafile separator ','
set key autotitle columnhead
set key outside right
set grid
"""


def _gp_curves(csv_name, algorithms, x_expr, y_col, extra_filter="1"):
    parts = []
    for algo in algorithms:
        parts.append(
            f"'{csv_name}' using ((strcol(3) eq '{algo}' && {extra_filter}) ? {x_expr} : 1/0)"
            f":{y_col} with linespoints title '{algo}'"
        )
    return "plot " + ", \\\n     ".join(parts) + "\n"


def write_gnuplot_scripts(csv_path, rows, out_dir=None):
    """Scripts for error vs log2 k, error vs SNR and log10 cond vs log2 k."""
    csv_path = Path(csv_path)
    out_dir = csv_path.parent if out_dir is None else Path(out_dir)
    name = csv_path.name
    algorithms = sorted({row["algorithm"] for row in rows})
    stem = csv_path.stem
    scripts = {}

    text = _GP_HEADER + "set xlabel 'log2 k'\nset ylabel 'mean l2 error'\nset logscale y\n"
    text += f"set output '{stem}_error_vs_k.png'\nset terminal pngcairo size 900,600\n"
    text += _gp_curves(name, algorithms, "log($1)/log(2)", 9)
    scripts["error_vs_k"] = text

    text = _GP_HEADER + "set xlabel 'SNR (dB)'\nset ylabel 'mean l2 error'\nset logscale y\n"
    text += "set terminal pngcairo size 900,600\n"
    for k in (8, 32, 256):
        text += f"set output '{stem}_error_vs_snr_k{k}.png'\nset title 'k = {k}'\n"
        text += _gp_curves(name, algorithms, "$6", 9, extra_filter=f"$1 == {k}")
    scripts["error_vs_snr"] = text

    text = _GP_HEADER + "set xlabel 'log2 k'\nset ylabel 'mean log10 condition number'\n"
    text += f"set output '{stem}_cond_vs_k.png'\nset terminal pngcairo size 900,600\n"
    text += _gp_curves(name, algorithms, "log($1)/log(2)", 14)
    scripts["cond_vs_k"] = text

    paths = []
    for key, body in scripts.items():
        p = out_dir / f"{stem}_{key}.gp"
        p.write_text(body)
        paths.append(p)
    return paths


def aggregate_and_emit(records, out_path, fmt="csv",
                       group_by=("algorithm", "N", "k", "eta", "snr_db")):
    """Aggregate records and write them as CSV (plus gnuplot scripts) or JSON."""
    rows = aggregate(records, group_by)
    out_path = Path(out_path)
    if fmt == "csv":
        write_csv(rows, out_path)
        scripts = write_gnuplot_scripts(out_path, rows)
        return [out_path] + scripts
    if fmt == "json":
        payload = {"rows": rows, "records": [asdict(rec) for rec in records]}
        out_path.write_text(json.dumps(payload, indent=2, default=str))
        return [out_path]
    raise InvalidInputError(f"unknown format {fmt!r}")
