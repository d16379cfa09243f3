"""
Acceptance suite: one test per criterion, each printing a PASS/FAIL line
with the measured quantity and its wall-clock time against the budget.
"""

import time

import numpy as np

from structdft.baselines import shift_and_sample, submatrix_method
from structdft.bench import aggregate, run_trials
from structdft.core import (
    SupportSet, aliased_spectrum, fft_paper_cost, fft_pow2, random_spectrum, shift,
    synthesize_signal,
)
from structdft.progressive import ProgressiveConfig, extract_merging_trees, progressive_sdft
from structdft.verify import unresolved_root_bound, verify_lemmas

from conftest import ACCEPTANCE_LINES
from oracles import direct_dft

N14 = 1 << 14
KS = (8, 16, 32, 64, 128, 256)
WORKED = (0, 1, 6, 7, 38, 65, 135, 512)
STAGED = (1, 3, 4, 5, 6, 7, 19, 21, 23, 32, 40, 48, 56, 70, 82)


def verdict(num, title, ok, detail, start, budget):
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed <= budget
    line = (f"{'PASS' if ok else 'FAIL'} criterion {num} ({title}): {detail} "
            f"[{elapsed:.1f}s / {budget}s]")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def mean_by_k(records, field):
    rows = aggregate(records, group_by=("k",))
    return {row["k"]: row[field] for row in rows}


def test_criterion_1_worked_example_op_count():
    start = time.perf_counter()
    support = SupportSet(WORKED, 1024)
    f = synthesize_signal(support, rng=np.random.default_rng(7))
    _, report = shift_and_sample(f, support, 2)
    _, sub = submatrix_method(f, support)
    got = (report.ops.paper_model, fft_paper_cost(1024), sub.ops.paper_model)
    verdict(1, "worked-example op count", got == (44, 15360, 384),
            f"shift-sample={got[0]} full-FFT={got[1]} submatrix={got[2]} (want 44/15360/384)",
            start, 1)


def test_criterion_2_staged_example_replay():
    start = time.perf_counter()
    support = SupportSet(STAGED, 1024)
    f = synthesize_signal(support, rng=np.random.default_rng(0))
    _, report = progressive_sdft(f, support, ProgressiveConfig(eta=1))
    pattern = [
        {tuple(n["label"]): n["status"] for n in stage["nodes"]} for stage in report.stages
    ]
    r, u, x = "resolved", "unresolved", "null"
    want = [
        {(1,): r, (82,): r, (4,): r, (7, 23): u, (3, 19): u, (5, 21): u, (6, 70): u,
         (40, 56): u, (32, 48): u},
        {(7, 23): r, (3, 19): r, (5, 21): r, (6, 70): r, (1,): x, (82,): x, (4,): x,
         (32, 40, 48, 56): u},
        {(4, 32, 40, 48, 56): r, (1, 5, 21): x, (6, 70, 82): x, (3, 7, 19, 23): x},
    ]
    merge = report.nodes[(2, 0)]
    trees = [t for t in extract_merging_trees(report) if t.weight == 4]
    ok = (pattern == want and report.success and merge["cols"] == 4
          and sorted(merge["unknowns"]) == [32, 40, 48, 56]
          and len(trees) == 1 and trees[0].height == 2)
    verdict(2, "staged example replay", ok,
            f"stages={len(pattern)} pattern_match={pattern == want} "
            f"merge=4x4 on {sorted(merge['unknowns'])}", start, 1)


def test_criterion_3_oracle_equivalence():
    start = time.perf_counter()
    worst = {}
    runs = {}
    for k in KS:
        algos = ["shift-sample", "progressive"] + (["submatrix"] if k <= 32 else [])
        for algo in algos:
            recs = run_trials(algo, N14, k, 500, seed=3)
            errs = [rec.rel_error for rec in recs if rec.success]
            runs[algo] = runs.get(algo, 0) + len(errs)
            worst[(algo, k)] = max(errs, default=0.0)
    bad = {key: v for key, v in worst.items() if v > 1e-8}
    by_algo = {a: max(v for (b, _), v in worst.items() if b == a) for a in runs}
    # informational: shift-and-sample at the complexity-optimal level
    optimal = max(rec.rel_error for k in KS
                  for rec in run_trials("shift-sample-optimal", N14, k, 500, seed=3)
                  if rec.success)
    detail = ", ".join(f"{a} max rel err {by_algo[a]:.1e} over {runs[a]} runs" for a in runs)
    detail += f"; over 1e-8: {sorted(bad)}"
    detail += f"; [info] shift-sample at optimal level max rel err {optimal:.1e}"
    verdict(3, "oracle equivalence", not bad, detail, start, 300)


def test_criterion_4_submatrix_error_trend():
    start = time.perf_counter()
    mean = {}
    for k in (16, 128):
        recs = run_trials("submatrix", N14, k, 1000, seed=4)
        mean[k] = np.mean([rec.error_l2 for rec in recs if rec.success])
    ratio = mean[128] / mean[16]
    verdict(4, "submatrix error growth", ratio >= 10,
            f"mean l2 error k=16: {mean[16]:.2e}, k=128: {mean[128]:.2e}, ratio {ratio:.2e} (need >= 10)",
            start, 180)


def test_criterion_5_stability_separation():
    start = time.perf_counter()
    prog, opt, sub = [], [], []
    for k in KS:
        prog += run_trials("progressive", N14, k, 1000, seed=5, with_cond=k >= 32)
        opt += run_trials("shift-sample-optimal", N14, k, 1000, seed=5)
        if k >= 32:
            sub += run_trials("submatrix", N14, k, 1000, seed=5, with_cond=True)
    prog_block = mean_by_k(prog, "mean_block")
    opt_block = mean_by_k(opt, "mean_block")
    prog_cond = mean_by_k(prog, "mean_log10_cond")
    sub_cond = mean_by_k(sub, "mean_log10_cond")

    flat = prog_block[256] <= 1.5 * prog_block[8]
    increasing = all(opt_block[a] < opt_block[b] for a, b in zip(KS, KS[1:]))
    separated = all(prog_cond[k] < sub_cond[k] for k in KS if k >= 32)
    detail = (
        f"progressive block k=8 {prog_block[8]:.3f} -> k=256 {prog_block[256]:.3f} "
        f"(ratio {prog_block[256] / prog_block[8]:.3f}, flat={flat}); "
        f"optimal-level shift-sample blocks "
        f"{[round(opt_block[k], 3) for k in KS]} (strictly increasing={increasing}); "
        f"log10 cond progressive {[round(prog_cond[k], 2) for k in KS if k >= 32]} vs submatrix "
        f"{[round(sub_cond[k], 2) for k in KS if k >= 32]} (separated={separated})"
    )
    verdict(5, "stability separation", flat and increasing and separated, detail, start, 600)


def test_criterion_6_complexity_scaling():
    start = time.perf_counter()
    ops = mean_by_k([rec for k in KS for rec in run_trials("progressive", N14, k, 500, seed=6)],
                    "mean_ops_actual")
    x = np.array([k * np.log2(k) for k in KS])
    y = np.array([ops[k] for k in KS])
    # least squares weighted by 1/x, i.e. minimise sum(((y - c x) / x)^2)
    c = float(np.mean(y / x))
    resid = np.abs(y - c * x) / (c * x)
    verdict(6, "complexity scaling", resid.max() <= 0.2,
            f"c={c:.2f}, ops/(k log2 k)={[round(float(v), 2) for v in y / x]}, "
            f"max relative residual {resid.max():.3f} (need <= 0.2)", start, 300)


def test_criterion_7_probabilistic_guarantees():
    start = time.perf_counter()
    rep = verify_lemmas(10_000, N14, 64, eta=5, seed=7)
    bound = unresolved_root_bound(64, 5)
    ok = (rep.failure.rate <= 0.05 and rep.unresolved_root.rate <= 3 * bound
          and rep.singular.rate <= 0.01)
    verdict(7, "probabilistic guarantees", ok,
            f"failure {rep.failure.rate:.3%}, unresolved root {rep.unresolved_root.rate:.3%} "
            f"(95% CI up to {rep.unresolved_root.ci_high:.3%}; 3x bound {3 * bound:.3%}), "
            f"singular merges {rep.singular.rate:.3%} (need <= 1%)", start, 600)


def test_criterion_8_structural_invariants():
    start = time.perf_counter()
    rep = verify_lemmas(10_000, N14, 64, eta=1, seed=8)
    names = ("skew_recursion", "columns", "rows", "leaf_bounds", "node_count")
    counts = {name: sum(v.check == name for v in rep.violations) for name in names}
    verdict(8, "structural invariants", rep.ok,
            f"{rep.merging_trees} merging trees, {rep.checked['skew_recursion']} nodes checked, "
            f"violations {counts}", start, 300)


def test_criterion_9_numerical_identities():
    start = time.perf_counter()
    rng = np.random.default_rng(9)
    alias_err = phase_err = 0.0
    for _ in range(1000):
        m = int(rng.integers(1, 11))
        n = 1 << m
        level, t = int(rng.integers(0, m + 1)), int(rng.integers(0, 4 * n))
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        full = np.fft.fft(f)
        ref = np.zeros(1 << level, dtype=complex)
        np.add.at(ref, np.arange(n) % (1 << level),
                  full * np.exp(-2j * np.pi * ((np.arange(n) * t) % n) / n))
        got = aliased_spectrum(f, level, t)
        alias_err = max(alias_err, np.linalg.norm(got - ref) / np.linalg.norm(ref))

        fs = fft_pow2(shift(f, t))
        ff = fft_pow2(f)
        phase = np.exp(-2j * np.pi * ((np.arange(n) * t) % n) / n)
        phase_err = max(phase_err, np.linalg.norm(fs - phase * ff) / np.linalg.norm(ff))

    fft_err = 0.0
    for m in range(11):
        x = rng.standard_normal(1 << m) + 1j * rng.standard_normal(1 << m)
        ref = direct_dft(x)
        fft_err = max(fft_err, np.linalg.norm(fft_pow2(x) - ref) / np.linalg.norm(ref))
    ok = alias_err <= 1e-10 and phase_err <= 1e-10 and fft_err <= 1e-12
    verdict(9, "numerical identities", ok,
            f"aliasing max rel err {alias_err:.1e}, shift-phase {phase_err:.1e} (need <= 1e-10); "
            f"FFT vs direct sum up to N=1024 {fft_err:.1e} (need <= 1e-12)", start, 60)
