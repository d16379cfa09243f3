"""
Monte-Carlo checks of the structural invariants of the progressive algorithm.

Hard checks run on every observed node or merging tree and must never fail:

* ``columns``      a merging tree's matrix has one column per leaf unknown;
* ``rows``         it has ``min(eta * nodes, weight)`` rows;
* ``open_skew``    an unresolved node's skew equals weight - eta * nodes;
* ``skew_recursion``  recorded skews follow the label-size recursion;
* ``leaf_bounds``  complete trees of positive height have eta < mu <= eta (r+1)
                   at the leaves and 1 <= skew <= eta r at inner members;
* ``node_count``   a tree with y leaves and height h has >= 2y - 1 + h - log2 y nodes;
* ``failure_propagation``  a singular merging matrix always fails the run.

Soft checks compare empirical failure rates with their theoretical bounds.
"""

from dataclasses import asdict, dataclass, field
import json
import math
from pathlib import Path

from scipy.stats import binomtest

from .bench import sample_support, trial_streams
from .core import random_spectrum, synthesize_signal
from .errors import InvalidInputError
from .progressive import (
    NULL, UNRESOLVED, ProgressiveConfig, extract_merging_trees, leaf_bound_ok,
    node_count_bound, progressive_sdft, skewness_profile,
)
from .tree import build_tree

HARD_CHECKS = (
    "columns", "rows", "open_skew", "skew_recursion", "leaf_bounds", "node_count",
    "failure_propagation",
)


def unresolved_root_bound(k, eta):
    """e^(eta/3) / k^(eta/3), the bound on the probability that the root stays unresolved."""
    return math.exp(eta / 3) / k ** (eta / 3)


def singular_bound(n, k, eta):
    """8 eta^2 k log2(k)^2 / n, the bound on the probability of a singular merge."""
    return 8 * eta * eta * k * math.log2(k) ** 2 / n if k > 1 else 0.0


@dataclass
class Violation:
    check: str
    trial: int
    node: tuple
    detail: str
    trace: dict = field(default=None, repr=False)


@dataclass
class RateEstimate:
    count: int
    trials: int
    rate: float
    ci_low: float
    ci_high: float
    bound: float = None

    @classmethod
    def of(cls, count, trials, bound=None, confidence=0.95):
        ci = binomtest(count, trials).proportion_ci(confidence_level=confidence)
        return cls(count, trials, count / trials, float(ci.low), float(ci.high), bound)


@dataclass
class VerificationReport:
    trials: int
    n: int
    k: int
    eta: int
    seed: int
    checked: dict = field(default_factory=lambda: dict.fromkeys(HARD_CHECKS, 0))
    violations: list = field(default_factory=list)
    merging_trees: int = 0
    complete_trees: int = 0
    max_height: int = 0
    failure: RateEstimate = None
    unresolved_root: RateEstimate = None
    singular: RateEstimate = None

    @property
    def ok(self):
        return not self.violations

    def to_dict(self, with_traces=False):
        out = asdict(self)
        if not with_traces:
            for v in out["violations"]:
                v.pop("trace", None)
        out["ok"] = self.ok
        return out

    def summary(self):
        lines = [
            f"trials={self.trials} N={self.n} k={self.k} eta={self.eta} seed={self.seed}",
            f"merging trees: {self.merging_trees} ({self.complete_trees} complete, "
            f"max height {self.max_height})",
        ]
        for name in HARD_CHECKS:
            bad = sum(v.check == name for v in self.violations)
            lines.append(f"  {name:<20} checked {self.checked[name]:>8}  violations {bad}")
        for label, est in (("failure rate", self.failure),
                           ("unresolved-root rate", self.unresolved_root),
                           ("singular-merge rate", self.singular)):
            text = (f"{label}: {est.rate:.4%} "
                    f"(95% CI {est.ci_low:.4%} .. {est.ci_high:.4%})")
            if est.bound is not None:
                text += f", bound {est.bound:.4%}"
            lines.append(text)
        lines.append("hard checks: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines)

    def write_counterexample(self, path):
        """Dump the first violation with its full run trace as JSON."""
        if self.ok:
            return None
        path = Path(path)
        path.write_text(json.dumps(asdict(self.violations[0]), indent=2, default=str))
        return path


def _subtree_stats(recs, key, memo):
    # (unresolved leaf unknowns, unresolved node count) below and including key
    if key in memo:
        return memo[key]
    rec = recs[key]
    weight = nodes = 0
    if rec["status"] == UNRESOLVED:
        nodes = 1
        if not rec["children"]:
            weight = rec["mu"]
        for child in rec["children"]:
            if child in recs and recs[child]["status"] == UNRESOLVED:
                w, c = _subtree_stats(recs, child, memo)
                weight += w
                nodes += c
    memo[key] = (weight, nodes)
    return memo[key]


def check_run(report, support, trial=0):
    """
    Run every hard check on one finished progressive run.

    Returns ``(violations, counts, trees)`` where ``counts`` tallies how
    many instances of each check were evaluated.
    """
    eta, r = report.eta, report.r
    recs = report.nodes
    counts = dict.fromkeys(HARD_CHECKS, 0)
    found = []

    def bad(check, node, detail):
        found.append(Violation(check, trial, node, detail))

    profile = skewness_profile(build_tree(support, r), eta)
    for key, rec in recs.items():
        counts["skew_recursion"] += 1
        expected = profile[key]
        got = None if rec["status"] == NULL else rec["skew_after"]
        if got != expected:
            bad("skew_recursion", key, f"recorded skew {got}, recursion gives {expected}")

    memo = {}
    for key, rec in recs.items():
        if rec["status"] != UNRESOLVED:
            continue
        counts["open_skew"] += 1
        weight, nodes = _subtree_stats(recs, key, memo)
        if rec["skew_after"] != weight - eta * nodes:
            bad("open_skew", key,
                f"skew {rec['skew_after']} != weight {weight} - eta * {nodes} nodes")

    trees = extract_merging_trees(report)
    for t in trees:
        counts["columns"] += 1
        if t.cols != t.weight:
            bad("columns", t.root, f"{t.cols} columns for weight {t.weight}")
        counts["rows"] += 1
        want = min(eta * t.node_count, t.weight)
        if t.rows != want:
            bad("rows", t.root, f"{t.rows} rows, expected min({eta}*{t.node_count}, {t.weight})")
        counts["node_count"] += 1
        if t.leaves and t.node_count < node_count_bound(len(t.leaves), t.height) - 1e-9:
            bad("node_count", t.root,
                f"{t.node_count} nodes for {len(t.leaves)} leaves at height {t.height}")
        if t.complete and t.height >= 1:
            counts["leaf_bounds"] += 1
            for mu in t.leaf_mu:
                if not leaf_bound_ok(mu, eta, r):
                    bad("leaf_bounds", t.root, f"leaf size {mu} outside ({eta}, {eta * (r + 1)}]")
            for key in t.members:
                s = recs[key]["skew_after"]
                if key != t.root and not 1 <= s <= eta * r:
                    bad("leaf_bounds", key, f"member skew {s} outside [1, {eta * r}]")
        if t.singular:
            counts["failure_propagation"] += 1
            if report.success or t.root not in report.singular_nodes:
                bad("failure_propagation", t.root, "singular merge not reported as failure")
    return found, counts, trees


def verify_lemmas(trials, n, k, eta=1, seed=0, r=None, keep_traces=True):
    """
    Run ``trials`` noiseless progressive runs on random supports and check
    every structural invariant.  Violations carry the support and the node
    trace of the offending run so they can be replayed.
    """
    if trials < 1:
        raise InvalidInputError("trials must be at least 1")
    if not 0 < k <= n:
        raise InvalidInputError(f"k={k} must lie in (0, {n}]")
    out = VerificationReport(trials, n, k, eta, seed)
    failures = underdetermined = singular = 0
    for trial in range(trials):
        data_rng = trial_streams(seed, trial)[0]
        support = sample_support(n, k, data_rng)
        f = synthesize_signal(support, random_spectrum(support, data_rng))
        cfg = ProgressiveConfig(eta=eta, r=r)
        _, report = progressive_sdft(f, support, cfg)

        found, counts, trees = check_run(report, support, trial)
        for name, c in counts.items():
            out.checked[name] += c
        out.merging_trees += len(trees)
        out.complete_trees += sum(t.complete for t in trees)
        out.max_height = max([out.max_height] + [t.height for t in trees])
        if found and keep_traces:
            trace = {"support": list(support.indices), "n": n, "eta": eta, "seed": seed,
                     "trial": trial, "report": report.to_dict(trace=True)}
            for v in found:
                v.trace = trace
        out.violations.extend(found)

        failures += not report.success
        underdetermined += any(not t.complete for t in trees)
        singular += bool(report.singular_nodes)

    out.failure = RateEstimate.of(failures, trials)
    out.unresolved_root = RateEstimate.of(underdetermined, trials,
                                          unresolved_root_bound(k, eta))
    out.singular = RateEstimate.of(singular, trials, singular_bound(n, k, eta))
    return out
