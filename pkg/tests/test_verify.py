import json

import pytest

from structdft.errors import InvalidInputError
from structdft.progressive import MergingTree
from structdft.verify import (
    Violation, check_run, singular_bound, unresolved_root_bound, verify_lemmas,
)


def test_bounds():
    assert unresolved_root_bound(64, 5) == pytest.approx(0.005170, rel=1e-3)
    assert singular_bound(1 << 14, 64, 5) == pytest.approx(8 * 25 * 64 * 36 / 16384)


@pytest.mark.parametrize("eta,k", [(1, 64), (5, 64), (2, 16)])
def test_no_violations(eta, k):
    report = verify_lemmas(150, 1 << 14, k, eta, seed=2)
    assert report.ok, report.violations[:3]
    assert report.checked["skew_recursion"] > 0 and report.checked["node_count"] > 0
    est = report.unresolved_root
    assert est.ci_low <= est.rate <= est.ci_high
    assert "bound" in report.summary()
    json.dumps(report.to_dict())


def test_tampered_trace_is_caught(tmp_path):
    from structdft.bench import sample_support, trial_streams
    from structdft.core import synthesize_signal
    from structdft.progressive import ProgressiveConfig, progressive_sdft

    rng = trial_streams(0, 0)[0]
    support = sample_support(1 << 12, 32, rng)
    _, run = progressive_sdft(synthesize_signal(support, rng=rng), support, ProgressiveConfig())
    key = next(k for k, rec in run.nodes.items() if rec["status"] == "unresolved")
    run.nodes[key]["skew_after"] += 1
    found, _, _ = check_run(run, support)
    assert {v.check for v in found} >= {"skew_recursion", "open_skew"}

    report = verify_lemmas(1, 1 << 12, 32, seed=0)
    report.violations.append(Violation("rows", 0, (1, 0), "synthetic", {"x": 1}))
    path = report.write_counterexample(tmp_path / "ce.json")
    assert json.loads(path.read_text())["check"] == "rows"


def test_invalid_arguments():
    with pytest.raises(InvalidInputError):
        verify_lemmas(0, 64, 4)
    with pytest.raises(InvalidInputError):
        verify_lemmas(1, 64, 65)
