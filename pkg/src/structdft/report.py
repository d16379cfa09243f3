"""Per-run diagnostics shared by all structured DFT algorithms."""

from dataclasses import dataclass, field
import json
import math

from .core import OpCount
from .errors import SingularMatrixError, UnderdeterminedError


@dataclass
class RunReport:
    algorithm: str
    n: int
    k: int
    r: int
    eta: int = None
    block_sizes: list = field(default_factory=list)
    cond_blocks: list = field(default_factory=list)
    fft_sizes: list = field(default_factory=list)
    ops: OpCount = field(default_factory=OpCount)
    success: bool = True
    failure: str = None
    failure_node: tuple = None
    singular_nodes: list = field(default_factory=list)
    nodes: dict = field(default_factory=dict)
    stages: list = field(default_factory=list)
    systems: dict = field(default_factory=dict, repr=False)

    def fail(self, kind, node=None):
        if self.success:
            self.failure = kind
            self.failure_node = node
        self.success = False

    def raise_for_failure(self):
        if self.success:
            return
        cls = SingularMatrixError if self.failure == "singular" else UnderdeterminedError
        raise cls(f"{self.algorithm} failed ({self.failure}) at node {self.failure_node}",
                  node=self.failure_node)

    @property
    def mean_block(self):
        """Mean size over solved blocks."""
        if not self.block_sizes:
            return 0.0
        return sum(self.block_sizes) / len(self.block_sizes)

    @property
    def weighted_mean_block(self):
        """Mean block size seen by an unknown (blocks weighted by their size)."""
        total = sum(self.block_sizes)
        if not total:
            return 0.0
        return sum(m * m for m in self.block_sizes) / total

    @property
    def max_block(self):
        return max(self.block_sizes, default=0)

    @property
    def mean_log10_cond(self):
        if not self.cond_blocks:
            return None
        return sum(math.log10(c) for c in self.cond_blocks) / len(self.cond_blocks)

    def to_dict(self, trace=False):
        out = {
            "algorithm": self.algorithm,
            "n": self.n,
            "k": self.k,
            "r": self.r,
            "eta": self.eta,
            "block_sizes": list(self.block_sizes),
            "ops_actual": self.ops.total,
            "ops_detail": self.ops.as_dict(),
            "ops_paper_model": self.ops.paper_model,
            "fft_sizes": list(self.fft_sizes),
            "cond_blocks": [c if math.isfinite(c) else "inf" for c in self.cond_blocks],
            "success": self.success,
            "failure": self.failure,
            "failure_node": list(self.failure_node) if self.failure_node else None,
        }
        if trace:
            out["trace"] = self.stages
        return out

    def to_json(self, trace=False, **kwargs):
        return json.dumps(self.to_dict(trace), **kwargs)
