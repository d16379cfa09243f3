"""
Reference algorithms: the square submatrix solve and shift-and-sample.

Both return ``(coeffs, report)`` where ``coeffs`` maps each support index to
its estimated DFT coefficient and ``report`` is a :class:`RunReport`.
"""

import logging
import math

import numpy as np

from .core import OpCount, fourier_rows, aliased_spectra, solve_paper_cost, log2_exact
from .errors import InvalidInputError, SingularMatrixError
from .linalg import SINGULAR_TOL, cond2, lu_solve
from .report import RunReport
from .tree import build_tree

log = logging.getLogger(__name__)

STABLE = "stable"
OPTIMAL = "optimal"


def resolve_level(choice, k):
    """
    Map a level choice to an integer level.

    ``"stable"`` gives ceil(log2 k); ``"optimal"`` gives
    ceil(log2 k - log2 log2 k), clamped to ceil(log2 k) for k <= 2 where the
    double logarithm is not usable.  Integers pass through unchanged.
    """
    if k < 1:
        raise InvalidInputError("k must be positive")
    if isinstance(choice, (int, np.integer)) and not isinstance(choice, bool):
        return int(choice)
    lk = math.log2(k)
    stable = math.ceil(round(lk, 12))
    if choice in (STABLE, "auto-stable"):
        log.debug("r*=%d: (1, k log^2 k) regime for k=%d", stable, k)
        return stable
    if choice in (OPTIMAL, "auto-optimal"):
        if k <= 2:
            return stable
        r = max(0, math.ceil(round(lk - math.log2(lk), 12)))
        log.debug("r_*=%d: (log k, k log k) regime for k=%d", r, k)
        return r
    raise InvalidInputError(f"unknown level choice {choice!r}")


def _block_cond(a, rng):
    try:
        return cond2(a, rng=rng, singular_tol=0.0)
    except SingularMatrixError:
        return math.inf


def submatrix_method(f, support, ops=None, perturb=None, with_cond=False,
                     singular_tol=SINGULAR_TOL, rng=None):
    """
    Solve the k x k system built from the first k time samples.

    The rows are ``exp(+2j*pi*m*j/N)`` for ``m = 0..k-1`` and the right-hand
    side is ``N * f[m]``, i.e. the inverse-DFT submatrix scaled by N so that
    its entries have unit modulus like the other algorithms' systems.
    """
    f = np.asarray(f, dtype=complex)
    n = f.shape[0]
    log2_exact(n)
    if support.n != n:
        raise InvalidInputError("support and signal lengths differ")
    ops = OpCount() if ops is None else ops
    k = len(support)
    report = RunReport("submatrix", n, k, 0, ops=ops)
    freqs = support.as_array()
    a = fourier_rows(np.arange(k), freqs, n).conj()
    b = n * f[:k]
    ops.count(mults=k)
    if perturb is not None:
        b = perturb(b)
    report.block_sizes.append(k)
    ops.paper_model += 6 * k * k
    if with_cond:
        report.cond_blocks.append(_block_cond(a, rng))
    try:
        x = lu_solve(a, b, singular_tol=singular_tol, ops=ops)
    except SingularMatrixError:
        report.fail("singular", (0, 0))
        report.singular_nodes.append((0, 0))
        x = np.full(k, np.nan + 0j)
    return dict(zip(support.indices, x.tolist())), report


def shift_and_sample(f, support, level=STABLE, ops=None, perturb=None, with_cond=False,
                     singular_tol=SINGULAR_TOL, rng=None):
    """
    Shift-and-sample at a single tree level r.

    The signal is downsampled to 2**r points for shifts ``0..mu*-1`` (mu* the
    largest label at level r); every level-r node with m unknowns then solves
    the m x m system on the first m shifts.
    """
    f = np.asarray(f, dtype=complex)
    n = f.shape[0]
    m_log2 = log2_exact(n)
    if support.n != n:
        raise InvalidInputError("support and signal lengths differ")
    k = len(support)
    r = resolve_level(level, k)
    if not 0 <= r <= m_log2:
        raise InvalidInputError(f"level {r} outside [0, {m_log2}]")
    ops = OpCount() if ops is None else ops
    report = RunReport("shift-sample", n, k, r, ops=ops)

    tree = build_tree(support, r)
    mu = tree.mu_star(r)
    if mu == 0:
        return {}, report
    values = aliased_spectra(f, r, range(mu), ops=ops)
    report.fft_sizes.extend([1 << r] * mu)

    coeffs = {}
    for key in tree.nodes_at_level(r):
        node = tree[key]
        m = node.mu
        a = fourier_rows(np.arange(m), node.label, n)
        b = values[:m, node.residue]
        if perturb is not None:
            b = perturb(b)
        report.block_sizes.append(m)
        ops.paper_model += solve_paper_cost(m)
        if with_cond:
            report.cond_blocks.append(_block_cond(a, rng))
        try:
            x = lu_solve(a, b, singular_tol=singular_tol, ops=ops)
        except SingularMatrixError:
            report.fail("singular", key)
            report.singular_nodes.append(key)
            x = np.full(m, np.nan + 0j)
        coeffs.update(zip(node.label, x.tolist()))
    return {j: coeffs[j] for j in support.indices}, report
