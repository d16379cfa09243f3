"""
Shift and progressive sample.

The run starts at tree level ``r`` (default ceil(log2 k)) and climbs one
level per stage.  Stage ``s`` (level ``l = r - s``) takes ``eta`` DFTs of
size ``2**l`` at shifts ``eta*s .. eta*(s+1)-1``.  Every tree node owns a
system of equations over its still-unknown coefficients:

* case 1: both children resolved (or absent) -> the node's equation is redundant;
* case 2: both children unresolved -> block-diagonal merge of their systems;
* case 3: one child unresolved -> that child's system is carried over;
* case 4: level-``r`` leaf -> a fresh system on the node label.

Cases 2-4 then append ``min(eta, skewness)`` new rows, after removing the
contribution of coefficients already known.  A node whose system becomes
square is resolved and solved.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.linalg import block_diag

from .baselines import resolve_level, _block_cond
from .core import OpCount, aliased_spectra, fourier_rows, log2_exact, solve_paper_cost
from .errors import InvalidInputError, SingularMatrixError
from .linalg import SINGULAR_TOL, lu_solve
from .report import RunReport
from .tree import build_tree

RESOLVED = "resolved"
UNRESOLVED = "unresolved"
NULL = "null"


@dataclass
class ProgressiveConfig:
    """
    eta
        New equations per node and stage (1 reproduces the small worked
        example; 5 or more is needed for the high-probability guarantee).
    r
        Starting level; ``None`` means ceil(log2 |J|).
    early_exit
        Stop climbing once every coefficient is known.
    check_redundant
        Compare each redundant (case 1) equation with the known coefficients
        and store the relative residual in the node record.
    """

    eta: int = 1
    r: int = None
    singular_tol: float = SINGULAR_TOL
    trace: bool = False
    early_exit: bool = True
    check_redundant: bool = False

    def __post_init__(self):
        if int(self.eta) < 1:
            raise InvalidInputError("eta must be at least 1")
        if self.r is not None and self.r < 0:
            raise InvalidInputError("start level must be non-negative")


@dataclass
class NodeSystem:
    key: tuple
    case: int
    unknowns: list
    matrix: np.ndarray = None
    rhs: np.ndarray = None
    shifts_used: list = field(default_factory=list)
    status: str = UNRESOLVED
    skew_before: int = 0
    rows_added: int = 0
    solve: str = None

    @property
    def rows(self):
        return 0 if self.matrix is None else self.matrix.shape[0]

    @property
    def cols(self):
        return len(self.unknowns)


def skewness(ns):
    """Columns minus rows of a node system; zero means the node can be solved."""
    if ns.status == NULL:
        raise InvalidInputError(f"node {ns.key} carries no system")
    return ns.cols - ns.rows


def subtract_known(value, resolved, t, n, ops=None):
    """Remove ``sum_j resolved[j] * exp(-2j*pi*t*j/n)`` from a measured value."""
    if not resolved:
        return complex(value)
    j = np.fromiter(resolved.keys(), dtype=np.int64, count=len(resolved))
    c = np.fromiter(resolved.values(), dtype=complex, count=len(resolved))
    phase = np.exp(-2j * np.pi * ((t * j) % n) / n)
    if ops is not None:
        ops.count(adds=len(j), mults=len(j))
        ops.paper_model += 2 * len(j)
    return complex(value - np.dot(c, phase))


def assemble_node_system(key, label, children, stage_values, shifts, resolved, eta, n,
                         ops=None):
    """
    Build the system of one node for the current stage.

    ``children`` is ``None`` for a leaf at the starting level, otherwise the
    pair of child systems (``None`` where a child does not exist).
    ``stage_values`` holds the node's entry of each of the stage's ``eta``
    aliased spectra, aligned with ``shifts``.
    """
    if children is None:
        case = 4
        unknowns = list(label)
        matrix = np.zeros((0, len(unknowns)), dtype=complex)
        rhs = np.zeros(0, dtype=complex)
        used = []
    else:
        open_kids = [c for c in children if c is not None and c.status == UNRESOLVED]
        if not open_kids:
            return NodeSystem(key, 1, [], status=NULL)
        if len(open_kids) == 2:
            case = 2
            left, right = open_kids
            unknowns = left.unknowns + right.unknowns
            matrix = block_diag(left.matrix, right.matrix)
            rhs = np.concatenate((left.rhs, right.rhs))
            used = left.shifts_used + right.shifts_used
        else:
            case = 3
            child = open_kids[0]
            unknowns = list(child.unknowns)
            matrix = child.matrix
            rhs = child.rhs
            used = list(child.shifts_used)

    skew_before = len(unknowns) - matrix.shape[0]
    take = min(eta, skew_before)
    new_shifts = list(shifts[:take])
    if take:
        open_set = set(unknowns)
        known = {j: resolved[j] for j in label if j not in open_set}
        new_rhs = [subtract_known(stage_values[i], known, t, n, ops)
                   for i, t in enumerate(new_shifts)]
        matrix = np.vstack((matrix, fourier_rows(new_shifts, unknowns, n)))
        rhs = np.concatenate((rhs, np.asarray(new_rhs, dtype=complex)))
    ns = NodeSystem(key, case, unknowns, matrix, rhs, used + new_shifts,
                    skew_before=skew_before, rows_added=take)
    ns.status = RESOLVED if skewness(ns) == 0 else UNRESOLVED
    return ns


def progressive_sdft(f, support, cfg=None, ops=None, perturb=None, with_cond=False, rng=None):
    """
    Compute the DFT coefficients of ``f`` on ``support``.

    Returns ``(coeffs, report)``.  On failure the report carries
    ``failure`` = ``"singular"`` (a resolved node's square system was not
    invertible) or ``"underdetermined"`` (the root system stayed wide), and
    the affected coefficients are NaN.  ``perturb`` is applied to every
    right-hand side just before its solve.
    """
    cfg = ProgressiveConfig() if cfg is None else cfg
    f = np.asarray(f, dtype=complex)
    n = f.shape[0]
    m_log2 = log2_exact(n)
    if support.n != n:
        raise InvalidInputError("support and signal lengths differ")
    k = len(support)
    eta = int(cfg.eta)
    r = resolve_level("stable", max(k, 1)) if cfg.r is None else int(cfg.r)
    if r > m_log2:
        raise InvalidInputError(f"start level {r} exceeds log2 N = {m_log2}")
    ops = OpCount() if ops is None else ops
    report = RunReport("progressive", n, k, r, eta=eta, ops=ops)
    if k == 0:
        return {}, report

    tree = build_tree(support, r)
    systems = {}
    coeffs = {}
    remaining = k

    for stage in range(r + 1):
        if cfg.early_exit and remaining == 0:
            break
        level = r - stage
        shifts = list(range(eta * stage, eta * (stage + 1)))
        values = aliased_spectra(f, level, shifts, ops=ops)
        report.fft_sizes.extend([1 << level] * eta)
        stage_rec = {"stage": stage, "level": level, "shifts": shifts,
                     "fft_size": 1 << level, "n_ffts": eta, "nodes": []}

        for key in tree.nodes_at_level(level):
            node = tree[key]
            kids = None
            if level < r:
                kids = [systems.get(c) if c is not None else None for c in tree.children(key)]
            ns = assemble_node_system(key, node.label, kids, values[:, node.residue], shifts,
                                      coeffs, eta, n, ops=ops)
            systems[key] = ns
            rec = {
                "level": level,
                "residue": node.residue,
                "label": list(node.label),
                "mu": node.mu,
                "case": ns.case,
                "children": [c for c in tree.children(key) if c is not None] if level < r else [],
                "status": ns.status,
                "skew_before": ns.skew_before if ns.status != NULL else None,
                "skew_after": skewness(ns) if ns.status != NULL else None,
                "rows_added": ns.rows_added,
                "rows": ns.rows,
                "cols": ns.cols,
                "unknowns": list(ns.unknowns),
                "solve": None,
            }

            if ns.status == NULL and cfg.check_redundant:
                clean = subtract_known(values[0, node.residue],
                                       {j: coeffs[j] for j in node.label}, shifts[0], n)
                scale = max(abs(values[0, node.residue]), 1e-300)
                rec["redundant_residual"] = abs(clean) / scale

            if ns.status == RESOLVED:
                m = ns.cols
                b = ns.rhs if perturb is None else perturb(ns.rhs)
                report.block_sizes.append(m)
                ops.paper_model += solve_paper_cost(m)
                if with_cond:
                    report.cond_blocks.append(_block_cond(ns.matrix, rng))
                try:
                    x = lu_solve(ns.matrix, b, singular_tol=cfg.singular_tol, ops=ops)
                    ns.solve = "ok"
                except SingularMatrixError:
                    x = np.full(m, np.nan + 0j)
                    ns.solve = "singular"
                    report.singular_nodes.append(key)
                    report.fail("singular", key)
                rec["solve"] = ns.solve
                coeffs.update(zip(ns.unknowns, x.tolist()))
                remaining -= m

            report.nodes[key] = rec
            stage_rec["nodes"].append(rec)
        report.stages.append(stage_rec)

    if remaining > 0:
        report.fail("underdetermined", tree.root)
    report.systems = systems
    out = {j: coeffs.get(j, complex(np.nan, np.nan)) for j in support.indices}
    return out, report


# ---------------------------------------------------------------------------
# merging trees
# ---------------------------------------------------------------------------

@dataclass
class MergingTree:
    root: tuple
    members: list
    leaves: list
    weight: int
    height: int
    skew: int
    rows: int
    cols: int
    leaf_mu: list
    complete: bool
    singular: bool = False

    @property
    def node_count(self):
        return len(self.members)


def _parent(key):
    level, c = key
    return None if level == 0 else (level - 1, c % (1 << (level - 1)))


def _post_order(recs, start, include):
    out = []
    stack = [(start, False)]
    while stack:
        key, expanded = stack.pop()
        if expanded:
            out.append(key)
            continue
        stack.append((key, True))
        for child in reversed(recs[key]["children"]):
            if include(child):
                stack.append((child, False))
    return out


def extract_merging_trees(report):
    """
    Merging trees of a finished progressive run.

    One tree is rooted at every node that solved a system (cases 2-4) and
    at every unresolved node whose parent was never processed (the root of
    an underdetermined run).  Members are the root plus all unresolved
    descendants reachable through unresolved nodes, in post-order.
    """
    recs = report.nodes
    r = report.r
    roots = []
    for key, rec in recs.items():
        if rec["status"] == RESOLVED:
            roots.append(key)
        elif rec["status"] == UNRESOLVED and _parent(key) not in recs:
            roots.append(key)

    def open_node(key):
        return key in recs and recs[key]["status"] == UNRESOLVED

    trees = []
    for root in roots:
        rec = recs[root]
        members = _post_order(recs, root, open_node)
        leaves = [key for key in members if key[0] == r]
        trees.append(MergingTree(
            root=root,
            members=members,
            leaves=leaves,
            weight=sum(recs[key]["mu"] for key in leaves),
            height=r - root[0],
            skew=rec["skew_after"],
            rows=rec["rows"],
            cols=rec["cols"],
            leaf_mu=[recs[key]["mu"] for key in leaves],
            complete=rec["status"] == RESOLVED,
            singular=rec["solve"] == "singular",
        ))
    return trees


def skewness_profile(tree, eta):
    """
    Skewness of every node computed from label sizes alone.

    Uses ``s(leaf) = max(mu - eta, 0)`` and
    ``s(i) = max(s(left) + s(right) - eta, 0)`` bottom-up, without running
    the algorithm.  Nodes whose children are both resolved are reported as
    ``None`` (they carry no system).
    """
    r = tree.r_max
    skew = {}
    for level in range(r, -1, -1):
        for key in tree.nodes_at_level(level):
            if level == r:
                skew[key] = max(tree[key].mu - eta, 0)
                continue
            open_sum = sum(skew[c] or 0 for c in tree.children(key) if c is not None)
            skew[key] = None if open_sum == 0 else max(open_sum - eta, 0)
    return skew


def leaf_bound_ok(mu, eta, r):
    """Leaf sizes of a complete merging tree of positive height satisfy eta < mu <= eta (r+1)."""
    return eta < mu <= eta * (r + 1)


def node_count_bound(leaves, height):
    """Smallest node count of a merging tree: 2y - 1 + h - log2 y."""
    return 2 * leaves - 1 + height - math.log2(leaves)
