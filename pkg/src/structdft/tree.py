"""
Congruence trees of support sets.

A node at level ``l`` is identified by ``(l, c)`` with ``0 <= c < 2**l``; its
label is the set of support elements congruent to ``c`` modulo ``2**l``.  The
left ("odd") child of ``(l, c)`` is ``(l + 1, c + 2**l)`` and the right
("even") child is ``(l + 1, c)``.  Empty residue classes are never stored.
"""

from dataclasses import dataclass
import json

from .core import SupportSet
from .errors import InvalidInputError


@dataclass(frozen=True)
class TreeNode:
    level: int
    residue: int
    label: tuple

    @property
    def mu(self):
        return len(self.label)

    @property
    def key(self):
        return (self.level, self.residue)


def _bit_reverse(c, width):
    out = 0
    for _ in range(width):
        out = (out << 1) | (c & 1)
        c >>= 1
    return out


class CongruenceTree:
    """Binary residue-class tree of a support set, truncated at level ``r_max``."""

    def __init__(self, support, r_max):
        if not isinstance(support, SupportSet):
            raise InvalidInputError("expected a SupportSet")
        m = support.m_log2
        if not 0 <= r_max <= m:
            raise InvalidInputError(f"r_max={r_max} outside [0, {m}]")
        self.support = support
        self.r_max = r_max
        self.nodes = {}
        self._levels = []
        for level in range(r_max + 1):
            mod = 1 << level
            groups = {}
            for j in support.indices:
                groups.setdefault(j % mod, []).append(j)
            keys = []
            for c, label in groups.items():
                self.nodes[(level, c)] = TreeNode(level, c, tuple(label))
                keys.append((level, c))
            # left-to-right drawing order
            keys.sort(key=lambda kc: _bit_reverse(kc[1], level), reverse=True)
            self._levels.append(keys)

    @property
    def root(self):
        return (0, 0)

    @property
    def k(self):
        return len(self.support)

    def __getitem__(self, key):
        return self.nodes[key]

    def __contains__(self, key):
        return key in self.nodes

    def __len__(self):
        return len(self.nodes)

    def nodes_at_level(self, level):
        if not 0 <= level <= self.r_max:
            raise InvalidInputError(f"level {level} outside [0, {self.r_max}]")
        return list(self._levels[level])

    def children(self, key):
        """Return ``(left, right)`` child keys; a missing child is ``None``."""
        level, c = key
        if level >= self.r_max:
            return (None, None)
        left = (level + 1, c + (1 << level))
        right = (level + 1, c)
        return (left if left in self.nodes else None,
                right if right in self.nodes else None)

    def parent(self, key):
        level, c = key
        if level == 0:
            return None
        return (level - 1, c % (1 << (level - 1)))

    def mu_star(self, level):
        if level > self.r_max:
            raise InvalidInputError(f"level {level} is below the retained tree")
        return max((self.nodes[key].mu for key in self._levels[level]), default=0)

    def mean_label_size(self, level):
        """The Binomial mean k / 2**level of a node size under the random-support model."""
        return self.k / (1 << level)

    def post_order(self, start=None, include=None):
        """
        Left subtree, right subtree, then the node itself.

        ``include`` optionally restricts the descent to keys for which it
        returns true (the start node is always listed).
        """
        start = self.root if start is None else start
        if start not in self.nodes:
            return []
        out = []
        stack = [(start, False)]
        while stack:
            key, expanded = stack.pop()
            if expanded:
                out.append(key)
                continue
            stack.append((key, True))
            left, right = self.children(key)
            for child in (right, left):
                if child is not None and (include is None or include(child)):
                    stack.append((child, False))
        return out

    def to_dict(self, status=None):
        status = status or {}
        return {
            "n": self.support.n,
            "r_max": self.r_max,
            "nodes": [
                {
                    "level": node.level,
                    "residue": node.residue,
                    "label": list(node.label),
                    "mu": node.mu,
                    "status": status.get(key, "unresolved"),
                }
                for level in range(self.r_max + 1)
                for key in self._levels[level]
                for node in (self.nodes[key],)
            ],
        }

    def to_json(self, status=None, **kwargs):
        return json.dumps(self.to_dict(status), **kwargs)


def build_tree(support, r_max):
    return CongruenceTree(support, r_max)


def mu_star(tree, level):
    return tree.mu_star(level)


def nodes_at_level(tree, level):
    return tree.nodes_at_level(level)


def parent(tree, key):
    return tree.parent(key)


def post_order(tree, start=None):
    return tree.post_order(start)
