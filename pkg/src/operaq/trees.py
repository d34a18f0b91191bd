"""Labeled rooted trees and the pre-Lie tree operad.

A rooted tree on n vertices is stored as a parent tuple: parents[v-1] is
the parent label of vertex v, or 0 for the root.  Vertex labels are
1..n.  Composition T∘ᵢS sums over all re-attachments of the edges that
entered vertex i, per the tree-operad composition law.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

Q = Fraction

ROOT = 0


@dataclass(frozen=True)
class RootedTree:
    parents: tuple[int, ...]

    def __post_init__(self):
        n = len(self.parents)
        roots = [v for v in range(1, n + 1) if self.parents[v - 1] == ROOT]
        if len(roots) != 1:
            raise ValueError("a rooted tree needs exactly one root")
        seen = set()
        for v in range(1, n + 1):
            path = []
            while v != ROOT:
                if v in path:
                    raise ValueError("parent map contains a cycle")
                if v in seen:
                    break
                path.append(v)
                v = self.parents[v - 1]
            seen.update(path)

    @property
    def n(self) -> int:
        return len(self.parents)

    @property
    def root(self) -> int:
        return self.parents.index(ROOT) + 1

    def children(self, v: int) -> tuple[int, ...]:
        return tuple(w for w in range(1, self.n + 1) if self.parents[w - 1] == v)

    def in_edges(self, v: int) -> tuple[int, ...]:
        """Sources of the incoming edges at v (its children)."""
        return self.children(v)

    def to_text(self) -> str:
        def rec(v):
            ch = self.children(v)
            if not ch:
                return str(v)
            return f"{v}({','.join(rec(c) for c in ch)})"

        return rec(self.root)

    @staticmethod
    def from_text(s: str) -> "RootedTree":
        s = s.replace(" ", "")
        pos = 0

        edges = {}

        def parse(parent):
            nonlocal pos
            start = pos
            while pos < len(s) and s[pos].isdigit():
                pos += 1
            v = int(s[start:pos])
            edges[v] = parent
            if pos < len(s) and s[pos] == "(":
                pos += 1
                while True:
                    parse(v)
                    if s[pos] == ",":
                        pos += 1
                        continue
                    if s[pos] == ")":
                        pos += 1
                        break
            return v

        parse(ROOT)
        n = max(edges)
        if sorted(edges) != list(range(1, n + 1)):
            raise ValueError("vertex labels must be 1..n")
        return RootedTree(tuple(edges[v] for v in range(1, n + 1)))


def corolla(n: int) -> RootedTree:
    """Root 1 with children 2..n."""
    return RootedTree((ROOT,) + (1,) * (n - 1))


def chain(n: int) -> RootedTree:
    """The linear tree 1 <- 2 <- ... <- n."""
    return RootedTree(tuple(range(0, n)))


class TreeSum:
    """Formal rational combination of rooted trees (no zero terms stored)."""

    def __init__(self, terms=None):
        self.terms: dict[RootedTree, Fraction] = {}
        for t, c in (terms or {}).items():
            c = Q(c)
            if c:
                self.terms[t] = c

    def add(self, other: "TreeSum") -> "TreeSum":
        out = dict(self.terms)
        for t, c in other.terms.items():
            acc = out.get(t, Q(0)) + c
            if acc:
                out[t] = acc
            elif t in out:
                del out[t]
        return TreeSum(out)

    def scale(self, c) -> "TreeSum":
        c = Q(c)
        return TreeSum({t: c * v for t, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, TreeSum) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(
            (f"{c}·" if c != 1 else "") + t.to_text() for t, c in sorted(
                self.terms.items(), key=lambda kv: kv[0].parents
            )
        )


def prelie_compose(T: RootedTree, i: int, S: RootedTree) -> TreeSum:
    """T∘ᵢS: replace vertex i of T by S, re-attaching incoming edges all ways.

    Labels: vertices of S become i-1+j (j its label), vertices v of T stay
    v for v < i and shift to v+m-1 for v > i.
    """
    if not 1 <= i <= T.n:
        raise IndexError(f"vertex {i} out of range (arity {T.n})")
    m = S.n
    incoming = T.in_edges(i)

    def t_label(v):
        return v if v < i else v + m - 1

    def s_label(j):
        return i - 1 + j

    out: dict[RootedTree, Fraction] = {}
    for attach in product(range(1, m + 1), repeat=len(incoming)):
        parents = [ROOT] * (T.n + m - 1)
        for v in range(1, T.n + 1):
            if v == i:
                continue
            p = T.parents[v - 1]
            if v in incoming:
                parents[t_label(v) - 1] = s_label(attach[incoming.index(v)])
            elif p == ROOT:
                parents[t_label(v) - 1] = ROOT
            else:
                parents[t_label(v) - 1] = t_label(p)
        for j in range(1, m + 1):
            p = S.parents[j - 1]
            if p == ROOT:
                # root of S sits where i sat
                pi = T.parents[i - 1]
                parents[s_label(j) - 1] = ROOT if pi == ROOT else t_label(pi)
            else:
                parents[s_label(j) - 1] = s_label(p)
        t = RootedTree(tuple(parents))
        acc = out.get(t, Q(0)) + 1
        out[t] = acc
    return TreeSum(out)


def prelie_compose_sum(A: TreeSum, i: int, B: TreeSum) -> TreeSum:
    out = TreeSum()
    for t1, c1 in A.terms.items():
        for t2, c2 in B.terms.items():
            out = out.add(prelie_compose(t1, i, t2).scale(c1 * c2))
    return out


def all_rooted_trees(n: int) -> list[RootedTree]:
    """All labeled rooted trees on n vertices, by direct enumeration."""
    out = []
    for parents in product(range(0, n + 1), repeat=n):
        try:
            t = RootedTree(tuple(parents))
        except ValueError:
            continue
        out.append(t)
    return out


def prelie_operad_dims(n: int) -> int:
    """dim of the arity-n component: labeled rooted trees on n vertices."""
    if n < 1:
        raise ValueError("arity must be positive")
    return len(all_rooted_trees(n))


def cayley_count(n: int) -> int:
    """n^(n-1), the closed-form count used as the enumeration oracle."""
    return n ** (n - 1)


def relabel(T: RootedTree, sigma) -> RootedTree:
    """Vertex relabeling v -> sigma(v)."""
    parents = [ROOT] * T.n
    for v in range(1, T.n + 1):
        p = T.parents[v - 1]
        parents[sigma(v) - 1] = ROOT if p == ROOT else sigma(p)
    return RootedTree(tuple(parents))
