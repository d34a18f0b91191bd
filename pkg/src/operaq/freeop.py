"""Free and quasi-free operads on tree bases; cobar; ideals and quotients.

Tree encoding (hashable nested tuples):

* a leaf is the int letter it carries;
* ("g", arity, gen_name, children) is a generator vertex, children in
  slot order;
* ("c", children) is a commutative vertex of the over-Comm presentations
  (children unordered; kept sorted by minimal leaf, never nested).

Canonical form sorts every vertex's children by minimal leaf.  Sorting a
generator vertex applies the generator's symmetric action, so a raw tree
canonicalizes to a sum; Koszul signs appear whenever odd-degree subtrees
swap.  The differential of a presentation is extended from generators as
a derivation with pre-order sign bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .linalg import (
    GradedBasisSpace,
    SparseMap,
    express_in_rows,
    row_space_echelon,
    sparse_rank,
)
from .symseq import Permutation
from .cooperads import CooperadData, build_coP1_counital
from .presented import (
    SUBST,
    insertion_letter_map,
    set_partitions,
)

Q = Fraction


class TruncationError(ValueError):
    """Composition exceeded the arity truncation; never silently dropped."""


def tree_leaves(t):
    if isinstance(t, int):
        return (t,)
    if t[0] == "c":
        return tuple(x for ch in t[1] for x in tree_leaves(ch))
    return tuple(x for ch in t[3] for x in tree_leaves(ch))


def tree_min_leaf(t):
    return min(tree_leaves(t))


# ---------------------------------------------------------------------------
# Generator sets
# ---------------------------------------------------------------------------


class GeneratorSet:
    """Per-arity generator spaces with symmetric actions.

    ``spaces[n]`` is a GradedBasisSpace; ``act(n, sigma)`` a SparseMap on
    it.  Used both for plain free operads and the over-Comm presentations.
    """

    def __init__(self, spaces: dict[int, GradedBasisSpace], act):
        self.spaces = dict(spaces)
        self._act = act
        self._cache: dict = {}

    def arities(self):
        return sorted(self.spaces)

    def degree(self, n: int, name: str) -> int:
        return self.spaces[n].degree[name]

    def act(self, n: int, sigma: Permutation) -> SparseMap:
        key = (n, sigma.images)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._act(n, sigma)
            self._cache[key] = hit
        return hit


def generator_set_from_cooperad(C: CooperadData, min_weight=None) -> GeneratorSet:
    """Desuspended cogenerators: same names, degrees raised by one.

    With ``min_weight`` the weight-graded slices below it are dropped
    (the over-Comm presentations keep only weight >= 2).
    """
    spaces = {}
    for n in range(2, C.max_arity + 1):
        sp = C.space(n)
        names = tuple(
            b
            for b in sp.basis
            if min_weight is None or C.blocks(n, b) >= min_weight
        )
        if not names:
            continue
        spaces[n] = GradedBasisSpace(
            names,
            {b: sp.degree[b] + 1 for b in names},
            {b: sp.weight[b] for b in names},
        )

    def act(n, sigma):
        full = C.act(n, sigma)
        sp = spaces[n]
        keep = set(sp.basis)
        entries = {
            (s, t): v for (s, t), v in full.entries.items() if s in keep and t in keep
        }
        return SparseMap(sp, sp, 0, entries)

    return GeneratorSet(spaces, act)


# ---------------------------------------------------------------------------
# Free operad backend
# ---------------------------------------------------------------------------


class FreeOperadBackend:
    """Trees on a generator set, optionally over a commutative vertex.

    Implements the common backend protocol: ``space``, ``compose_basis``,
    ``act``, plus ``differential`` when built by a presentation.
    """

    def __init__(self, gens: GeneratorSet, max_arity: int, over_comm: bool = False):
        self.gens = gens
        self.max_arity = max_arity
        self.over_comm = over_comm
        self._tree_names: dict[int, dict[str, tuple]] = {}
        self._spaces: dict[int, GradedBasisSpace] = {}
        self._compose_cache: dict = {}
        self.d_generators: dict[tuple[int, str], dict] = {}

    # -- canonicalization ----------------------------------------------------

    def tree_degree(self, t) -> int:
        if isinstance(t, int):
            return 0
        if t[0] == "c":
            return sum(self.tree_degree(ch) for ch in t[1])
        return self.gens.degree(t[1], t[2]) + sum(self.tree_degree(ch) for ch in t[3])

    def canonicalize(self, t) -> dict:
        """Raw tree -> {canonical tree: coeff}."""
        if isinstance(t, int):
            return {t: Q(1)}
        if t[0] == "c":
            out: dict = {(): Q(1)}  # partial children tuples
            flat = []
            for ch in t[1]:
                if isinstance(ch, tuple) and ch and ch[0] == "c":
                    flat.extend(ch[1])
                else:
                    flat.append(ch)
            acc = [(Q(1), ())]
            for ch in flat:
                nxt = []
                for coeff, done in acc:
                    for sub, c2 in self.canonicalize(ch).items():
                        if isinstance(sub, tuple) and sub and sub[0] == "c":
                            nxt.append((coeff * c2, done + tuple(sub[1])))
                        else:
                            nxt.append((coeff * c2, done + (sub,)))
                acc = nxt
            result: dict = {}
            for coeff, children in acc:
                s, sorted_children = self._koszul_sort(children)
                key = ("c", sorted_children)
                if len(sorted_children) == 1:
                    key = sorted_children[0]
                _accum(result, key, coeff * s)
            return result
        _, arity, name, children = t
        acc = [(Q(1), (), name)]
        for ch in children:
            nxt = []
            for coeff, done, label in acc:
                for sub, c2 in self.canonicalize(ch).items():
                    nxt.append((coeff * c2, done + (sub,), label))
            acc = nxt
        result = {}
        for coeff, chs, label in acc:
            for c2, sorted_chs, label2 in self._sort_generator_children(
                arity, label, chs
            ):
                _accum(result, ("g", arity, label2, sorted_chs), coeff * c2)
        return result

    def _koszul_sort(self, children):
        chs = list(children)
        sign = Q(1)
        for i in range(len(chs)):
            for j in range(len(chs) - 1 - i):
                if tree_min_leaf(chs[j]) > tree_min_leaf(chs[j + 1]):
                    if self.tree_degree(chs[j]) % 2 and self.tree_degree(chs[j + 1]) % 2:
                        sign = -sign
                    chs[j], chs[j + 1] = chs[j + 1], chs[j]
        return sign, tuple(chs)

    def _sort_generator_children(self, arity, label, children):
        """Bubble children into min-leaf order, acting on the label."""
        states = [(Q(1), list(children), label)]
        # repeatedly fix the first adjacent inversion
        out = []
        while states:
            coeff, chs, lab = states.pop()
            pos = None
            for i in range(len(chs) - 1):
                if tree_min_leaf(chs[i]) > tree_min_leaf(chs[i + 1]):
                    pos = i
                    break
            if pos is None:
                out.append((coeff, tuple(chs), lab))
                continue
            swap = Permutation.transposition(arity, pos + 1)
            action = self.gens.act(arity, swap)
            sign = Q(1)
            if self.tree_degree(chs[pos]) % 2 and self.tree_degree(chs[pos + 1]) % 2:
                sign = -sign
            chs2 = list(chs)
            chs2[pos], chs2[pos + 1] = chs2[pos + 1], chs2[pos]
            for tgt, v in action(lab).items():
                states.append((coeff * sign * v, list(chs2), tgt))
        return out

    # -- bases ----------------------------------------------------------------

    def tree_name(self, t) -> str:
        if isinstance(t, int):
            return str(t)
        if t[0] == "c":
            return "(" + "·".join(self.tree_name(ch) for ch in t[1]) + ")"
        body = ",".join(self.tree_name(ch) for ch in t[3])
        return f"{t[2]}({body})"

    def trees(self, n: int) -> dict[str, tuple]:
        table = self._tree_names.get(n)
        if table is None:
            table = {self.tree_name(t): t for t in self._enumerate(tuple(range(1, n + 1)), True)}
            self._tree_names[n] = table
        return table

    def _enumerate(self, leaves: tuple[int, ...], allow_comm_root: bool):
        out = []
        if len(leaves) == 1:
            out.append(leaves[0])
            return out
        # generator roots (children may be commutative vertices)
        for a in self.gens.arities():
            if a > len(leaves):
                continue
            for blocks in _ordered_partitions(leaves, a):
                child_lists = [self._enumerate(b, True) for b in blocks]
                for combo in _product_lists(child_lists):
                    for gname in self.gens.spaces[a].basis:
                        out.append(("g", a, gname, tuple(combo)))
        if self.over_comm and allow_comm_root:
            for blocks in _unordered_partitions(leaves):
                if len(blocks) < 2:
                    continue
                child_lists = [self._enumerate(b, False) for b in blocks]
                for combo in _product_lists(child_lists):
                    out.append(("c", tuple(combo)))
        return out

    def space(self, n: int) -> GradedBasisSpace:
        sp = self._spaces.get(n)
        if sp is None:
            table = self.trees(n)
            names = tuple(sorted(table))
            sp = GradedBasisSpace(
                names, {b: self.tree_degree(table[b]) for b in names}
            )
            self._spaces[n] = sp
        return sp

    # -- operad structure -------------------------------------------------------

    def graft(self, k, tree_a, S, m, tree_b) -> dict:
        """a∘_S b as a raw tree, then canonicalized."""
        S = tuple(sorted(S))
        n = k + m - 1
        if n > self.max_arity:
            raise TruncationError(f"arity {n} exceeds truncation {self.max_arity}")
        slot_letter = insertion_letter_map(k, S)
        letter_of_b = {j: S[j - 1] for j in range(1, m + 1)}

        def relabel_a(t):
            if isinstance(t, int):
                target = slot_letter[t]
                if target == SUBST:
                    return relabel_b(tree_b)
                return target
            if t[0] == "c":
                return ("c", tuple(relabel_a(ch) for ch in t[1]))
            return ("g", t[1], t[2], tuple(relabel_a(ch) for ch in t[3]))

        def relabel_b(t):
            if isinstance(t, int):
                return letter_of_b[t]
            if t[0] == "c":
                return ("c", tuple(relabel_b(ch) for ch in t[1]))
            return ("g", t[1], t[2], tuple(relabel_b(ch) for ch in t[3]))

        return self.canonicalize(relabel_a(tree_a))

    def compose_basis(self, k, name_a, S, m, name_b) -> dict[str, Fraction]:
        key = (k, name_a, tuple(sorted(S)), m, name_b)
        hit = self._compose_cache.get(key)
        if hit is None:
            ta = self.trees(k)[name_a]
            tb = self.trees(m)[name_b]
            raw = self.graft(k, ta, tuple(sorted(S)), m, tb)
            hit = {self.tree_name(t): c for t, c in raw.items() if c}
            self._compose_cache[key] = hit
        return hit

    def act(self, n: int, sigma: Permutation) -> SparseMap:
        sp = self.space(n)
        entries = {}

        def relabel(t):
            if isinstance(t, int):
                return sigma(t)
            if t[0] == "c":
                return ("c", tuple(relabel(ch) for ch in t[1]))
            return ("g", t[1], t[2], tuple(relabel(ch) for ch in t[3]))

        for name, t in self.trees(n).items():
            for t2, c in self.canonicalize(relabel(t)).items():
                if c:
                    entries[(name, self.tree_name(t2))] = c
        return SparseMap(sp, sp, 0, entries)

    # -- differential -----------------------------------------------------------

    def set_generator_differential(self, arity: int, name: str, value: dict):
        """value: {canonical tree: coeff} on local letters 1..arity."""
        self.d_generators[(arity, name)] = {t: Q(c) for t, c in value.items() if c}

    def differential_tree(self, t) -> dict:
        """Derivation extension; pre-order Koszul signs on generator degrees."""
        out: dict = {}
        for raw, coeff in self._d_rec(t, 1):
            for t2, c2 in self.canonicalize(raw).items():
                _accum(out, t2, coeff * c2)
        return out

    def _d_rec(self, t, sign):
        """List of (raw tree, coeff) for d applied inside t; ``sign`` is the
        Koszul prefix sign accumulated from vertices already passed."""
        if isinstance(t, int):
            return []
        results = []
        if t[0] == "g":
            _, arity, name, children = t
            dgen = self.d_generators.get((arity, name), {})
            for local, c in dgen.items():
                results.append((_graft_local(local, children), sign * c))
            child_sign = sign if self.gens.degree(arity, name) % 2 == 0 else -sign
            chs = list(children)
            for i, ch in enumerate(chs):
                for raw, c in self._d_rec(ch, child_sign):
                    results.append(
                        (("g", arity, name, tuple(chs[:i] + [raw] + chs[i + 1 :])), c)
                    )
                if self.tree_degree(ch) % 2:
                    child_sign = -child_sign
        else:
            chs = list(t[1])
            child_sign = sign
            for i, ch in enumerate(chs):
                for raw, c in self._d_rec(ch, child_sign):
                    results.append((("c", tuple(chs[:i] + [raw] + chs[i + 1 :])), c))
                if self.tree_degree(ch) % 2:
                    child_sign = -child_sign
        return results

    def differential(self, n: int) -> SparseMap:
        sp = self.space(n)
        entries = {}
        for name, t in self.trees(n).items():
            for t2, c in self.differential_tree(t).items():
                if c:
                    entries[(name, self.tree_name(t2))] = c
        return SparseMap(sp, sp, 1, entries)

    def check_d_squared(self, n: int) -> bool:
        for name, t in self.trees(n).items():
            acc: dict = {}
            for t1, c1 in self.differential_tree(t).items():
                for t2, c2 in self.differential_tree(t1).items():
                    _accum(acc, t2, c1 * c2)
            if any(acc.values()):
                return False
        return True


def _accum(d, key, val):
    acc = d.get(key, Q(0)) + val
    if acc:
        d[key] = acc
    elif key in d:
        del d[key]


def _graft_local(local_tree, children):
    """Replace local letters 1..a in a differential value by subtrees."""
    if isinstance(local_tree, int):
        return children[local_tree - 1]
    if local_tree[0] == "c":
        return ("c", tuple(_graft_local(ch, children) for ch in local_tree[1]))
    return (
        "g",
        local_tree[1],
        local_tree[2],
        tuple(_graft_local(ch, children) for ch in local_tree[3]),
    )


def _ordered_partitions(leaves, a):
    """Partitions of the leaf set into a blocks, ordered by minimal letter."""
    out = []
    for part in set_partitions(leaves):
        if len(part) != a:
            continue
        blocks = sorted((tuple(sorted(b)) for b in part), key=lambda b: b[0])
        out.append(tuple(blocks))
    return out


def _unordered_partitions(leaves):
    out = []
    for part in set_partitions(leaves):
        blocks = sorted((tuple(sorted(b)) for b in part), key=lambda b: b[0])
        out.append(tuple(blocks))
    return out


def _product_lists(lists):
    if not lists:
        yield []
        return
    for head in lists[0]:
        for rest in _product_lists(lists[1:]):
            yield [head] + rest


# ---------------------------------------------------------------------------
# Operad elements over any backend
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperadElement:
    """A linear combination of arity-n basis operations of a backend."""

    backend: object
    arity: int
    coeffs: dict

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", {k: Q(v) for k, v in self.coeffs.items() if v}
        )

    def is_zero(self):
        return not self.coeffs

    def add(self, other):
        if other.arity != self.arity or other.backend is not self.backend:
            raise ValueError("cannot add: different arity or backend")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            _accum(out, k, v)
        return OperadElement(self.backend, self.arity, out)

    def scale(self, c):
        c = Q(c)
        return OperadElement(
            self.backend, self.arity, {k: c * v for k, v in self.coeffs.items()}
        )

    def compose_S(self, S, other):
        S = tuple(sorted(S))
        n = self.arity + other.arity - 1
        if n > getattr(self.backend, "max_arity", n):
            raise TruncationError(f"arity {n} exceeds backend truncation")
        out: dict = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                for t, v in self.backend.compose_basis(
                    self.arity, a, S, other.arity, b
                ).items():
                    _accum(out, t, ca * cb * v)
        return OperadElement(self.backend, n, out)

    def compose_at(self, i: int, other):
        if not 1 <= i <= self.arity:
            raise IndexError(f"slot {i} out of range for arity {self.arity}")
        return self.compose_S(tuple(range(i, i + other.arity)), other)

    def act(self, sigma: Permutation):
        mat = self.backend.act(self.arity, sigma)
        out: dict = {}
        for name, c in self.coeffs.items():
            for t, v in mat(name).items():
                _accum(out, t, c * v)
        return OperadElement(self.backend, self.arity, out)

    def superscript(self, sigma: Permutation):
        """The worked-example superscript: act by the inverse relabeling."""
        return self.act(sigma.inverse())

    def vector(self) -> dict[int, Fraction]:
        sp = self.backend.space(self.arity)
        idx = {b: i for i, b in enumerate(sp.basis)}
        return {idx[name]: c for name, c in self.coeffs.items()}


def element(backend, arity, name_or_dict) -> OperadElement:
    if isinstance(name_or_dict, str):
        return OperadElement(backend, arity, {name_or_dict: Q(1)})
    return OperadElement(backend, arity, name_or_dict)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------


@dataclass
class OperadPresentation:
    """Quasi-free operad data: a free backend plus generator differentials."""

    backend: FreeOperadBackend
    max_arity: int
    label: str = ""

    def check_d_squared(self, up_to: int | None = None) -> bool:
        top = self.max_arity if up_to is None else up_to
        return all(self.backend.check_d_squared(n) for n in range(1, top + 1))


def cobar(C: CooperadData, max_arity: int) -> OperadPresentation:
    """Quasi-free operad on the desuspended coaugmentation coideal.

    The differential of a generator is the reduced decomposition of its
    cooperation rewritten as 2-vertex trees.
    """
    gens = generator_set_from_cooperad(C)
    backend = FreeOperadBackend(gens, max_arity)
    for n in range(2, max_arity + 1):
        if n not in gens.spaces:
            continue
        terms = C.delta1_reduced(n)
        for name in gens.spaces[n].basis:
            value: dict = {}
            for t in terms[name]:
                inner = ("g", t.m, t.inner, tuple(range(1, t.m + 1)))
                local = _plug(t, n, inner)
                # desuspension bookkeeping: one sign per odd outer value
                sign = -1 if gens.degree(t.k, t.outer) % 2 else 1
                for t2, c2 in backend.canonicalize(local).items():
                    _accum(value, t2, sign * t.coeff * c2)
            backend.set_generator_differential(n, name, value)
    return OperadPresentation(backend, max_arity, label=f"cobar({C.name})")


def _plug(term, n, inner_tree):
    """Slot-1 2-level tree relabeled by the term's block shuffle."""
    sigma = term.shuffle(n)
    outer = (
        "g",
        term.k,
        term.outer,
        (inner_tree,) + tuple(range(term.m + 1, n + 1)),
    )
    return _relabel_local(outer, {j: sigma(j) for j in range(1, n + 1)})


def _relabel_local(t, mapping):
    if isinstance(t, int):
        return mapping[t]
    if t[0] == "c":
        return ("c", tuple(_relabel_local(ch, mapping) for ch in t[1]))
    return ("g", t[1], t[2], tuple(_relabel_local(ch, mapping) for ch in t[3]))


def homotopy_poisson_presentation(max_arity: int) -> OperadPresentation:
    """The weight-graded quasi-free presentation over the commutative part.

    Generators: weight >= 2 cooperations (one corolla family per weight),
    one per cooperation name; the single-block weight-1 cooperations are
    realized by commutative vertices (arity 2) or vanish (arity >= 3).
    The generator differential is the uniform 2-vertex expansion of the
    reduced decomposition.
    """
    C = build_coP1_counital(max_arity)
    gens = generator_set_from_cooperad(C, min_weight=2)
    backend = FreeOperadBackend(gens, max_arity, over_comm=True)
    for n in range(2, max_arity + 1):
        if n not in gens.spaces:
            continue
        terms = C.delta1_reduced(n)
        for name in gens.spaces[n].basis:
            value: dict = {}
            for t in terms[name]:
                outer_tree = _realize(C, t.k, t.outer)
                inner_tree = _realize(C, t.m, t.inner)
                if outer_tree is None or inner_tree is None:
                    continue
                raw = _plug_tree(backend, t, n, outer_tree, inner_tree)
                # desuspension bookkeeping: one sign per odd outer value
                sign = -1 if backend.tree_degree(outer_tree) % 2 else 1
                for t2, c2 in raw.items():
                    _accum(value, t2, sign * t.coeff * c2)
            backend.set_generator_differential(n, name, value)
    return OperadPresentation(backend, max_arity, label="homotopy-poisson")


def _realize(C: CooperadData, n: int, name: str):
    """Cooperation -> local tree: generator, comm vertex, or None (killed)."""
    if C.blocks(n, name) >= 2:
        return ("g", n, name, tuple(range(1, n + 1)))
    if n == 2:  # the binary single-block cooperation realizes the product
        return ("c", (1, 2))
    return None


def _plug_tree(backend, term, n, outer_tree, inner_tree):
    """Slot-1 grafting followed by the block-shuffle relabeling."""
    sigma = term.shuffle(n)
    inner = _relabel_local(inner_tree, {j: j for j in range(1, term.m + 1)})

    def sub(t):
        if isinstance(t, int):
            if t == 1:
                return inner
            return t + term.m - 1
        if t[0] == "c":
            return ("c", tuple(sub(ch) for ch in t[1]))
        return ("g", t[1], t[2], tuple(sub(ch) for ch in t[3]))

    raw = _relabel_local(sub(outer_tree), {j: sigma(j) for j in range(1, n + 1)})
    return backend.canonicalize(raw)


# ---------------------------------------------------------------------------
# Free operad on explicit binary generators; relation-rank dimensions
# ---------------------------------------------------------------------------


def gerstenhaber_generator_set() -> GeneratorSet:
    """Binary generators of the odd-bracket predual: product (degree 0,
    trivial action) and bracket (degree +1, sign action).

    The sign action is the encoding of the suspended bracket that makes
    the quadratic quotient flat (dims n!) in this tree calculus; the
    trivial-action variant collapses below n! at arity 4 (tested).
    """
    sp = GradedBasisSpace(("l", "m"), {"l": 1, "m": 0})

    def act(n, sigma):
        assert n == 2
        if sigma.images == (1, 2):
            return SparseMap.identity(sp)
        return SparseMap(sp, sp, 0, {("m", "m"): Q(1), ("l", "l"): Q(-1)})

    return GeneratorSet({2: sp}, act)


class QuotientOperadBackend:
    """Quotient of a free graded operad by a saturated relation ideal.

    The component basis is a section: designated representative trees, one
    per quotient basis element.  Composition grafts representatives in the
    free operad and reduces modulo the ideal back into section
    coordinates; the symmetric action is handled the same way.  All signs
    come from the free backend's graded tree canonicalization.
    """

    def __init__(self, free: FreeOperadBackend, relations, section, max_arity):
        self.free = free
        self.max_arity = max_arity
        self._section = dict(section)  # n -> list of (name, tree)
        self._ideal_rows = saturate_ideal(
            free, _group_by_arity(relations), max_arity
        )
        self._spaces: dict[int, GradedBasisSpace] = {}
        self._solvers: dict[int, tuple] = {}
        self._compose_cache: dict = {}
        self._act_cache: dict = {}

    def space(self, n: int) -> GradedBasisSpace:
        sp = self._spaces.get(n)
        if sp is None:
            names, degree, weight = [], {}, {}
            for name, tree in self._section[n]:
                names.append(name)
                degree[name] = self.free.tree_degree(tree)
                weight[name] = _block_count(tree)
            sp = GradedBasisSpace(tuple(names), degree, weight)
            self._spaces[n] = sp
        return sp

    def _solver(self, n: int):
        """Echelon of (ideal rows + section rows) with provenance kept."""
        hit = self._solvers.get(n)
        if hit is None:
            rows = [dict(r) for r in self._ideal_rows.get(n, [])]
            tags = [None] * len(rows)
            fsp = self.free.space(n)
            idx = {b: i for i, b in enumerate(fsp.basis)}
            for name, tree in self._section[n]:
                vec: dict = {}
                for t2, c in self.free.canonicalize(tree).items():
                    vec[idx[self.free.tree_name(t2)]] = c
                rows.append(vec)
                tags.append(name)
            hit = (rows, tags, idx)
            self._solvers[n] = hit
        return hit

    def _reduce(self, n: int, free_vec: dict) -> dict[str, Fraction]:
        """Express a free-operad vector in quotient section coordinates."""
        rows, tags, idx = self._solver(n)
        coeffs = express_in_rows(rows, free_vec)
        if coeffs is None:
            raise ValueError("vector not in ideal + section span")
        out = {}
        for c, tag in zip(coeffs, tags):
            if tag is not None and c:
                out[tag] = c
        return out

    def _tree_of(self, n, name):
        for nm, tree in self._section[n]:
            if nm == name:
                return tree
        raise KeyError(name)

    def compose_basis(self, k, name_a, S, m, name_b) -> dict[str, Fraction]:
        key = (k, name_a, tuple(sorted(S)), m, name_b)
        hit = self._compose_cache.get(key)
        if hit is None:
            n = k + m - 1
            raw = self.free.graft(
                k, self._tree_of(k, name_a), tuple(sorted(S)), m, self._tree_of(m, name_b)
            )
            fsp = self.free.space(n)
            idx = {b: i for i, b in enumerate(fsp.basis)}
            vec: dict = {}
            for t2, c in raw.items():
                i = idx[self.free.tree_name(t2)]
                vec[i] = vec.get(i, Q(0)) + c
            hit = self._reduce(n, {i: c for i, c in vec.items() if c})
            self._compose_cache[key] = hit
        return hit

    def act(self, n: int, sigma) -> SparseMap:
        key = (n, sigma.images)
        hit = self._act_cache.get(key)
        if hit is None:
            sp = self.space(n)
            entries = {}
            fsp = self.free.space(n)
            idx = {b: i for i, b in enumerate(fsp.basis)}
            for name, tree in self._section[n]:
                relabeled = _relabel_local(
                    tree, {j: sigma(j) for j in range(1, n + 1)}
                )
                vec: dict = {}
                for t2, c in self.free.canonicalize(relabeled).items():
                    i = idx[self.free.tree_name(t2)]
                    vec[i] = vec.get(i, Q(0)) + c
                for tgt, c in self._reduce(n, {i: v for i, v in vec.items() if v}).items():
                    entries[(name, tgt)] = c
            hit = SparseMap(sp, sp, 0, entries)
            self._act_cache[key] = hit
        return hit


def _group_by_arity(elements):
    out: dict[int, list] = {}
    for e in elements:
        out.setdefault(e.arity, []).append(e)
    return out


def _block_count(tree) -> int:
    """Number of bracket blocks of a section tree (product of combs)."""
    if isinstance(tree, int):
        return 1
    if tree[0] == "g" and tree[2] == "m":
        return sum(_block_count(ch) for ch in tree[3])
    return 1


def _comb_tree(gen: str, letters) -> object:
    letters = list(letters)
    if len(letters) == 1:
        return letters[0]
    out = letters[0]
    for x in letters[1:]:
        out = ("g", 2, gen, (out, x))
    return out


def poisson_section_tree(mono) -> object:
    """Representative tree of a partition/word monomial: a product comb of
    left-normed bracket combs."""
    blocks = [_comb_tree("l", w) for w in mono]
    if len(blocks) == 1:
        return blocks[0]
    out = blocks[0]
    for b in blocks[1:]:
        out = ("g", 2, "m", (out, b))
    return out


def gerstenhaber_relations(free: FreeOperadBackend):
    """Associativity, odd Jacobi and odd Leibniz in the free graded operad.

    The Jacobi/Leibniz signs are pinned by the dimension count of the
    quotient (n! per arity, the flat/PBW criterion) — any other choice
    collapses the quotient below n! (checked in tests).
    """
    l = element(free, 2, free.tree_name(("g", 2, "l", (1, 2))))
    m = element(free, 2, free.tree_name(("g", 2, "m", (1, 2))))
    assoc = m.compose_at(1, m).add(m.compose_at(2, m).scale(-1))
    ll = l.compose_at(1, l)
    jacobi = (
        ll.add(ll.superscript(Permutation((2, 3, 1))))
        .add(ll.superscript(Permutation((3, 1, 2))))
    )
    ml = m.compose_at(2, l)
    leibniz = l.compose_at(1, m).add(ml.scale(-1)).add(
        ml.act(Permutation((2, 1, 3))).scale(-1)
    )
    return [assoc, jacobi, leibniz]


@lru_cache(maxsize=None)
def gerstenhaber_quotient(max_arity: int) -> QuotientOperadBackend:
    """The odd-bracket Poisson-type operad as a quotient of a free graded
    operad, with partition/word names for the section representatives."""
    from .presented import poisson_operad, monomial_name

    free = FreeOperadBackend(gerstenhaber_generator_set(), max_arity)
    shapes = poisson_operad(max_arity)
    section = {
        n: [
            (monomial_name(mono), poisson_section_tree(mono))
            for mono in shapes.basis(n)
        ]
        for n in range(1, max_arity + 1)
    }
    return QuotientOperadBackend(
        free, gerstenhaber_relations(free), section, max_arity
    )


def binary_generator_set(antisymmetric_bracket=True) -> GeneratorSet:
    """Two binary generators: 'm' (symmetric product), 'l' (bracket)."""
    sp = GradedBasisSpace(("l", "m"), {"l": 0, "m": 0})
    swap = Permutation((2, 1))

    def act(n, sigma):
        assert n == 2
        if sigma.images == (1, 2):
            return SparseMap.identity(sp)
        return SparseMap(
            sp, sp, 0, {("m", "m"): Q(1), ("l", "l"): Q(-1 if antisymmetric_bracket else 1)}
        )

    return GeneratorSet({2: sp}, act)


def lie_generator_set() -> GeneratorSet:
    sp = GradedBasisSpace(("l",), {"l": 0})

    def act(n, sigma):
        if sigma.images == (1, 2):
            return SparseMap.identity(sp)
        return SparseMap(sp, sp, 0, {("l", "l"): Q(-1)})

    return GeneratorSet({2: sp}, act)


def free_operad_component(gens: GeneratorSet, n: int, max_arity=None) -> GradedBasisSpace:
    backend = FreeOperadBackend(gens, max_arity or n)
    return backend.space(n)


def poisson_relation_elements(backend: FreeOperadBackend):
    """Associativity, Jacobi and Leibniz elements in the free binary operad."""
    m = element(backend, 2, backend.tree_name(("g", 2, "m", (1, 2))))
    l = element(backend, 2, backend.tree_name(("g", 2, "l", (1, 2))))
    assoc = m.compose_at(1, m).add(m.compose_at(2, m).scale(-1))
    jacobi = (
        l.compose_at(1, l)
        .add(l.compose_at(1, l).superscript(Permutation((2, 3, 1))))
        .add(l.compose_at(1, l).superscript(Permutation((3, 1, 2))))
    )
    leibniz = (
        l.compose_at(1, m)
        .add(m.compose_at(2, l).scale(-1))
        .add(m.compose_at(2, l).act(Permutation((2, 1, 3))).scale(-1))
    )
    return {"assoc": assoc, "jacobi": jacobi, "leibniz": leibniz}


def _element_rows(elements):
    return [e.vector() for e in elements]


def relation_ideal_dims(max_arity: int, lie_only=False):
    """Dimensions of the quotient by the relation ideal, by saturation.

    Returns (dims, ideal_ranks): dims[n] = dim F(E)(n) - rank I(n).
    """
    gens = lie_generator_set() if lie_only else binary_generator_set()
    backend = FreeOperadBackend(gens, max_arity)
    if lie_only:
        l = element(backend, 2, backend.tree_name(("g", 2, "l", (1, 2))))
        start = [
            l.compose_at(1, l)
            .add(l.compose_at(1, l).superscript(Permutation((2, 3, 1))))
            .add(l.compose_at(1, l).superscript(Permutation((3, 1, 2))))
        ]
    else:
        start = list(poisson_relation_elements(backend).values())
    ideal = saturate_ideal(backend, {3: start}, max_arity)
    dims = {}
    ranks = {}
    for n in range(1, max_arity + 1):
        rank_n = len(ideal.get(n, []))
        ranks[n] = rank_n
        dims[n] = backend.space(n).dim - rank_n
    return dims, ranks


def saturate_ideal(backend, generators_by_arity: dict, max_arity: int):
    """Breadth-first operadic ideal closure, arity by arity.

    generators_by_arity: {arity: [OperadElement]}.  Returns {arity:
    echelon row basis} (rows are vectors over the backend basis).

    At each arity the span is generated by (a) the full symmetric orbits
    of the explicit generators and (b) all insertions e∘_S g and g∘_S e
    of the previous arity's ideal basis against the binary basis, over
    every letter set S.  Because the lower basis is symmetric-group
    closed and all S are taken, operad equivariance makes the resulting
    span closed as well (asserted by tests at low arity).  Deterministic:
    fixed enumeration order, one echelon reduction per arity.
    """
    basis_elements: dict[int, list[OperadElement]] = {}
    rows_by_arity: dict[int, list] = {}

    def rows_to_elements(n, rows):
        sp = backend.space(n)
        return [
            OperadElement(backend, n, {sp.basis[i]: v for i, v in row.items()})
            for row in rows
        ]

    lowest = min(generators_by_arity)
    for n in range(lowest, max_arity + 1):
        cand = []
        from itertools import permutations as _perms

        explicit = generators_by_arity.get(n, [])
        for g in explicit:
            for images in _perms(range(1, n + 1)):
                cand.append(g.act(Permutation(images)))
        prev = basis_elements.get(n - 1, [])
        gen2 = [element(backend, 2, name) for name in backend.space(2).basis]
        for e in prev:
            for g in gen2:
                for S in combinations(range(1, n + 1), 2):
                    cand.append(e.compose_S(S, g))
                for S in combinations(range(1, n + 1), n - 1):
                    cand.append(g.compose_S(S, e))
        rows = row_space_echelon([c.vector() for c in cand if not c.is_zero()])
        rows_by_arity[n] = rows
        basis_elements[n] = rows_to_elements(n, rows)
    return rows_by_arity


# ---------------------------------------------------------------------------
# Ideals and quotients of the presented Poisson operad
# ---------------------------------------------------------------------------


@dataclass
class OperadIdeal:
    """Ideal in a quotient-presented operad, stored as saturated row spaces."""

    ambient: object
    generators: list
    max_arity: int
    components: dict

    def component_rank(self, n: int) -> int:
        return len(self.components.get(n, []))


class PresentedPoissonBackend:
    """Backend protocol wrapper for the quotient-presented Poisson operad."""

    def __init__(self, operad, max_arity):
        self.operad = operad
        self.max_arity = max_arity

    def space(self, n):
        return self.operad.space(n)

    def compose_basis(self, k, a, S, m, b):
        return self.operad.compose_basis(k, a, S, m, b)

    def act(self, n, sigma):
        return self.operad.act(n, sigma)


def poisson_backend(max_arity: int, unital=False) -> PresentedPoissonBackend:
    from .presented import poisson_operad

    return PresentedPoissonBackend(poisson_operad(max_arity, unital), max_arity)


def operad_ideal(backend, generators: list, max_arity: int) -> OperadIdeal:
    by_arity: dict[int, list] = {}
    for g in generators:
        by_arity.setdefault(g.arity, []).append(g)
    components = saturate_ideal(backend, by_arity, max_arity)
    return OperadIdeal(backend, generators, max_arity, components)


def ideal_component(ideal: OperadIdeal, n: int):
    """Echelon row basis of the ideal's arity-n subspace."""
    return ideal.components.get(n, [])


def h0_quotient_dims(backend, ideal: OperadIdeal, n_max: int) -> dict[int, int]:
    """dim(quotient)(n) = dim ambient(n) - rank ideal(n)."""
    return {
        n: backend.space(n).dim - ideal.component_rank(n) for n in range(1, n_max + 1)
    }


def bracket_power_operation(m: int, backend) -> OperadElement:
    """(…(μ_{m+1} ∘_{m+1} l) … ∘_1 l) in arity 2m+2 (no symmetrization)."""
    n = 2 * m + 2
    if backend.max_arity < n:
        raise TruncationError(f"need truncation >= {n}")
    l = element(backend, 2, "[1,2]")
    if m == 0:
        return l
    mu = element(backend, 2, "1·2")
    prod = mu
    for _ in range(m - 1):
        prod = prod.compose_at(1, mu)
    out = prod
    for slot in range(m + 1, 0, -1):
        out = out.compose_at(slot, l)
    return out


def antisymmetrized_bracket_power(m: int, backend) -> OperadElement:
    """Signed symmetrization of the bracket power, arity 2m+2.

    No factorial normalization: exact scalars keep the span unchanged.
    """
    from itertools import permutations as _perms

    n = 2 * m + 2
    out = bracket_power_operation(m, backend)
    acc: dict = {}
    for images in _perms(range(1, n + 1)):
        sigma = Permutation(images)
        img = out.act(sigma)
        s = sigma.sign()
        for name, c in img.coeffs.items():
            _accum(acc, name, s * c)
    return OperadElement(backend, n, acc)
