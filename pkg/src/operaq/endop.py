"""Endomorphism operads of finite based complexes.

``EndOperad(A, max_arity)`` materializes O(n) = Hom(A⊗…⊗A, A) as based
spaces of matrix units; insertion composition and the symmetric-group
action carry the Koszul signs forced by the degrees of A.  This module is
the mechanical source of truth for suspension-style signs: the composite
of two matrix units is computed by threading arguments past graded slots,
never by a hand-chosen sign table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .linalg import ChainComplex, GradedBasisSpace, SparseMap
from .symseq import Permutation

Q = Fraction


def koszul_reorder_sign(degrees: list[int], order: list[int]) -> int:
    """Sign of rearranging graded factors into ``order`` (list of indices).

    ``degrees[i]`` is the degree of factor i; the rearranged sequence is
    (factor order[0], factor order[1], …).  Each transposition of two odd
    factors contributes -1.
    """
    sign = 1
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b] and degrees[order[a]] % 2 and degrees[order[b]] % 2:
                sign = -sign
    return sign


def slot_order(n: int, S: tuple[int, ...]) -> tuple[list[int], int]:
    """Letters 1..n arranged slot-by-slot for an inner block on S.

    The outer operation's slots are ordered by their minimal letter; the
    block slot carries the letters of S in increasing order.  Returns the
    flattened letter list and the (0-based) rank of the block slot.
    """
    S = tuple(sorted(S))
    complement = [j for j in range(1, n + 1) if j not in S]
    items = [(c, (c,)) for c in complement] + [(S[0], S)]
    items.sort()
    flat: list[int] = []
    rank = 0
    for pos, (_, letters) in enumerate(items):
        if letters == S and len(letters) == len(S):
            rank = pos
        flat.extend(letters)
    return flat, rank


@dataclass(frozen=True)
class _Unit:
    """Matrix unit e_{inputs -> output} of Hom(A^{⊗n}, A)."""

    inputs: tuple[str, ...]
    output: str

    def name(self) -> str:
        return f"[{','.join(self.inputs)}->{self.output}]"


class EndOperad:
    """Truncated endomorphism operad of a finite complex.

    Elements of arity n are dicts {matrix unit name: Fraction}.  The
    designated commutative product, when supplied, is checked to be
    graded-commutative and associative; it backs the Maurer-Cartan twist.
    """

    def __init__(self, A: ChainComplex, max_arity: int, product=None):
        self.A = A
        self.max_arity = max_arity
        self._unit_by_name: dict[int, dict[str, _Unit]] = {}
        self.product = None
        if product is not None:
            self.product = {k: Q(v) for k, v in product.items() if v}
            self._check_product()

    # -- spaces -------------------------------------------------------------

    def units(self, n: int):
        table = self._unit_by_name.get(n)
        if table is None:
            deg = self.A.space.degree
            table = {}
            for inputs in product(self.A.space.basis, repeat=n):
                for out in self.A.space.basis:
                    u = _Unit(tuple(inputs), out)
                    table[u.name()] = u
            self._unit_by_name[n] = table
        return table

    def space(self, n: int) -> GradedBasisSpace:
        deg = self.A.space.degree
        table = self.units(n)
        names = tuple(sorted(table))
        degree = {
            name: deg[u.output] - sum(deg[i] for i in u.inputs)
            for name, u in table.items()
        }
        return GradedBasisSpace(names, degree)

    def degree_of(self, n: int, name: str) -> int:
        u = self.units(n)[name]
        deg = self.A.space.degree
        return deg[u.output] - sum(deg[i] for i in u.inputs)

    def identity_element(self) -> dict[str, Fraction]:
        return {_Unit((b,), b).name(): Q(1) for b in self.A.space.basis}

    # -- structure ----------------------------------------------------------

    def compose_basis(self, k, name_a, S, m, name_b) -> dict[str, Fraction]:
        """Insertion a∘_S b of matrix units; returns a sparse element."""
        a = self.units(k)[name_a]
        b = self.units(m)[name_b]
        S = tuple(sorted(S))
        n = k + m - 1
        flat, rank = slot_order(n, S)
        deg = self.A.space.degree
        if a.inputs[rank] != b.output:
            return {}
        # input tuple of the composite, natural order
        x = [None] * n
        for j, letter in zip(range(m), S):
            x[letter - 1] = b.inputs[j]
        pos = 0
        for slot in range(k):
            if slot == rank:
                continue
            letter = None
            # complement letters in slot order are flat entries outside S
            while flat[pos] in S:
                pos += 1
            x[flat[pos] - 1] = a.inputs[slot]
            pos += 1
        degrees = [deg[name] for name in x]
        order = [letter - 1 for letter in flat]
        sign = koszul_reorder_sign(degrees, order)
        # move b (degree |b|) past the slots before the block
        deg_b = deg[b.output] - sum(deg[i] for i in b.inputs)
        if deg_b % 2:
            before = sum(deg[a.inputs[s]] for s in range(rank))
            if before % 2:
                sign = -sign
        unit = _Unit(tuple(x), a.output)
        return {unit.name(): Q(sign)}

    def compose_at(self, k, name_a, i: int, m, name_b) -> dict[str, Fraction]:
        """Plain ∘_i: the inner block occupies consecutive letters i..i+m-1."""
        S = tuple(range(i, i + m))
        return self.compose_basis(k, name_a, S, m, name_b)

    def act(self, n: int, sigma: Permutation) -> SparseMap:
        """Letter relabeling j -> σ(j) with Koszul signs."""
        sp = self.space(n)
        deg = self.A.space.degree
        entries = {}
        inv = sigma.inverse()
        for name, u in self.units(n).items():
            # relabeled unit: input slot j of the result reads x_j with
            # (x_{σ(1)},…,x_{σ(n)}) = u.inputs
            new_inputs = tuple(u.inputs[inv(j) - 1] for j in range(1, n + 1))
            degrees = [deg[i] for i in new_inputs]
            order = [sigma(j) - 1 for j in range(1, n + 1)]
            sign = koszul_reorder_sign(degrees, order)
            t = _Unit(new_inputs, u.output)
            entries[(name, t.name())] = Q(sign)
        return SparseMap(sp, sp, 0, entries)

    # -- designated product ---------------------------------------------------

    def _check_product(self):
        mu = self.product
        two = self.space(2)
        for name in mu:
            if name not in two.basis:
                raise ValueError(f"product entry {name} is not a binary unit")
        # graded commutativity: act(21)·mu = mu
        swap = self.act(2, Permutation((2, 1)))
        swapped: dict[str, Fraction] = {}
        for name, c in mu.items():
            for t, v in swap(name).items():
                swapped[t] = swapped.get(t, Q(0)) + c * v
        if {k: v for k, v in swapped.items() if v} != mu:
            raise ValueError("designated product is not graded-commutative")
        left = self._compose_elements(2, mu, (1, 2), 2, mu)
        right = self._compose_elements(2, mu, (2, 3), 2, mu)
        if left != right:
            raise ValueError("designated product is not associative")

    def _compose_elements(self, k, ea, S, m, eb) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for na, ca in ea.items():
            for nb, cb in eb.items():
                for t, v in self.compose_basis(k, na, S, m, nb).items():
                    w = out.get(t, Q(0)) + ca * cb * v
                    if w:
                        out[t] = w
                    elif t in out:
                        del out[t]
        return out


def end_of_point() -> EndOperad:
    """End of the ground field in degree 0, with its multiplication."""
    sp = GradedBasisSpace(("e",), {"e": 0})
    A = ChainComplex(sp, SparseMap(sp, sp, 1, {}))
    return EndOperad(A, 6, product={_Unit(("e", "e"), "e").name(): Q(1)})


@lru_cache(maxsize=None)
def _odd_line() -> EndOperad:
    sp = GradedBasisSpace(("u",), {"u": 1})
    A = ChainComplex(sp, SparseMap(sp, sp, 1, {}))
    return EndOperad(A, 9)


def odd_suspension_sign(n: int, S: tuple[int, ...]) -> int:
    """Sign of λ_k ∘_S λ_m inside End(k[-1]), fully mechanical."""
    end = _odd_line()
    m = len(S)
    k = n - m + 1
    lam_k = _Unit(("u",) * k, "u").name()
    lam_m = _Unit(("u",) * m, "u").name()
    out = end.compose_basis(k, lam_k, tuple(S), m, lam_m)
    (coeff,) = out.values()
    return int(coeff)
