"""The cooperad zoo: explicit bases, decompositions, Hopf products.

Every cooperad here is the arity-wise dual of an explicitly presented
operad: the infinitesimal decomposition is the transpose of partial
composition, so equivariance and coassociativity are inherited from the
operad axioms.  Suspension is a decoration of the transposed data:

* degrees shift by the suspension amount;
* the symmetric actions of odd suspensions twist by the sign character;
* each 2-level term (outer, S, inner) picks up the unshuffle parity
  ``eta(n, S)`` per odd suspension.

A decomposition term reads: the cooperation splits as (outer cooperation
of arity k) with (inner cooperation of arity m) spanning the letter set S.
Terms with an arity-1 unit on either side are kept (flagged unital) for
the convolution product; arity-0 couplings are not materialized — the
convolution layer rejects elements with arity-0 support instead (ledger).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .linalg import GradedBasisSpace, SparseMap
from .symseq import Permutation, sequence_sign
from .presented import PoissonWordOperad, monomial_name, poisson_operad

Q = Fraction


def block_shuffle(n: int, S: tuple[int, ...]) -> Permutation:
    """The shuffle sending positions 1..m to S and the rest to the
    complement, both in increasing order.

    Decomposition terms are stored in slot-1 form: the inner cooperation
    occupies the first slot of the outer one, and this shuffle relabels
    the composite onto the letter set.  Its parity is the one suspension
    sign of the code base.
    """
    S = tuple(sorted(S))
    complement = [j for j in range(1, n + 1) if j not in S]
    return Permutation(S + tuple(complement))


def eta(n: int, S: tuple[int, ...]) -> int:
    """Suspension sign: the parity of the block shuffle."""
    return block_shuffle(n, S).sign()


@dataclass(frozen=True)
class CoopTerm:
    """One summand of the infinitesimal decomposition, in slot-1 form.

    The term pairs with maps f, g as  act(σ_S)( f(outer) ∘₁ g(inner) ),
    where σ_S is the block shuffle of the letter set S.  Keeping the
    inner cooperation in the first slot and relabeling the composite is
    what makes the symmetric actions, the suspension signs and the
    worked-example superscripts agree.
    """

    k: int
    outer: str
    S: tuple[int, ...]
    m: int
    inner: str
    coeff: Fraction

    @property
    def unital(self) -> bool:
        return self.k == 1 or self.m == 1

    def shuffle(self, n: int) -> Permutation:
        return block_shuffle(n, self.S)


class Predual:
    """Adapter interface the transpose construction consumes.

    Implementations provide: names(n), degree(n, name), blocks(n, name),
    compose_basis(k, a, slot1, m, b), act(n, sigma).
    """


class WordPredual(Predual):
    """Predual backed by the partition/word engine, optionally restricted
    to an action- and composition-stable sub-basis."""

    def __init__(self, operad: PoissonWordOperad, sub_basis):
        self.operad = operad
        self._sub = sub_basis
        self._names: dict[int, tuple[str, ...]] = {}

    def names(self, n: int):
        hit = self._names.get(n)
        if hit is None:
            hit = tuple(monomial_name(m) for m in self._sub(self.operad, n))
            self._names[n] = hit
        return hit

    def degree(self, n: int, name: str) -> int:
        return self.operad.monomial_degree(self.operad._by_name(n)[name])

    def blocks(self, n: int, name: str) -> int:
        return len(self.operad._by_name(n)[name])

    def compose_basis(self, k, a, S, m, b):
        return self.operad.compose_basis(k, a, S, m, b)

    def act(self, n, sigma):
        return self.operad.act(n, sigma)


class BackendPredual(Predual):
    """Predual backed by any operad backend exposing space/compose/act."""

    def __init__(self, backend):
        self.backend = backend

    def names(self, n: int):
        return self.backend.space(n).basis

    def degree(self, n: int, name: str) -> int:
        return self.backend.space(n).degree[name]

    def blocks(self, n: int, name: str) -> int:
        return self.backend.space(n).weight[name]

    def compose_basis(self, k, a, S, m, b):
        return self.backend.compose_basis(k, a, S, m, b)

    def act(self, n, sigma):
        return self.backend.act(n, sigma)


class CooperadData:
    """Finite based cooperad data with optional Hopf product and curving."""

    def __init__(
        self,
        name: str,
        predual: Predual,
        max_arity: int,
        *,
        degree_shift_per_arity,
        odd_suspensions: int,
        weight_fn,
        has_arity_zero: bool = False,
        hopf: bool = False,
        interchange: bool = False,
    ):
        self.name = name
        self.pred = predual
        self.max_arity = max_arity
        self._degree_shift = degree_shift_per_arity
        self._odd = odd_suspensions % 2
        self._interchange = interchange
        self._weight_fn = weight_fn
        self.has_arity_zero = has_arity_zero
        self._hopf = hopf
        self._spaces: dict[int, GradedBasisSpace] = {}
        self._terms: dict[int, dict[str, tuple[CoopTerm, ...]]] = {}
        self._act_cache: dict[tuple[int, tuple[int, ...]], SparseMap] = {}

    # -- spaces ---------------------------------------------------------------

    def predual_degree(self, n: int, name: str) -> int:
        return self.pred.degree(n, name)

    def degree(self, n: int, name: str) -> int:
        return -self.predual_degree(n, name) + self._degree_shift(n)

    def blocks(self, n: int, name: str) -> int:
        if n == 0:
            return 0
        return self.pred.blocks(n, name)

    def weight(self, n: int, name: str) -> int:
        return self._weight_fn(self.blocks(n, name))

    def space(self, n: int) -> GradedBasisSpace:
        sp = self._spaces.get(n)
        if sp is None:
            names = tuple(self.pred.names(n))
            degree = {b: self.degree(n, b) for b in names}
            weight = {b: self.weight(n, b) for b in names}
            sp = GradedBasisSpace(names, degree, weight)
            self._spaces[n] = sp
        return sp

    @property
    def counit_name(self) -> str:
        return "1"  # the arity-1 letter monomial

    def counit(self, name: str) -> Fraction:
        """Counit on the arity-1 component."""
        return Q(1) if name == self.counit_name else Q(0)

    # -- decomposition ----------------------------------------------------------

    def delta1(self, n: int) -> dict[str, tuple[CoopTerm, ...]]:
        """Full infinitesimal decomposition of the arity-n component.

        Transpose of the predual composition in slot-1 form: the
        coefficient of the term (outer, S, inner) on the cooperation c is
        < c , act(σ_S)(outer^* ∘₁ inner^*) >, decorated with the block
        shuffle parity once per odd suspension.
        """
        table = self._terms.get(n)
        if table is not None:
            return table
        acc: dict[str, list[CoopTerm]] = {c: [] for c in self.pred.names(n)}
        for m in range(1, n + 1):
            k = n - m + 1
            if k < 1:
                continue
            outer_names = self.pred.names(k)
            inner_names = self.pred.names(m)
            slot1 = tuple(range(1, m + 1))
            for S in combinations(range(1, n + 1), m):
                sigma = block_shuffle(n, S)
                act = self.pred.act(n, sigma)
                e0 = eta(n, S) if self._odd else 1
                for a in outer_names:
                    for b in inner_names:
                        e = e0
                        if self._interchange:
                            # suspension marker of the outer factor passing
                            # the graded inner value
                            if (k - 1) % 2 and self.pred.degree(m, b) % 2:
                                e = -e
                        plain = self.pred.compose_basis(k, a, slot1, m, b)
                        if not plain:
                            continue
                        expansion: dict[str, Fraction] = {}
                        for mid, v in plain.items():
                            for c, w in act(mid).items():
                                cur = expansion.get(c, Q(0)) + v * w
                                if cur:
                                    expansion[c] = cur
                                elif c in expansion:
                                    del expansion[c]
                        for c, coeff in expansion.items():
                            if c in acc and coeff:
                                acc[c].append(
                                    CoopTerm(k, a, tuple(S), m, b, Q(e) * coeff)
                                )
        table = {c: tuple(terms) for c, terms in acc.items()}
        self._terms[n] = table
        return table

    def delta1_reduced(self, n: int) -> dict[str, tuple[CoopTerm, ...]]:
        full = self.delta1(n)
        return {
            c: tuple(t for t in terms if t.k >= 2 and t.m >= 2)
            for c, terms in full.items()
        }

    # -- symmetric action ---------------------------------------------------------

    def act(self, n: int, sigma: Permutation) -> SparseMap:
        """Contragredient of the predual action, sign-twisted per suspension."""
        key = (n, sigma.images)
        hit = self._act_cache.get(key)
        if hit is not None:
            return hit
        sp = self.space(n)
        keep = set(sp.basis)
        p_act = self.pred.act(n, sigma.inverse())
        entries = {}
        twist = sigma.sign() if self._odd else 1
        for (s, t), v in p_act.entries.items():
            if s in keep and t in keep:
                entries[(t, s)] = Q(twist) * v
        out = SparseMap(sp, sp, 0, entries)
        self._act_cache[key] = out
        return out

    # -- Hopf product ---------------------------------------------------------

    def hopf_product(self, n: int, name1: str, name2: str) -> dict[str, Fraction]:
        """Blockwise product: merge if nontrivial blocks are disjoint, else 0.

        Defined on the unsuspended (degree-0) forest basis, so sign-free;
        the suspended uses go through label multiplication in the brace
        layer, whose scalars are pinned by the worked examples.
        """
        if not self._hopf:
            raise ValueError(f"{self.name} carries no Hopf structure")
        by_name = self.pred.operad._by_name(n)
        m1, m2 = by_name[name1], by_name[name2]
        big1 = [w for w in m1 if len(w) > 1]
        big2 = [w for w in m2 if len(w) > 1]
        used1 = {x for w in big1 for x in w}
        used2 = {x for w in big2 for x in w}
        if used1 & used2:
            return {}
        merged = big1 + big2
        rest = [
            (x,) for x in range(1, n + 1) if x not in used1 and x not in used2
        ]
        mono = tuple(sorted(merged + rest, key=lambda w: w[0]))
        return {monomial_name(mono): Q(1)}

    def multiply_block_label(self, n: int, word: tuple[int, ...], name: str):
        """Hopf multiplication by the single-block label on letters of `word`."""
        label = tuple(
            sorted([tuple(word)] + [(x,) for x in range(1, n + 1) if x not in word])
        )
        return self.hopf_product(n, monomial_name(label), name)

    def dims(self) -> dict[int, int]:
        return {n: self.space(n).dim for n in range(1, self.max_arity + 1)}

    def to_json(self) -> dict:
        out = {"name": self.name, "max_arity": self.max_arity, "arity": {}}
        for n in range(0 if self.has_arity_zero else 1, self.max_arity + 1):
            if n == 0:
                out["arity"]["0"] = {"basis": [{"name": "1", "degree": self._degree_shift(0), "weight": 0}]}
                continue
            sp = self.space(n)
            entry = {
                "basis": [
                    {"name": b, "degree": sp.degree[b], "weight": sp.weight[b]}
                    for b in sp.basis
                ],
                "delta1": {
                    c: [
                        [t.k, t.outer, list(t.S), t.m, t.inner, str(t.coeff)]
                        for t in terms
                    ]
                    for c, terms in self.delta1(n).items()
                },
            }
            if self._hopf:
                entry["hopf"] = {
                    f"{a}*{b}": {c: str(v) for c, v in self.hopf_product(n, a, b).items()}
                    for a in sp.basis
                    for b in sp.basis
                }
            out["arity"][str(n)] = entry
        return out


# ---------------------------------------------------------------------------
# The four cooperads
# ---------------------------------------------------------------------------


def _all_monos(op, n):
    return op.basis(n)


def _singleton_monos(op, n):
    return tuple(m for m in op.basis(n) if all(len(w) == 1 for w in m))


def _single_block_monos(op, n):
    return op.lie_basis(n)


@lru_cache(maxsize=None)
def build_coComm_shifted(max_arity: int) -> CooperadData:
    """coComm{1}: one cooperation per arity, dual to iterated products."""
    return CooperadData(
        "coComm{1}",
        WordPredual(poisson_operad(max_arity), _singleton_monos),
        max_arity,
        degree_shift_per_arity=lambda n: 1 - n,
        odd_suspensions=1,
        weight_fn=lambda blocks: blocks,
    )


@lru_cache(maxsize=None)
def build_coLie_shifted(max_arity: int) -> CooperadData:
    """coLie{1}: duals of the left-normed bracket words, (n-1)! per arity."""
    return CooperadData(
        "coLie{1}",
        WordPredual(poisson_operad(max_arity), _single_block_monos),
        max_arity,
        degree_shift_per_arity=lambda n: 1 - n,
        odd_suspensions=1,
        weight_fn=lambda blocks: blocks,
    )


@lru_cache(maxsize=None)
def build_coP1_counital(max_arity: int) -> CooperadData:
    """The counital shifted Poisson cooperad with its Hopf product."""
    return CooperadData(
        "coP1cu{1}",
        WordPredual(poisson_operad(max_arity, unital=True), _all_monos),
        max_arity,
        degree_shift_per_arity=lambda n: 1 - n,
        odd_suspensions=1,
        weight_fn=lambda blocks: blocks,
        has_arity_zero=True,
        hopf=True,
    )


@lru_cache(maxsize=None)
def build_coP1(max_arity: int) -> CooperadData:
    """Non-counital variant used by the cobar construction."""
    return CooperadData(
        "coP1{1}",
        WordPredual(poisson_operad(max_arity), _all_monos),
        max_arity,
        degree_shift_per_arity=lambda n: 1 - n,
        odd_suspensions=1,
        weight_fn=lambda blocks: blocks,
    )


@lru_cache(maxsize=None)
def build_coP2(max_arity: int) -> CooperadData:
    """The Gerstenhaber-type cooperad (double-suspension degrees).

    Transpose of the odd-bracket predual (product degree 0, bracket degree
    +1, both binary generators in the trivial representation), realized as
    a quotient of the free graded operad.  Degrees are lowered by n-1; the
    symmetric actions carry no extra twist.  Generator-weight convention:
    weight = 1 - (number of blocks).
    """
    from .freeop import gerstenhaber_quotient

    return CooperadData(
        "coP2{2}",
        BackendPredual(gerstenhaber_quotient(max_arity)),
        max_arity,
        degree_shift_per_arity=lambda n: 1 - n,
        odd_suspensions=1,
        weight_fn=lambda blocks: 1 - blocks,
    )


def delta_name(n: int) -> str:
    """Name of the all-singletons cooperation (the weight-n coproduct)."""
    return monomial_name(tuple((i,) for i in range(1, n + 1)))


def cobracket_name() -> str:
    return monomial_name(((1, 2),))


# ---------------------------------------------------------------------------
# Curved basis data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurvedCooperadData:
    """Basis-level curved extension: the arity-0 cogenerator and curving.

    Only the data the quotient constructions consume is stored; no curved
    bar/cobar machinery is built on top of it.
    """

    underlying: CooperadData
    extra_arity0_name: str
    extra_arity0_degree: int
    arity1_capped_names: tuple[str, ...]
    arity1_capped_degree: int
    curving: dict[str, Fraction]

    def curving_of(self, name: str) -> Fraction:
        return self.curving.get(name, Q(0))


def build_coLie_curved(max_arity: int) -> CurvedCooperadData:
    """Curved extension of coLie{1}: co-unit cogenerator capping one slot."""
    base = build_coLie_shifted(max_arity)
    capped = "cap([1,2];2)"
    return CurvedCooperadData(
        underlying=base,
        extra_arity0_name="cap",
        extra_arity0_degree=-1,
        arity1_capped_names=(capped,),
        arity1_capped_degree=-2,
        curving={capped: Q(-1)},
    )


def build_coP1_curved(max_arity: int) -> CurvedCooperadData:
    """Curved extension of the shifted Poisson cooperad; same curving."""
    base = build_coP1(max_arity)
    capped = "cap([1,2];2)"
    return CurvedCooperadData(
        underlying=base,
        extra_arity0_name="cap",
        extra_arity0_degree=-1,
        arity1_capped_names=(capped,),
        arity1_capped_degree=-2,
        curving={capped: Q(-1)},
    )
