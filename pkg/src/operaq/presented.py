"""Quotient-presented operads of Poisson type, by exact word rewriting.

Basis of arity n: set partitions of {1..n} carrying one bracket word per
block.  A word (a₁,…,a_b) denotes the left-normed bracket
[[…[a₁,a₂],a₃…],a_b] with a₁ the minimum of the block; blocks are sorted
by their minimum and multiplied.  This gives dim = n! for the Poisson
operad and (n-1)! for its single-block (Lie) suboperad.

``bracket_parity`` selects the engine:

* 0 — letters in degree 0, antisymmetric bracket (ordinary Poisson words);
* 1 — letters odd: the super-Poisson calculus on odd generators (graded
      commutator words inside the free associative algebra on odd
      letters), the predual used to transpose the Gerstenhaber-type
      cooperad.  A word of length b is odd iff b is; the bracket is the
      degree-0 graded commutator and the product is graded-commutative.

All rewriting rules carry the Koszul signs forced by the word parities;
the operad axioms are enforced by the test suite, not assumed.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations

from .linalg import GradedBasisSpace, SparseMap
from .symseq import Permutation
from .endop import slot_order

Q = Fraction

Word = tuple[int, ...]
Monomial = tuple[Word, ...]

SUBST = 0  # marker letter for the substitution slot (letters are >= 1)


def insertion_letter_map(k: int, S) -> dict[int, int]:
    """Slot -> letter map for inserting an |S|-ary element into an arity-k one.

    The receiving slot maps to the SUBST marker, the remaining slots take
    the complement letters in slot order (slots sorted by minimal letter).
    """
    S = tuple(sorted(S))
    n = k + len(S) - 1
    flat, rank = slot_order(n, S)
    complement = [j for j in flat if j not in S]
    slot_letter = {}
    ci = 0
    for slot in range(1, k + 1):
        if slot == rank + 1:
            slot_letter[slot] = SUBST
        else:
            slot_letter[slot] = complement[ci]
            ci += 1
    return slot_letter


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def monomial_name(mono: Monomial) -> str:
    def word_name(w: Word) -> str:
        if len(w) == 1:
            return str(w[0])
        return "[" + ",".join(map(str, w)) + "]"

    if not mono:
        return "1"
    return "·".join(word_name(w) for w in mono)


class PoissonWordOperad:
    """Engine for the partition/bracket-word operads (see module docstring)."""

    def __init__(self, bracket_parity: int, max_arity: int, unital: bool = False):
        if bracket_parity not in (0, 1):
            raise ValueError("bracket_parity must be 0 or 1")
        self.parity = bracket_parity
        self.max_arity = max_arity
        self.unital = unital
        self._compose_cache: dict = {}
        self._pair_cache: dict = {}

    # -- bases ---------------------------------------------------------------

    def word_degree(self, w: Word) -> int:
        """Sign-relevant parity of a word: odd-letter words have parity
        len(w); the even engine is concentrated in degree 0."""
        return self.parity * len(w)

    def monomial_degree(self, mono: Monomial) -> int:
        return sum(self.word_degree(w) for w in mono)

    @lru_cache(maxsize=None)
    def basis(self, n: int) -> tuple[Monomial, ...]:
        if n == 0:
            return ((),) if self.unital else ()
        out = []
        for part in set_partitions(range(1, n + 1)):
            blocks = [sorted(b) for b in part]
            per_block = []
            for b in blocks:
                per_block.append(
                    [tuple([b[0], *rest]) for rest in permutations(b[1:])]
                )

            def rec(i, acc):
                if i == len(per_block):
                    out.append(tuple(sorted(acc, key=lambda w: w[0])))
                    return
                for w in per_block[i]:
                    rec(i + 1, acc + [w])

            rec(0, [])
        out.sort()
        return tuple(out)

    @lru_cache(maxsize=None)
    def lie_basis(self, n: int) -> tuple[Monomial, ...]:
        return tuple(m for m in self.basis(n) if len(m) == 1)

    @lru_cache(maxsize=None)
    def space(self, n: int) -> GradedBasisSpace:
        names, degree, weight = [], {}, {}
        for mono in self.basis(n):
            name = monomial_name(mono)
            names.append(name)
            degree[name] = self.monomial_degree(mono)
            weight[name] = len(mono)
        return GradedBasisSpace(tuple(names), degree, weight)

    @lru_cache(maxsize=None)
    def _by_name(self, n: int) -> dict[str, Monomial]:
        return {monomial_name(m): m for m in self.basis(n)}

    # -- rewriting -----------------------------------------------------------

    def _flip(self, u: Word, v: Word):
        """[u,v] -> sign·[v,u]: graded commutator antisymmetry."""
        if self.parity == 0:
            return -1
        # [a,b] = -(-1)^{|a||b|}[b,a]
        return 1 if (self.word_degree(u) % 2 and self.word_degree(v) % 2) else -1

    def reduce_pair(self, u: Word, v: Word) -> dict[Word, int]:
        """Expand the bracket of two basis words into basis words."""
        key = (u, v)
        hit = self._pair_cache.get(key)
        if hit is not None:
            return hit
        out: dict[Word, int] = {}

        def add(w: Word, c: int):
            acc = out.get(w, 0) + c
            if acc:
                out[w] = acc
            elif w in out:
                del out[w]

        if u[0] > v[0]:
            # flip so the smaller leading letter (the global minimum of the
            # letter set, since basis words lead with their minimum) is left
            s = self._flip(u, v)
            for w, c in self.reduce_pair(v, u).items():
                add(w, s * c)
        elif len(v) == 1:
            add(u + v, 1)  # left-normed append, leading letter stays minimal
        else:
            # graded Jacobi: [u,[v',t]] = [[u,v'],t] - (-1)^{|v'||t|} [[u,t],v']
            vp, t = v[:-1], (v[-1],)
            s = -1
            if self.parity and self.word_degree(vp) % 2 and self.word_degree(t) % 2:
                s = 1
            for w1, c1 in self.reduce_pair(u, vp).items():
                for w2, c2 in self.reduce_pair(w1, t).items():
                    add(w2, c1 * c2)
            for w1, c1 in self.reduce_pair(u, t).items():
                for w2, c2 in self.reduce_pair(w1, vp).items():
                    add(w2, s * c1 * c2)
        self._pair_cache[key] = out
        return out

    def bracket_factors(self, F: tuple[Word, ...], G: tuple[Word, ...]):
        """[F,G] for ordered factor tuples; list of (sign, ordered factors)."""
        if not F or not G:
            return []  # bracket with the algebra unit vanishes
        if len(F) == 1 and len(G) == 1:
            return [(c, (w,)) for w, c in self.reduce_pair(F[0], G[0]).items()]
        out = []
        if len(F) > 1:
            # degree-0 graded Leibniz: [A·F', G] = (-1)^{|F'||G|}[A,G]·F' + A·[F',G]
            A, Fp = F[0], F[1:]
            degFp = sum(self.word_degree(w) for w in Fp)
            degG = sum(self.word_degree(w) for w in G)
            s1 = -1 if (degFp % 2 and degG % 2) else 1
            for c, fact in self.bracket_factors((A,), G):
                out.append((s1 * c, fact + Fp))
            for c, fact in self.bracket_factors(Fp, G):
                out.append((c, (A,) + fact))
            return out
        # [F, B·G'] = [F,B]·G' + (-1)^{|F||B|} B·[F,G']
        B, Gp = G[0], G[1:]
        degF = sum(self.word_degree(w) for w in F)
        degB = self.word_degree(B)
        for c, fact in self.bracket_factors(F, (B,)):
            out.append((c, fact + Gp))
        s2 = -1 if (degF % 2 and degB % 2) else 1
        for c, fact in self.bracket_factors(F, Gp):
            out.append((s2 * c, (B,) + fact))
        return out

    def sort_factors(self, factors: tuple[Word, ...]):
        """Koszul bubble sort of factors by leading letter."""
        fs = list(factors)
        sign = 1
        for i in range(len(fs)):
            for j in range(len(fs) - 1 - i):
                if fs[j][0] > fs[j + 1][0]:
                    if self.word_degree(fs[j]) % 2 and self.word_degree(fs[j + 1]) % 2:
                        sign = -sign
                    fs[j], fs[j + 1] = fs[j + 1], fs[j]
        return sign, tuple(fs)

    # -- operad structure ------------------------------------------------------

    def compose_basis(self, k, name_a, S, m, name_b) -> dict[str, Fraction]:
        """a∘_S b: plug b (letters -> S) into a (letters -> complement + slot)."""
        S = tuple(sorted(S))
        key = (k, name_a, S, m, name_b)
        hit = self._compose_cache.get(key)
        if hit is not None:
            return hit
        if m == 0:
            raise ValueError("use compose_unit_at for arity-0 insertions")
        a = self._by_name(k)[name_a]
        b = self._by_name(m)[name_b]
        slot_letter = insertion_letter_map(k, S)
        b_rel = tuple(tuple(S[j - 1] for j in w) for w in b)
        out: dict[str, Fraction] = {}
        for sign, factors in self._substitute(a, slot_letter, b_rel):
            s2, sorted_f = self.sort_factors(factors)
            name = monomial_name(sorted_f)
            c = out.get(name, Q(0)) + sign * s2
            if c:
                out[name] = c
            elif name in out:
                del out[name]
        self._compose_cache[key] = out
        return out

    def _substitute(self, a: Monomial, slot_letter, b_factors):
        """All expansions of a with SUBST replaced by the factors of b."""
        results = [(1, ())]
        for w in a:
            relabeled = tuple(slot_letter[x] for x in w)
            if SUBST not in relabeled:
                results = [(s, fact + (relabeled,)) for s, fact in results]
                continue
            expanded = self._expand_word(relabeled, b_factors)
            results = [
                (s * s2, fact + fact2)
                for s, fact in results
                for s2, fact2 in expanded
            ]
        return results

    def _expand_word(self, w: Word, b_factors):
        """Left-normed word with one SUBST letter, expanded into factors."""
        if len(w) == 1:
            return [(1, b_factors)]
        terms = [(1, ((w[0],),) if w[0] != SUBST else b_factors)]
        for letter in w[1:]:
            arg = ((letter,),) if letter != SUBST else b_factors
            new_terms = []
            for s, fact in terms:
                for c, fact2 in self.bracket_factors(fact, arg):
                    new_terms.append((s * c, fact2))
            terms = new_terms
        return terms

    def compose_unit_at(self, k, name_a, slot: int) -> dict[str, Fraction]:
        """Plug the algebra unit (arity 0) into one slot; unital engine only."""
        if not self.unital:
            raise ValueError("unit insertion requires the unital engine")
        a = self._by_name(k)[name_a]
        out: dict[str, Fraction] = {}
        new = []
        for w in a:
            if slot not in w:
                new.append(w)
            elif len(w) == 1:
                continue  # unit factor drops out of the product
            else:
                return {}  # bracket with the unit vanishes
        relabel = {x: x - (1 if x > slot else 0) for w in new for x in w}
        mono = tuple(sorted((tuple(relabel[x] for x in w) for w in new), key=lambda w: w[0] if w else 0))
        out[monomial_name(mono)] = Q(1)
        return out

    def act(self, n: int, sigma: Permutation) -> SparseMap:
        """Letter relabeling j -> σ(j), renormalized; contains all signs."""
        sp = self.space(n)
        entries = {}
        for mono in self.basis(n):
            src = monomial_name(mono)
            results = [(1, ())]
            for w in mono:
                rel = tuple(sigma(x) for x in w)
                expand = self._normalize_word(rel)
                results = [
                    (s * c, fact + (w2,))
                    for s, fact in results
                    for w2, c in expand.items()
                ]
            for s, fact in results:
                s2, sorted_f = self.sort_factors(fact)
                tgt = monomial_name(sorted_f)
                key = (src, tgt)
                c = entries.get(key, Q(0)) + s * s2
                if c:
                    entries[key] = c
                elif key in entries:
                    del entries[key]
        return SparseMap(sp, sp, 0, entries)

    def _normalize_word(self, w: Word) -> dict[Word, int]:
        """Rewrite a relabeled left-normed word into the basis."""
        if len(w) == 1:
            return {w: 1}
        acc = {(w[0],): 1}
        for letter in w[1:]:
            new: dict[Word, int] = {}
            for word, c in acc.items():
                for w2, c2 in self.reduce_pair(word, (letter,)).items():
                    v = new.get(w2, 0) + c * c2
                    if v:
                        new[w2] = v
                    elif w2 in new:
                        del new[w2]
            acc = new
        return acc


@lru_cache(maxsize=None)
def poisson_operad(max_arity: int, unital: bool = False) -> PoissonWordOperad:
    """The Poisson operad (degree-0 bracket) up to the given arity."""
    return PoissonWordOperad(0, max_arity, unital=unital)


@lru_cache(maxsize=None)
def gerstenhaber_predual(max_arity: int) -> PoissonWordOperad:
    """Poisson-type words with a degree +1 bracket (cooperad predual)."""
    return PoissonWordOperad(1, max_arity)


def poisson_dims_formula(n: int) -> int:
    """dim of the Poisson arity-n component by the partition/word count."""
    total = 0
    for part in set_partitions(range(1, n + 1)):
        prod = 1
        for b in part:
            for i in range(1, len(b)):
                prod *= i
        total += prod
    return total


def lie_dim_formula(n: int) -> int:
    out = 1
    for i in range(1, n):
        out *= i
    return out
