"""Permutations, shuffles and symmetric sequences of complexes.

Conventions (used everywhere downstream):

* a permutation is its one-line tuple ``(σ(1),…,σ(n))``;
* ``action(σ)`` relabels letter ``j`` to ``σ(j)``; it is a left action,
  so ``action(σ)∘action(τ) = action(στ)``;
* the superscript of the worked examples is ``p^σ = action(σ⁻¹)(p)``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .linalg import ChainComplex, GradedBasisSpace, SparseMap, compose

Q = Fraction


@dataclass(frozen=True)
class Permutation:
    """One-line notation: images = (σ(1), …, σ(n))."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.images}")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, j: int) -> int:
        return self.images[j - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """(self∘other)(j) = self(other(j))."""
        return Permutation(tuple(self(other(j)) for j in range(1, self.n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for j, i in enumerate(self.images, start=1):
            inv[i - 1] = j
        return Permutation(tuple(inv))

    def sign(self) -> int:
        return perm_sign(self)

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(1, n + 1)))

    @staticmethod
    def transposition(n: int, i: int) -> "Permutation":
        """Adjacent transposition swapping i and i+1 inside S_n."""
        img = list(range(1, n + 1))
        img[i - 1], img[i] = img[i], img[i - 1]
        return Permutation(tuple(img))


def perm_sign(p: Permutation | tuple[int, ...]) -> int:
    """Parity of a permutation in one-line notation."""
    images = p.images if isinstance(p, Permutation) else p
    seen = [False] * len(images)
    sign = 1
    for start in range(len(images)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = images[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def sequence_sign(seq) -> int:
    """Parity of the permutation sorting ``seq`` (distinct integers)."""
    order = sorted(range(len(seq)), key=lambda i: seq[i])
    return perm_sign(tuple(i + 1 for i in order))


@dataclass(frozen=True)
class Shuffle:
    """(i,j)-shuffle: increasing on the first i and the last j positions."""

    underlying: Permutation
    split: tuple[int, int]

    def __post_init__(self):
        i, j = self.split
        im = self.underlying.images
        if len(im) != i + j:
            raise ValueError("split does not match permutation size")
        if any(im[k] > im[k + 1] for k in range(i - 1)) or any(
            im[k] > im[k + 1] for k in range(i, i + j - 1)
        ):
            raise ValueError(f"{im} is not an ({i},{j})-shuffle")


def shuffles(i: int, j: int) -> list[Shuffle]:
    """All C(i+j, i) shuffles, lexicographically ordered by one-line tuple."""
    if i < 0 or j < 0:
        raise ValueError("shuffle parts must be nonnegative")
    n = i + j
    out = []
    for first in combinations(range(1, n + 1), i):
        rest = tuple(v for v in range(1, n + 1) if v not in first)
        out.append(Shuffle(Permutation(first + rest), (i, j)))
    out.sort(key=lambda s: s.underlying.images)
    return out


# ---------------------------------------------------------------------------
# Symmetric sequences
# ---------------------------------------------------------------------------


class SymmetricSequence:
    """Arity-indexed complexes with S_n-actions stored on adjacent flips.

    ``generators[n][i]`` is the action of the transposition (i,i+1); the
    action of an arbitrary permutation is assembled lazily and cached.
    Caches are guarded by a lock so shared instances are safe to read
    concurrently.
    """

    def __init__(
        self,
        components: dict[int, ChainComplex],
        generators: dict[int, dict[int, SparseMap]],
    ):
        self.components = dict(components)
        self._generators = {n: dict(g) for n, g in generators.items()}
        self._cache: dict[tuple[int, tuple[int, ...]], SparseMap] = {}
        self._lock = threading.Lock()

    def arities(self) -> list[int]:
        return sorted(self.components)

    def component(self, n: int) -> ChainComplex:
        return self.components[n]

    def space(self, n: int) -> GradedBasisSpace:
        return self.components[n].space

    def action(self, n: int, sigma: Permutation) -> SparseMap:
        if sigma.n != n:
            raise ValueError("permutation size does not match arity")
        key = (n, sigma.images)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        result = self._assemble(n, sigma)
        with self._lock:
            self._cache.setdefault(key, result)
        return result

    def _assemble(self, n: int, sigma: Permutation) -> SparseMap:
        sp = self.space(n)
        if sigma.images == tuple(range(1, n + 1)):
            return SparseMap.identity(sp)
        # bubble-sort decomposition into adjacent transpositions
        img = list(sigma.images)
        word = []
        for top in range(n, 0, -1):
            pos = img.index(top)
            for k in range(pos, top - 1):
                word.append(k + 1)
                img[k], img[k + 1] = img[k + 1], img[k]
        # sigma = product of flips in reverse application order
        result = SparseMap.identity(sp)
        for i in reversed(word):
            result = compose(result, self._generators[n][i])
        return result

    def check_group_laws(self, n: int) -> bool:
        """action(s_i)² = id and the braid/commutation relations at arity n."""
        gens = self._generators.get(n, {})
        ident = SparseMap.identity(self.space(n))
        for i, g in gens.items():
            if compose(g, g).add(ident.scale(-1)).entries:
                return False
        for i in gens:
            for j in gens:
                gi, gj = gens[i], gens[j]
                if abs(i - j) >= 2:
                    lhs = compose(gi, gj)
                    rhs = compose(gj, gi)
                elif abs(i - j) == 1:
                    lhs = compose(gi, compose(gj, gi))
                    rhs = compose(gj, compose(gi, gj))
                else:
                    continue
                if lhs.add(rhs.scale(-1)).entries:
                    return False
        return True

    def check_action_commutes_with_d(self, n: int) -> bool:
        d = self.components[n].d
        for g in self._generators.get(n, {}).values():
            if compose(d, g).add(compose(g, d).scale(-1)).entries:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "components": {str(n): c.to_json() for n, c in self.components.items()},
            "generator_actions": {
                str(n): {str(i): g.to_json() for i, g in gens.items()}
                for n, gens in self._generators.items()
            },
        }

    @staticmethod
    def from_json(data: dict) -> "SymmetricSequence":
        comps = {
            int(n): ChainComplex.from_json(c) for n, c in data["components"].items()
        }
        gens = {
            int(n): {int(i): SparseMap.from_json(g) for i, g in entry.items()}
            for n, entry in data["generator_actions"].items()
        }
        return SymmetricSequence(comps, gens)


def _zero_complex(sp: GradedBasisSpace) -> ChainComplex:
    return ChainComplex(sp, SparseMap(sp, sp, 1, {}))


def shift(M: SymmetricSequence, n: int) -> SymmetricSequence:
    """[n]: every component degree lowered by n, actions unchanged."""
    comps = {}
    gens = {}
    for m, c in M.components.items():
        sp = GradedBasisSpace(
            c.space.basis,
            {b: c.space.degree[b] - n for b in c.space.basis},
            c.space.weight,
        )
        comps[m] = ChainComplex(sp, SparseMap(sp, sp, 1, dict(c.d.entries)))
        gens[m] = {
            i: SparseMap(sp, sp, 0, dict(g.entries))
            for i, g in M._generators.get(m, {}).items()
        }
    return SymmetricSequence(comps, gens)


def suspend(M: SymmetricSequence, n: int) -> SymmetricSequence:
    """M{n}: arity-m component shifted down by n(m-1), action twisted by sgnⁿ."""
    comps = {}
    gens = {}
    for m, c in M.components.items():
        sp = GradedBasisSpace(
            c.space.basis,
            {b: c.space.degree[b] - n * (m - 1) for b in c.space.basis},
            c.space.weight,
        )
        comps[m] = ChainComplex(sp, SparseMap(sp, sp, 1, dict(c.d.entries)))
        twist = Q(-1) if n % 2 else Q(1)
        gens[m] = {
            i: SparseMap(sp, sp, 0, {k: twist * v for k, v in g.entries.items()})
            for i, g in M._generators.get(m, {}).items()
        }
    return SymmetricSequence(comps, gens)


def check_equivariance(
    f: dict[int, SparseMap], M: SymmetricSequence, N: SymmetricSequence
) -> bool:
    """True iff f commutes with every adjacent transposition at each arity."""
    for n, fn in f.items():
        for i in M._generators.get(n, {}):
            lhs = compose(fn, M._generators[n][i])
            rhs = compose(N._generators[n][i], fn)
            if lhs.add(rhs.scale(-1)).entries:
                return False
    return True
