"""Exact based graded vector spaces, sparse maps and chain complexes over Q.

Everything here is exact: scalars are ``fractions.Fraction``, gradings are
cohomological (differentials have degree +1) and homological data is stored
with negated degrees.  Koszul signs live in :func:`tensor_map`; no other
layer is allowed to invent signs for swapping graded factors.

The elimination kernel is selected at import: the compiled extension
``operaq._elim_cy`` when available, else the pure-Python ``operaq._elim_py``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

try:  # compiled kernel is optional
    from . import _elim_cy as _elim

    KERNEL = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _elim_py as _elim

    KERNEL = "python"

from . import _elim_py

Q = Fraction


class IncompatibleSpaces(ValueError):
    """Raised when composing or comparing maps over mismatched spaces."""


class NotAComplex(ValueError):
    """Raised when a differential does not square to zero."""


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


def format_rational(x: Fraction) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedBasisSpace:
    """A finite based graded space: ordered basis names with degrees.

    ``weight`` is an optional auxiliary grading (used for the operadic
    weight bookkeeping); it plays no role in signs.
    """

    basis: tuple[str, ...]
    degree: dict[str, int]
    weight: dict[str, int] | None = None

    def __post_init__(self):
        if len(set(self.basis)) != len(self.basis):
            raise ValueError("duplicate basis names")
        missing = [b for b in self.basis if b not in self.degree]
        if missing:
            raise ValueError(f"degrees missing for {missing}")
        if self.weight is not None:
            missing = [b for b in self.basis if b not in self.weight]
            if missing:
                raise ValueError(f"weights missing for {missing}")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, name: str) -> int:
        return self.basis.index(name)

    def dims_by_degree(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b in self.basis:
            d = self.degree[b]
            out[d] = out.get(d, 0) + 1
        return out

    def to_json(self) -> dict:
        return {
            "basis": [
                {
                    "name": b,
                    "degree": self.degree[b],
                    **({"weight": self.weight[b]} if self.weight else {}),
                }
                for b in self.basis
            ]
        }

    @staticmethod
    def from_json(data: dict) -> "GradedBasisSpace":
        names = tuple(e["name"] for e in data["basis"])
        degree = {e["name"]: int(e["degree"]) for e in data["basis"]}
        weight = None
        if data["basis"] and "weight" in data["basis"][0]:
            weight = {e["name"]: int(e["weight"]) for e in data["basis"]}
        return GradedBasisSpace(names, degree, weight)


def space(named_degrees, weight=None) -> GradedBasisSpace:
    """Build a space from an iterable of (name, degree) pairs."""
    pairs = list(named_degrees)
    return GradedBasisSpace(
        tuple(n for n, _ in pairs),
        {n: d for n, d in pairs},
        dict(weight) if weight is not None else None,
    )


UNIT_SPACE = space([("1", 0)])


# ---------------------------------------------------------------------------
# Sparse maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SparseMap:
    """Degree-homogeneous linear map stored as {(src name, tgt name): Q}."""

    source: GradedBasisSpace
    target: GradedBasisSpace
    degree_shift: int
    entries: dict[tuple[str, str], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (s, t), v in self.entries.items():
            v = Fraction(v)
            if v == 0:
                continue
            if self.target.degree[t] - self.source.degree[s] != self.degree_shift:
                raise ValueError(
                    f"entry {s}->{t} violates degree shift {self.degree_shift}"
                )
            clean[(s, t)] = v
        object.__setattr__(self, "entries", clean)

    def __call__(self, name: str) -> dict[str, Fraction]:
        """Image of a basis element as a sparse column {target name: coeff}."""
        out = {}
        for (s, t), v in self.entries.items():
            if s == name:
                out[t] = v
        return out

    def apply(self, vec: dict[str, Fraction]) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for s, c in vec.items():
            for (ss, t), v in self.entries.items():
                if ss == s:
                    w = out.get(t, Q(0)) + c * v
                    if w:
                        out[t] = w
                    elif t in out:
                        del out[t]
        return out

    def add(self, other: "SparseMap") -> "SparseMap":
        if (self.source, self.target, self.degree_shift) != (
            other.source,
            other.target,
            other.degree_shift,
        ):
            raise IncompatibleSpaces("cannot add maps with different shapes")
        entries = dict(self.entries)
        for k, v in other.entries.items():
            w = entries.get(k, Q(0)) + v
            if w:
                entries[k] = w
            elif k in entries:
                del entries[k]
        return SparseMap(self.source, self.target, self.degree_shift, entries)

    def scale(self, c) -> "SparseMap":
        c = Fraction(c)
        return SparseMap(
            self.source,
            self.target,
            self.degree_shift,
            {k: c * v for k, v in self.entries.items()} if c else {},
        )

    def is_zero(self) -> bool:
        return not self.entries

    @staticmethod
    def identity(sp: GradedBasisSpace) -> "SparseMap":
        return SparseMap(sp, sp, 0, {(b, b): Q(1) for b in sp.basis})

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "degree_shift": self.degree_shift,
            "entries": [
                [s, t, format_rational(v)] for (s, t), v in sorted(self.entries.items())
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "SparseMap":
        return SparseMap(
            GradedBasisSpace.from_json(data["source"]),
            GradedBasisSpace.from_json(data["target"]),
            int(data["degree_shift"]),
            {(s, t): parse_rational(v) for s, t, v in data["entries"]},
        )


def compose(f: SparseMap, g: SparseMap) -> SparseMap:
    """Matrix composite f∘g (apply g first).

    No Koszul signs here: sign handling lives in the tensor and operadic
    layers, composition of plain linear maps is sign-free.
    """
    if g.target is not f.source and g.target != f.source:
        raise IncompatibleSpaces("compose: g.target != f.source")
    entries: dict[tuple[str, str], Fraction] = {}
    by_src: dict[str, list[tuple[str, Fraction]]] = {}
    for (s, t), v in f.entries.items():
        by_src.setdefault(s, []).append((t, v))
    for (s, m), v in g.entries.items():
        for t, w in by_src.get(m, ()):
            key = (s, t)
            acc = entries.get(key, Q(0)) + v * w
            if acc:
                entries[key] = acc
            elif key in entries:
                del entries[key]
    return SparseMap(g.source, f.target, f.degree_shift + g.degree_shift, entries)


# ---------------------------------------------------------------------------
# Rank / nullspace via the elimination kernel
# ---------------------------------------------------------------------------


def _integer_rows(rows):
    """Clear denominators row-wise; rank and row space are unchanged."""
    out = []
    for row in rows:
        if not row:
            continue
        denom = 1
        for v in row.values():
            denom = denom * v.denominator // _gcd(denom, v.denominator)
        out.append({c: int(v * denom) for c, v in row.items()})
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def rows_of_map(f: SparseMap) -> list[dict[int, Fraction]]:
    """One sparse row per source basis element (the matrix of f)."""
    idx = {b: i for i, b in enumerate(f.target.basis)}
    rows: dict[str, dict[int, Fraction]] = {b: {} for b in f.source.basis}
    for (s, t), v in f.entries.items():
        rows[s][idx[t]] = v
    return [rows[b] for b in f.source.basis]


def sparse_rank(rows) -> int:
    """Exact rank of sparse rational rows (dicts {col: Fraction|int})."""
    return _elim.rank(_integer_rows(_as_fraction_rows(rows)))


def _as_fraction_rows(rows):
    return [{c: Fraction(v) for c, v in row.items() if v} for row in rows]


def rank(f: SparseMap) -> int:
    """Rank over Q via fraction-free elimination."""
    return sparse_rank(rows_of_map(f))


def row_space_echelon(rows) -> list[dict[int, Fraction]]:
    """Echelon basis of the row space, as rational rows."""
    _, reduced = _elim.echelon(_integer_rows(_as_fraction_rows(rows)))
    return [{c: Fraction(v) for c, v in r.items()} for r in reduced]


def in_row_space(rows_echelon, vec) -> bool:
    """Membership of a rational vector in a row space given in echelon form."""
    rem = {c: Fraction(v) for c, v in vec.items() if v}
    piv = {min(r): r for r in rows_echelon if r}
    while rem:
        c = min(rem)
        row = piv.get(c)
        if row is None:
            return False
        factor = rem[c] / row[c]
        for col, v in row.items():
            w = rem.get(col, Q(0)) - factor * v
            if w:
                rem[col] = w
            elif col in rem:
                del rem[col]
    return True


def nullspace(rows, ncols: int) -> list[dict[int, Fraction]]:
    """Basis of {v : M v = 0} where the rows are the rows of M.

    Column-indexed sparse vectors are returned, one per free column,
    deterministically ordered.
    """
    pivots, reduced = _elim.echelon(_integer_rows(_as_fraction_rows(rows)))
    pivot_set = set(pivots)
    by_pivot = {min(r): r for r in reduced}
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v: dict[int, Fraction] = {f: Q(1)}
        for c in sorted(pivot_set, reverse=True):
            row = by_pivot[c]
            s = Q(0)
            for col, val in row.items():
                if col == c:
                    continue
                if col in v:
                    s += Fraction(val) * v[col]
            if s:
                v[c] = -s / Fraction(row[c])
        basis.append(v)
    return basis


def express_in_rows(rows, vec):
    """Coefficients writing ``vec`` as a combination of ``rows``, or None.

    Small dense-ish exact solve with Fractions; used for coordinates in
    equivariant-subspace bases, not on the hot path.
    """
    rows = _as_fraction_rows(rows)
    vec = {c: Fraction(v) for c, v in vec.items() if v}
    work = []  # (row, coeff-vector over original rows)
    for i, row in enumerate(rows):
        work.append((dict(row), {i: Q(1)}))
    # echelonize with bookkeeping
    basis = []  # (pivot, row, combo)
    for row, combo in work:
        row = dict(row)
        combo = dict(combo)
        while row:
            c = min(row)
            hit = next(((r, cb) for p, r, cb in basis if p == c), None)
            if hit is None:
                basis.append((c, row, combo))
                break
            r, cb = hit
            f = row[c] / r[c]
            for col, v in r.items():
                w = row.get(col, Q(0)) - f * v
                if w:
                    row[col] = w
                elif col in row:
                    del row[col]
            for idx, v in cb.items():
                w = combo.get(idx, Q(0)) - f * v
                if w:
                    combo[idx] = w
                elif idx in combo:
                    del combo[idx]
    target = dict(vec)
    coeffs: dict[int, Fraction] = {}
    while target:
        c = min(target)
        hit = next(((r, cb) for p, r, cb in basis if p == c), None)
        if hit is None:
            return None
        r, cb = hit
        f = target[c] / r[c]
        for col, v in r.items():
            w = target.get(col, Q(0)) - f * v
            if w:
                target[col] = w
            elif col in target:
                del target[col]
        for idx, v in cb.items():
            w = coeffs.get(idx, Q(0)) + f * v
            if w:
                coeffs[idx] = w
            elif idx in coeffs:
                del coeffs[idx]
    return [coeffs.get(i, Q(0)) for i in range(len(rows))]


def kernel_name() -> str:
    """Which elimination kernel is active ('cython' or 'python')."""
    return KERNEL


def pure_python_kernel():
    """The pure kernel module (for benchmarking against the compiled one)."""
    return _elim_py


# ---------------------------------------------------------------------------
# Chain complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainComplex:
    """A based complex with differential of cohomological degree +1."""

    space: GradedBasisSpace
    d: SparseMap

    def __post_init__(self):
        if self.d.degree_shift != 1:
            raise NotAComplex("differential must have degree +1")
        if self.d.source != self.space or self.d.target != self.space:
            raise IncompatibleSpaces("differential must be an endomap of the space")
        dd = compose(self.d, self.d)
        if not dd.is_zero():
            raise NotAComplex("d∘d != 0")

    def homology_dims(self) -> dict[int, int]:
        """dim H^i = dim ker(d_i) - dim im(d_{i-1}), per degree."""
        by_degree: dict[int, list[str]] = {}
        for b in self.space.basis:
            by_degree.setdefault(self.space.degree[b], []).append(b)
        ranks: dict[int, int] = {}
        for deg, names in by_degree.items():
            rows = []
            tgt_idx = {b: i for i, b in enumerate(by_degree.get(deg + 1, []))}
            for b in names:
                col = self.d(b)
                rows.append({tgt_idx[t]: v for t, v in col.items()})
            ranks[deg] = sparse_rank(rows)
        out = {}
        for deg, names in by_degree.items():
            ker = len(names) - ranks.get(deg, 0)
            im_prev = ranks.get(deg - 1, 0)
            out[deg] = ker - im_prev
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** self.space.degree[b] for b in self.space.basis)

    def to_json(self) -> dict:
        return {"space": self.space.to_json(), "d": self.d.to_json()}

    @staticmethod
    def from_json(data: dict) -> "ChainComplex":
        return ChainComplex(
            GradedBasisSpace.from_json(data["space"]), SparseMap.from_json(data["d"])
        )


def homology_dims(c: ChainComplex) -> dict[int, int]:
    return c.homology_dims()


# ---------------------------------------------------------------------------
# Tensor products with Koszul signs
# ---------------------------------------------------------------------------


def tensor_name(a: str, b: str) -> str:
    return f"{a}⊗{b}"


def tensor_space(a: GradedBasisSpace, b: GradedBasisSpace) -> GradedBasisSpace:
    """Basis = pairs, degrees add, weights add when both present."""
    names = []
    degree = {}
    weight = {} if (a.weight is not None and b.weight is not None) else None
    for x in a.basis:
        for y in b.basis:
            n = tensor_name(x, y)
            names.append(n)
            degree[n] = a.degree[x] + b.degree[y]
            if weight is not None:
                weight[n] = a.weight[x] + b.weight[y]
    return GradedBasisSpace(tuple(names), degree, weight)


def tensor_map(f: SparseMap, g: SparseMap) -> SparseMap:
    """(f⊗g)(x⊗y) = (-1)^{|g||x|} f(x)⊗g(y)  — the one Koszul sign rule."""
    src = tensor_space(f.source, g.source)
    tgt = tensor_space(f.target, g.target)
    entries = {}
    for (xs, xt), v in f.entries.items():
        for (ys, yt), w in g.entries.items():
            sign = -1 if (g.degree_shift % 2) and (f.source.degree[xs] % 2) else 1
            entries[(tensor_name(xs, ys), tensor_name(xt, yt))] = sign * v * w
    return SparseMap(src, tgt, f.degree_shift + g.degree_shift, entries)


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj.to_json() if hasattr(obj, "to_json") else obj, indent=2, sort_keys=True, ensure_ascii=False)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
