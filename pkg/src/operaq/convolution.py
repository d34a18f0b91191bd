"""The convolution pre-Lie algebra and the polyvector structure it carries.

A convolution element is an arity-indexed family of equivariant maps from
the counital shifted Poisson cooperad into an operad backend; components
are stored as {(arity, cooperation name): OperadElement}.  The pre-Lie
star is the transpose-decomposition pairing

    (f ⋆ g)(c) = Σ coeff · (-1)^{|g|·deg(outer)} · f(outer) ∘_S g(inner)

summed over the full decomposition of c (unit terms included).  Elements
supported in arity 0 are rejected at construction: their star couplings
are not materialized (see ledger).

The polyvector bookkeeping: weight of a cooperation = its block count;
the extra shift of the polyvector complex is metadata (``pol_degree =
map degree + 1``), never applied destructively.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .cooperads import CooperadData, build_coP1_counital, cobracket_name, delta_name
from .freeop import OperadElement, TruncationError, element
from .linalg import GradedBasisSpace, SparseMap, express_in_rows, nullspace
from .symseq import Permutation

Q = Fraction


class InvalidStructure(ValueError):
    """Raised when a designated structure fails its defining identities."""


@dataclass(frozen=True)
class ConvolutionElement:
    """Weight-graded family of maps from the cooperad into the operad."""

    cooperad: CooperadData
    operad: object
    components: dict

    def __post_init__(self):
        comps = {}
        for (n, cname), val in self.components.items():
            if val is None or val.is_zero():
                continue
            if n == 0:
                raise InvalidStructure(
                    "arity-0 support is not handled by the star couplings"
                )
            comps[(n, cname)] = val
        object.__setattr__(self, "components", comps)

    def is_zero(self) -> bool:
        return not self.components

    def value(self, n: int, cname: str) -> OperadElement | None:
        return self.components.get((n, cname))

    def add(self, other: "ConvolutionElement") -> "ConvolutionElement":
        comps = dict(self.components)
        for key, val in other.components.items():
            cur = comps.get(key)
            comps[key] = val if cur is None else cur.add(val)
        return ConvolutionElement(self.cooperad, self.operad, comps)

    def scale(self, c) -> "ConvolutionElement":
        return ConvolutionElement(
            self.cooperad,
            self.operad,
            {k: v.scale(c) for k, v in self.components.items()},
        )

    def degree(self) -> int | None:
        """Common map degree of all components (None when zero)."""
        degs = set()
        for (n, cname), val in self.components.items():
            csp = self.cooperad.space(n)
            osp = self.operad.space(n)
            for name in val.coeffs:
                degs.add(osp.degree[name] - csp.degree[cname])
        if not degs:
            return None
        if len(degs) > 1:
            raise InvalidStructure(f"inhomogeneous element: degrees {degs}")
        return degs.pop()

    def pol_degree(self) -> int | None:
        """Degree in the shifted polyvector complex (shift as metadata)."""
        d = self.degree()
        return None if d is None else d + 1

    def weight_support(self) -> set[int]:
        return {
            self.cooperad.blocks(n, cname) for (n, cname) in self.components
        }

    def arity_support(self) -> set[int]:
        return {n for (n, _) in self.components}

    def is_equivariant(self) -> bool:
        """Commutes with all adjacent transpositions at every arity."""
        for n in sorted(self.arity_support()):
            csp = self.cooperad.space(n)
            for i in range(1, n):
                sigma = Permutation.transposition(n, i)
                cact = self.cooperad.act(n, sigma)
                for cname in csp.basis:
                    lhs = _zero(self.operad, n)
                    for tgt, coeff in cact(cname).items():
                        val = self.value(n, tgt)
                        if val is not None:
                            lhs = lhs.add(val.scale(coeff))
                    val = self.value(n, cname)
                    rhs = (
                        _zero(self.operad, n) if val is None else val.act(sigma)
                    )
                    if not lhs.add(rhs.scale(-1)).is_zero():
                        return False
        return True


def _zero(operad, n) -> OperadElement:
    return OperadElement(operad, n, {})


def conv_zero(C, O) -> ConvolutionElement:
    return ConvolutionElement(C, O, {})


def conv_element(C, O, components) -> ConvolutionElement:
    return ConvolutionElement(C, O, components)


def conv_star(f: ConvolutionElement, g: ConvolutionElement) -> ConvolutionElement:
    """γ ∘ (f⊗g) ∘ Δ — the convolution pre-Lie product.

    Terms are evaluated in the slot-1 form of the decomposition:
    act(σ_S)(f(outer) ∘₁ g(inner)); see cooperads.CoopTerm.
    """
    if f.cooperad is not g.cooperad or f.operad is not g.operad:
        raise InvalidStructure("star requires a shared cooperad and operad")
    C, O = f.cooperad, f.operad
    if f.is_zero() or g.is_zero():
        return conv_zero(C, O)
    f_arities = f.arity_support()
    g_arities = g.arity_support()
    out: dict = {}
    max_n = min(C.max_arity, getattr(O, "max_arity", C.max_arity))
    for n in range(1, max_n + 1):
        if not any(k + m - 1 == n for k in f_arities for m in g_arities):
            continue
        csp = C.space(n)
        for cname in csp.basis:
            acc = None
            for t in C.delta1(n)[cname]:
                fv = f.value(t.k, t.outer)
                gv = g.value(t.m, t.inner)
                if fv is None or gv is None:
                    continue
                term = (
                    fv.compose_at(1, gv).act(t.shuffle(n)).scale(t.coeff)
                )
                acc = term if acc is None else acc.add(term)
            if acc is not None and not acc.is_zero():
                out[(n, cname)] = acc
    return ConvolutionElement(C, O, out)


def conv_bracket(f: ConvolutionElement, g: ConvolutionElement) -> ConvolutionElement:
    """f⋆g - (-1)^{|f||g|} g⋆f."""
    fg = conv_star(f, g)
    gf = conv_star(g, f)
    sign = -1 if (f.degree() or 0) % 2 and (g.degree() or 0) % 2 else 1
    return fg.add(gf.scale(-sign))


@dataclass(frozen=True)
class MaurerCartanElement:
    """Arity-2, cobracket-supported element with [μ,μ] = 0."""

    underlying: ConvolutionElement

    def __post_init__(self):
        f = self.underlying
        support = set(f.components)
        if support != {(2, cobracket_name())}:
            raise InvalidStructure(
                "Maurer-Cartan element must be supported on the binary cobracket"
            )
        if f.degree() != 1:
            raise InvalidStructure("Maurer-Cartan element must have map degree 1")
        if not f.is_equivariant():
            raise InvalidStructure("Maurer-Cartan element must be equivariant")
        if not conv_bracket(f, f).is_zero():
            raise InvalidStructure(
                "[μ,μ] != 0: the designated product is not commutative-associative"
            )


def mc_from_comm_map(C: CooperadData, O, product: OperadElement) -> MaurerCartanElement:
    """The twisting element of a designated binary commutative product."""
    mu = conv_element(C, O, {(2, cobracket_name()): product})
    return MaurerCartanElement(mu)


def twisted_differential(
    f: ConvolutionElement,
    mc: MaurerCartanElement | None,
    internal=None,
) -> ConvolutionElement:
    """d(f) = internal differential + [μ, f]."""
    C, O = f.cooperad, f.operad
    out = conv_zero(C, O)
    if internal is not None:
        comps = {}
        for (n, cname), val in f.components.items():
            dval = internal(val)
            if dval is not None and not dval.is_zero():
                comps[(n, cname)] = dval
        out = out.add(ConvolutionElement(C, O, comps))
    if mc is not None:
        out = out.add(conv_bracket(mc.underlying, f))
    return out


def presentation_internal(backend):
    """Internal differential of a quasi-free presentation backend."""

    def apply(val: OperadElement) -> OperadElement:
        out: dict = {}
        for name, c in val.coeffs.items():
            t = backend.trees(val.arity)[name]
            for t2, c2 in backend.differential_tree(t).items():
                key = backend.tree_name(t2)
                acc = out.get(key, Q(0)) + c * c2
                if acc:
                    out[key] = acc
                elif key in out:
                    del out[key]
        return OperadElement(backend, val.arity, out)

    return apply


# ---------------------------------------------------------------------------
# Braces and the polyvector product
# ---------------------------------------------------------------------------


def symmetric_brace(h: ConvolutionElement, args: list) -> ConvolutionElement:
    """⟨h; f₁,…,f_k⟩, the pre-Lie symmetric brace (Guin-Oudom recursion)."""
    if not args:
        return h
    if len(args) == 1:
        return conv_star(h, args[0])
    head, last = args[:-1], args[-1]
    out = conv_star(symmetric_brace(h, head), last)
    dl = last.degree() or 0
    for j in range(len(head)):
        sign = Q(1)
        for t in head[j + 1 :]:
            if dl % 2 and (t.degree() or 0) % 2:
                sign = -sign
        merged = head[:j] + [conv_star(head[j], last)] + head[j + 1 :]
        out = out.add(symmetric_brace(h, merged).scale(-sign))
    return out


def product_inserter(C: CooperadData, O, product: OperadElement) -> ConvolutionElement:
    """The non-equivariant splitting sending the binary coproduct to the
    designated product and every other cooperation to zero."""
    return conv_element(C, O, {(2, delta_name(2)): product})


def pol_product(
    mu_tilde: ConvolutionElement, f: ConvolutionElement, g: ConvolutionElement
) -> ConvolutionElement:
    """f·g = ⟨μ̃; f, g⟩ — strictly associative, weight additive."""
    return symmetric_brace(mu_tilde, [f, g])


def bracket_element(C: CooperadData, O, bracket: OperadElement) -> ConvolutionElement:
    """The weight-2 element sending the binary coproduct to the bracket."""
    return conv_element(C, O, {(2, delta_name(2)): bracket})


def x_power(
    C: CooperadData, O, bracket: OperadElement, product: OperadElement, k: int
) -> ConvolutionElement:
    """k-th polyvector power of the bracket element."""
    if k < 1:
        raise ValueError("power must be >= 1")
    if C.max_arity < 2 * k:
        raise TruncationError(f"truncation {C.max_arity} < arity {2*k}")
    x = bracket_element(C, O, bracket)
    mu_tilde = product_inserter(C, O, product)
    out = x
    for _ in range(k - 1):
        out = pol_product(mu_tilde, out, x)
    return out


# ---------------------------------------------------------------------------
# Equivariant-subspace complexes (polyvectors of an endomorphism operad)
# ---------------------------------------------------------------------------


def equivariant_basis(C: CooperadData, O, n: int, weight: int | None = None):
    """Basis of Hom_{S_n}(C(n), O(n)) (optionally one weight slice).

    Each basis vector is a dict {(cooperation name, operation name): Q}.
    """
    csp = C.space(n)
    osp = O.space(n)
    cnames = [
        b for b in csp.basis if weight is None or C.blocks(n, b) == weight
    ]
    pairs = [(c, o) for c in cnames for o in osp.basis]
    index = {p: i for i, p in enumerate(pairs)}
    rows = []
    for i in range(1, n):
        sigma = Permutation.transposition(n, i)
        cact = C.act(n, sigma)
        oact = O.act(n, sigma)
        # equivariance: f(σc) - σ f(c) = 0, one row per (c, o') equation
        eq: dict[tuple[str, str], dict[int, Fraction]] = {}
        for c in cnames:
            for tgt, v in cact(c).items():
                if tgt not in cnames:
                    continue
                for o in osp.basis:
                    eq.setdefault((c, o), {})[index[(tgt, o)]] = (
                        eq.setdefault((c, o), {}).get(index[(tgt, o)], Q(0)) + v
                    )
            for o in osp.basis:
                for o2, w in oact(o).items():
                    cur = eq.setdefault((c, o2), {})
                    cur[index[(c, o)]] = cur.get(index[(c, o)], Q(0)) - w
        rows.extend(eq.values())
    vecs = nullspace(rows, len(pairs))
    basis = []
    for v in vecs:
        basis.append({pairs[i]: c for i, c in v.items()})
    return basis, pairs


def conv_from_pairs(C, O, n, vec) -> ConvolutionElement:
    comps: dict = {}
    for (cname, oname), c in vec.items():
        key = (n, cname)
        cur = comps.get(key, _zero(O, n))
        comps[key] = cur.add(element(O, n, {oname: c}))
    return ConvolutionElement(C, O, comps)


def weight_complex_homology(
    C: CooperadData, O, mc: MaurerCartanElement, weight: int, arities: range
) -> dict[int, int]:
    """Homology dims, by arity, of one weight slice of the twisted complex.

    The differential [μ,-] raises arity by one at fixed weight.  The rank
    of the differential is computed on ambient coordinates (its image is
    automatically equivariant), so no change of basis is needed.  Boundary
    arities of the window see truncation effects and are reported as
    computed.
    """
    from .linalg import sparse_rank

    bases = {n: equivariant_basis(C, O, n, weight)[0] for n in arities}
    index: dict = {}

    def ambient(vec: dict) -> dict[int, Fraction]:
        out = {}
        for key, c in vec.items():
            idx = index.setdefault(key, len(index))
            out[idx] = c
        return out

    mats = {}
    for n in arities:
        if n + 1 not in bases:
            continue
        rows = []
        for v in bases[n]:
            f = conv_from_pairs(C, O, n, v)
            df = twisted_differential(f, mc)
            img: dict = {}
            for (m, cname), val in df.components.items():
                if m != n + 1:
                    raise InvalidStructure("weight slice differential leaked arity")
                for oname, c in val.coeffs.items():
                    img[(cname, oname)] = img.get((cname, oname), Q(0)) + c
            rows.append(ambient(img))
        mats[n] = rows
    out = {}
    for n in arities:
        dim = len(bases[n])
        r_out = sparse_rank(mats[n]) if n in mats else 0
        r_in = sparse_rank(mats[n - 1]) if (n - 1) in mats else 0
        out[n] = dim - r_out - r_in
    return out
