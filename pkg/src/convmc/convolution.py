"""Convolution L-infinity algebras Hom(C, L): brackets, Maurer-Cartan
residuals, twisted complexes and their homology, and naturality maps.

The carrier of Hom(C, L) is the graded space of linear maps from a
one-reduced cdg coalgebra C to an L-infinity algebra L, with basis keys
(c, x) for the elementary map sending the basis element c to x; the key
degree is |x| - |c|.  The n-ary bracket evaluates

    l_n(f_1, ..., f_n) = sum over S_n of +- l_n^L o (f_s(1) (x) ... (x)
    f_s(n)) o Delta^(n)

with the (n-1)-fold iterated reduced coproduct on the right and Koszul
signs both for reordering the maps and for evaluating them on tensor
words.  l_1 is the Hom differential d_L o f - (-1)^{|f|} f o d_C.
Maurer-Cartan elements are degree-0 maps with sum 1/n! l_n(tau, ..., tau)
equal to zero; the sum is finite because iterated coproducts of a
one-reduced coalgebra vanish in bounded arity.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from math import factorial

from .graded import (ChainComplex, GradedMap, GradedSpace, Key, Vec,
                     contraction_from_complex, vec_is_zero)
from .matrices import ONE, ZERO
from .models import CdgCoalgebra, LInfinityAlgebra, Truncation

F = Fraction


def koszul_perm_sign(sigma, degrees) -> int:
    """Sign of reordering homogeneous elements of the given degrees into
    (x_{sigma(1)}, ..., x_{sigma(n)}); sigma is 0-based here."""
    sign = 1
    n = len(sigma)
    for a in range(n):
        for b in range(a + 1, n):
            if sigma[a] > sigma[b]:
                if degrees[sigma[a]] % 2 and degrees[sigma[b]] % 2:
                    sign = -sign
    return sign


class TwistedComplex(ChainComplex):
    """The convolution carrier with the differential twisted by an MC
    element: d^tau(f) = sum 1/n! l_{n+1}(f, tau, ..., tau)."""

    def __init__(self, algebra: "ConvolutionAlgebra", tau: GradedMap,
                 d: GradedMap):
        super().__init__(algebra.carrier, d,
                         name=f"{algebra.name} twisted")
        self.algebra = algebra
        self.tau = tau


class ConvolutionAlgebra:
    def __init__(self, C: CdgCoalgebra, L: LInfinityAlgebra, name: str = ""):
        if not C.is_one_reduced():
            raise ValueError("convolution source must be one-reduced")
        self.C = C
        self.L = L
        self.name = name or f"Hom({C.name},{L.name})"
        by_deg: dict[int, list] = {}
        for ck in C.space.all_keys():
            for lk in L.space.all_keys():
                d = L.space.degree_of[lk] - C.space.degree_of[ck]
                by_deg.setdefault(d, []).append((ck, lk))
        self.carrier = GradedSpace(by_deg, name=self.name)
        self._window: int | None = None

    # -- elements --------------------------------------------------------

    def elementary(self, ck: Key, lk: Key) -> GradedMap:
        d = self.L.space.degree_of[lk] - self.C.space.degree_of[ck]
        return GradedMap(self.C.space, self.L.space, d, {ck: {lk: ONE}})

    def to_vec(self, f: GradedMap) -> Vec:
        out: Vec = {}
        for ck, col in f.entries.items():
            for lk, c in col.items():
                if c:
                    out[(ck, lk)] = c
        return out

    def to_map(self, v: Vec, degree: int | None = None) -> GradedMap:
        if degree is None:
            degree = self.carrier.degree_of_vector(v)
            if degree is None:
                degree = 0
        cols: dict[Key, Vec] = {}
        for (ck, lk), c in v.items():
            cols.setdefault(ck, {})[lk] = cols.get(ck, {}).get(lk, ZERO) + c
        return GradedMap(self.C.space, self.L.space, degree, cols)

    def zero_map(self, degree: int = 0) -> GradedMap:
        return GradedMap(self.C.space, self.L.space, degree)

    # -- structure -------------------------------------------------------

    def differential_of(self, f: GradedMap) -> GradedMap:
        out = self.L.l1().compose(f)
        fd = f.compose(self.C.d)
        if f.degree % 2:
            return out + fd
        return out - fd

    def coproduct_window(self) -> int:
        """Largest n with a nonzero (n-1)-fold iterated coproduct; 1 for
        primitively generated sources with vanishing coproduct."""
        if self._window is None:
            n = 1
            cap = max(2, self.C.space.total_dim() + 1)
            while n <= cap:
                if not any(self.C.iterated_coproduct(k, n + 1)
                           for k in self.C.space.all_keys()):
                    break
                n += 1
            self._window = n
        return self._window

    def arity_window(self) -> int:
        return min(self.coproduct_window(), self.L.max_arity())

    def bracket(self, n: int, fs) -> GradedMap:
        """l_n of the convolution algebra on n homogeneous maps."""
        fs = list(fs)
        if len(fs) != n:
            raise ValueError("arity mismatch")
        if n == 1:
            return self.differential_of(fs[0])
        fdegs = [f.degree for f in fs]
        out_degree = sum(fdegs) - 1
        cols: dict[Key, Vec] = {}
        cdeg = self.C.space.degree_of
        for ck in self.C.space.all_keys():
            words = self.C.iterated_coproduct(ck, n)
            if not words:
                continue
            acc: Vec = {}
            for sigma in permutations(range(n)):
                s1 = koszul_perm_sign(sigma, fdegs)
                for word, gamma in words.items():
                    sgn = s1
                    before = 0
                    vecs = []
                    for slot in range(n):
                        fd = fdegs[sigma[slot]]
                        if fd % 2 and before % 2:
                            sgn = -sgn
                        before += cdeg[word[slot]]
                        vecs.append(fs[sigma[slot]].apply({word[slot]: ONE}))
                    val = self.L.bracket_multi(n, vecs)
                    for lk, c in val.items():
                        nc = acc.get(lk, ZERO) + F(sgn) * gamma * c
                        if nc:
                            acc[lk] = nc
                        else:
                            acc.pop(lk, None)
            if acc:
                cols[ck] = acc
        return GradedMap(self.C.space, self.L.space, out_degree, cols)

    # -- Maurer-Cartan ---------------------------------------------------

    def mc_check(self, tau: GradedMap) -> GradedMap:
        """The residual sum 1/n! l_n(tau, ..., tau); zero iff tau is MC."""
        if tau.degree != 0:
            raise ValueError("Maurer-Cartan candidates must have degree 0")
        res = self.differential_of(tau)
        for n in range(2, self.arity_window() + 1):
            term = self.bracket(n, [tau] * n)
            res = res + term.scale(F(1, factorial(n)))
        return res

    def is_mc(self, tau: GradedMap) -> bool:
        return self.mc_check(tau).is_zero()

    def twist(self, tau: GradedMap) -> TwistedComplex:
        res = self.mc_check(tau)
        if not res.is_zero():
            raise ValueError(
                f"cannot twist by a non-MC element, residual {res.entries!r}")
        cols: dict[Key, Vec] = {}
        for key in self.carrier.all_keys():
            f = self.elementary(*key)
            img = self.differential_of(f)
            for n in range(1, self.arity_window()):
                term = self.bracket(n + 1, [f] + [tau] * n)
                img = img + term.scale(F(1, factorial(n)))
            v = self.to_vec(img)
            if v:
                cols[key] = v
        d = GradedMap(self.carrier, self.carrier, -1, cols, name="d^tau")
        if not d.compose(d).is_zero():
            raise AssertionError("twisted differential does not square to zero")
        return TwistedComplex(self, tau, d)

    def twisted_betti(self, tau: GradedMap) -> dict[int, int]:
        return self.twist(tau).betti()

    def twisted_homology(self, tau: GradedMap, n: int) -> GradedSpace:
        con = contraction_from_complex(self.twist(tau))
        H = con.small.space
        return GradedSpace({n: list(H.basis(n))}, name=f"H_{n}({self.name})")

    # -- materialized structure -----------------------------------------

    def as_linfty(self, arity_max: int = 4) -> LInfinityAlgebra:
        """The carrier with bracket tables materialized through the given
        arity, suitable for the generic Jacobi validation."""
        keys = sorted(self.carrier.all_keys(), key=self.carrier.sort_key)
        degf = self.carrier.degree_of
        brackets: dict[int, dict[tuple, Vec]] = {1: {}}
        for k in keys:
            v = self.to_vec(self.differential_of(self.elementary(*k)))
            if v:
                brackets[1][(k,)] = v
        top = min(arity_max, self.coproduct_window())
        arities = [1]
        for n in range(2, top + 1):
            if n > self.L.max_arity():
                break
            table: dict[tuple, Vec] = {}
            for word in combinations_with_replacement(keys, n):
                if any(a == b and degf[a] % 2
                       for a, b in zip(word, word[1:])):
                    continue
                val = self.bracket(n, [self.elementary(*k) for k in word])
                v = self.to_vec(val)
                if v:
                    table[word] = v
            if table:
                brackets[n] = table
            arities.append(n)
        return LInfinityAlgebra(self.carrier, brackets, name=self.name,
                                arities=arities)

    def validate(self, arity_max: int = 4):
        """Generalized Jacobi on the materialized brackets, exact."""
        tr = Truncation(self.carrier.deg_min, self.carrier.deg_max,
                        arity_max)
        self.as_linfty(arity_max).validate(tr)

    # -- naturality ------------------------------------------------------

    def pushforward(self, g: GradedMap, Lp: LInfinityAlgebra
                    ) -> "ConvolutionMorphism":
        check_strict_morphism(self.L, Lp, g)
        target = ConvolutionAlgebra(self.C, Lp)
        return ConvolutionMorphism(self, target, lambda f: g.compose(f),
                                   kind="pushforward")

    def pullback(self, h: GradedMap, Cp: CdgCoalgebra
                 ) -> "ConvolutionMorphism":
        check_coalgebra_morphism(Cp, self.C, h)
        target = ConvolutionAlgebra(Cp, self.L)
        return ConvolutionMorphism(self, target, lambda f: f.compose(h),
                                   kind="pullback")


class ConvolutionMorphism:
    """Strict map of convolution algebras given by composition with a
    fixed morphism on one side."""

    def __init__(self, source: ConvolutionAlgebra, target: ConvolutionAlgebra,
                 transport, kind: str):
        self.source = source
        self.target = target
        self._transport = transport
        self.kind = kind

    def apply(self, f: GradedMap) -> GradedMap:
        return self._transport(f)


def check_strict_morphism(L: LInfinityAlgebra, Lp: LInfinityAlgebra,
                          g: GradedMap):
    """g commutes with l_1 and with every stored bracket on basis words."""
    if g.degree != 0:
        raise ValueError("strict morphisms have degree 0")
    if (g.src.degree_of != L.space.degree_of
            or g.dst.degree_of != Lp.space.degree_of):
        raise ValueError("morphism endpoints do not match the algebras")
    lhs = g.compose(L.l1())
    rhs = Lp.l1().compose(g)
    for k in L.space.all_keys():
        a, b = lhs.column(k), rhs.column(k)
        if not vec_is_zero({x: a.get(x, ZERO) - b.get(x, ZERO)
                            for x in set(a) | set(b)}):
            raise ValueError("map does not commute with l_1")
    degf = L.space.degree_of
    keys = sorted(L.space.all_keys(), key=L.space.sort_key)
    arities = sorted(set(L.arities) | set(Lp.arities))
    for n in arities:
        if n < 2:
            continue
        for word in combinations_with_replacement(keys, n):
            if any(a == b and degf[a] % 2 for a, b in zip(word, word[1:])):
                continue
            left = g.apply(L.bracket(n, word))
            right = Lp.bracket_multi(n, [g.apply({k: ONE}) for k in word])
            if not vec_is_zero({k: left.get(k, ZERO) - right.get(k, ZERO)
                                for k in set(left) | set(right)}):
                raise ValueError(
                    f"map does not commute with l_{n} on {word!r}")


def check_coalgebra_morphism(Cp: CdgCoalgebra, C: CdgCoalgebra,
                             h: GradedMap):
    """h is a degree-0 chain map with (h (x) h) o Delta' = Delta o h."""
    if h.degree != 0:
        raise ValueError("coalgebra morphisms have degree 0")
    if (h.src.degree_of != Cp.space.degree_of
            or h.dst.degree_of != C.space.degree_of):
        raise ValueError("morphism endpoints do not match the coalgebras")
    if not (h.compose(Cp.d) - C.d.compose(h)).is_zero():
        raise ValueError("map does not commute with the differentials")
    for k in Cp.space.all_keys():
        lhs = C.delta_apply(h.apply({k: ONE}))
        rhs: Vec = {}
        for (a, b), c in Cp.delta.get(k, {}).items():
            for a2, c2 in h.apply({a: ONE}).items():
                for b2, c3 in h.apply({b: ONE}).items():
                    kk = (a2, b2)
                    nc = rhs.get(kk, ZERO) + c * c2 * c3
                    if nc:
                        rhs[kk] = nc
                    else:
                        rhs.pop(kk, None)
        if {p: c for p, c in lhs.items() if c} != rhs:
            raise ValueError(f"coproducts disagree after the map at {k!r}")
